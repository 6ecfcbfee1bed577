use flatline::delaunay::{
    circumdisk_violations, delaunay_triangulate, detect_cylinder, flip_to_delaunay, is_locally_delaunay,
};
use flatline::slit::build_slit_torus;
use flatline::Mat2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn slit_torus_half_is_certified() {
    let s = build_slit_torus(0.5).unwrap().surface.transform(&Mat2::rotation(0.377));
    let t = delaunay_triangulate(&s).unwrap();
    assert!((t.mesh.area() - 2.0).abs() < 1e-9);
    assert!(is_locally_delaunay(&t.mesh));
    assert!(circumdisk_violations(&t.mesh, 1e-9).is_empty());
    // two vertices, genus two: 2V - 2χ triangles
    assert_eq!(t.mesh.n_triangles() as i64, 2 * 2 - 2 * s.euler_characteristic());
}

#[test]
fn random_flips_return_to_delaunay() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s = build_slit_torus(0.41).unwrap().surface.apply_flow(1.5);
    let mut m = delaunay_triangulate(&s).unwrap().mesh;
    let n = m.n_triangles();
    for _ in 0..200 {
        let h = rng.gen_range(0..m.n_halfedges());
        if m.is_flippable(h) {
            m.flip(h);
        }
    }
    assert!((m.area() - s.area()).abs() < 1e-9);
    flip_to_delaunay(&mut m, 100_000, |_| {}).unwrap();
    assert!(is_locally_delaunay(&m));
    assert!(circumdisk_violations(&m, 1e-9).is_empty());
    assert_eq!(m.n_triangles(), n);
}

#[test]
fn flowed_slit_torus_has_horizontal_cylinders() {
    let t = 6.0;
    let s = build_slit_torus(0.3).unwrap().surface.apply_flow(-t);
    let tri = delaunay_triangulate(&s).unwrap();
    let m = &tri.mesh;
    let (w, h) = ((-t / 2.0).exp(), (t / 2.0).exp());
    let mut found = 0;
    for e in m.edges() {
        if m.edge_length(e) <= (2.0 / std::f64::consts::PI).sqrt() * s.area().sqrt() {
            continue;
        }
        let c = detect_cylinder(m, e, 2.0).expect("long edge crosses a cylinder");
        assert!((c.circumference - w).abs() < 1e-9, "{c:?}");
        assert!((c.height - h).abs() < 1e-9, "{c:?}");
        assert!((c.modulus - t.exp()).abs() < 1e-6 * t.exp());
        let d = c.circumdiameter;
        assert!(c.height <= d + 1e-9, "{c:?}");
        assert!(d <= (c.height.powi(2) + c.circumference.powi(2)).sqrt() + 1e-9, "{c:?}");
        assert!(d < 2.0 * c.height);
        found += 1;
    }
    assert!(found > 0);
}
