use flatline::delaunay::{circumdisk_violations, delaunay_triangulate};
use flatline::kernel::ray::cast_vertical_ray;
use flatline::network::{build_network, coverage_witness, embed_square, k_reachable, k_visible, NetworkOptions, SquareRole};
use flatline::slit::build_slit_torus;
use flatline::{Error, Mat2, Vec2};
use proptest::prelude::*;

#[test]
fn singularity_blocks_visibility() {
    let s = build_slit_torus(0.4).unwrap();
    let m = s.surface.mesh();
    let sq = embed_square(m, s.surface.point(0, Vec2::new(0.4, 0.1)).unwrap(), 0.1).unwrap();
    assert!(sq.embedded);
    let below = s.surface.point(0, Vec2::new(0.4, 0.9)).unwrap();
    // the upward ray runs into the branch point
    assert!(cast_vertical_ray(m, below, 0.5, true).hit.is_some());
    assert!(k_visible(m, below, &sq, 5.0).is_none());
    let beside = s.surface.point(0, Vec2::new(0.42, 0.9)).unwrap();
    let w = k_visible(m, beside, &sq, 5.0).unwrap();
    assert!(w.up && (w.length - 0.15).abs() < 1e-9);
}

#[test]
fn square_with_branch_point_inside_is_rejected() {
    let s = build_slit_torus(0.4).unwrap();
    let p = s.surface.point(0, Vec2::new(0.42, 0.03)).unwrap();
    assert!(matches!(embed_square(s.surface.mesh(), p, 0.2), Err(Error::SingularityInInterior { .. })));
}

#[test]
fn a_square_reaches_itself() {
    let s = build_slit_torus(0.4).unwrap();
    let sq = embed_square(s.surface.mesh(), s.surface.point(1, Vec2::new(0.7, 0.5)).unwrap(), 0.3).unwrap();
    assert!(k_reachable(s.surface.mesh(), &sq, &sq, 1.0, 16, None).is_some());
}

fn instance(lambda: f64, angle: f64, t: f64) -> flatline::FlatSurface {
    build_slit_torus(lambda).unwrap().surface.normalized().transform(&Mat2::rotation(angle)).apply_flow(t)
}

#[test]
fn network_at_recurrence() {
    for (lambda, angle, t) in [(0.5, 0.0, 0.0), (0.41, 1.1, -0.3), (0.62, 2.0, 0.5)] {
        let s = instance(lambda, angle, t);
        let tri = delaunay_triangulate(&s).unwrap();
        assert!(circumdisk_violations(&tri.mesh, 1e-9).is_empty());
        let r = build_network(&s, &tri.mesh, &NetworkOptions::default()).unwrap();
        assert!(r.l3 > 0.4);
        assert!(r.connected, "{lambda}: {} components", r.components);
        assert!(r.coverage >= 0.999);
        assert!(r.squares.len() <= 3 * r.n_triangles);
        assert!(r.squares.iter().all(|q| q.square.embedded && q.square.side > 0.0));
        assert!(r.squares.iter().any(|q| matches!(q.role, SquareRole::Edge { .. })));
        // witnesses re-cast to the claimed triangle
        for w in &r.witnesses {
            let tr = cast_vertical_ray(&tri.mesh, w.point, w.offset + w.length / 2.0, w.up);
            assert_eq!(tr.end.tri, w.triangle);
        }
        let _ = coverage_witness;
    }
}

#[test]
fn wide_gap_parameters_fail() {
    let s = instance(0.5, 0.3, 0.0);
    let tri = delaunay_triangulate(&s).unwrap();
    let e = build_network(&s, &tri.mesh, &NetworkOptions { eps: 0.3, delta: 0.5, ..Default::default() }).unwrap_err();
    assert!(matches!(e, Error::HypothesisFailure(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn visibility_is_monotone(x in 0.01f64..0.99, y in 0.01f64..0.99, k in 0.5f64..4.0) {
        let s = build_slit_torus(0.37).unwrap();
        let m = s.surface.mesh();
        let sq = embed_square(m, s.surface.point(0, Vec2::new(0.7, 0.5)).unwrap(), 0.2).unwrap();
        let p = s.surface.point(1, Vec2::new(x, y)).unwrap();
        if let Some(w) = k_visible(m, p, &sq, k) {
            prop_assert!(w.length <= k * 0.2 + 1e-9);
            prop_assert!(k_visible(m, p, &sq, k * 1.5).is_some());
        }
    }

    #[test]
    fn reachability_is_symmetric(ax in 0.15f64..0.85, ay in 0.15f64..0.85, bx in 0.15f64..0.85, by in 0.15f64..0.85, k in 0.5f64..3.0) {
        let s = build_slit_torus(0.37).unwrap();
        let m = s.surface.mesh();
        let a = embed_square(m, s.surface.point(0, Vec2::new(ax, ay)).unwrap(), 0.1);
        let b = embed_square(m, s.surface.point(1, Vec2::new(bx, by)).unwrap(), 0.1);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(k_reachable(m, &a, &b, k, 9, None).is_some(), k_reachable(m, &b, &a, k, 9, None).is_some());
        }
    }
}
