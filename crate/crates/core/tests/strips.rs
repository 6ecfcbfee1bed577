use flatline::connections::{enumerate_connections, SaddleConnection};
use flatline::delaunay::delaunay_triangulate;
use flatline::kernel::Mesh;
use flatline::slit::build_slit_torus;
use flatline::strips::{
    buffered_square_from_strip, decompose_strips, independent_masks, nested_masks, strip_width_bound_check, time_sequence, PzOptions,
};
use flatline::{Mat2, Norm, Vec2};
use proptest::prelude::*;
use std::time::Instant;

fn slit_mesh(lambda: f64, angle: f64) -> Mesh {
    let s = build_slit_torus(lambda).unwrap().surface.transform(&Mat2::rotation(angle));
    delaunay_triangulate(&s).unwrap().mesh
}

fn shortest_connections(m: &Mesh, count: usize) -> Vec<SaddleConnection> {
    let mut bound = 1.0;
    loop {
        let cs: Vec<_> = enumerate_connections(m, bound, Norm::Euclid).unwrap().into_iter().filter(|c| c.holonomy.x.abs() > 1e-6).collect();
        if cs.len() >= count {
            return cs.into_iter().take(count).collect();
        }
        bound *= 1.5;
    }
}

const SURFACES: [(f64, f64); 5] = [(0.3, 0.3), (0.41, 1.1), (0.5, -0.7), (0.62, 2.3), (0.77, 0.9)];

#[test]
fn strips_partition_the_surface() {
    for (lambda, angle) in SURFACES {
        let m = slit_mesh(lambda, angle);
        for c in shortest_connections(&m, 5) {
            let d = decompose_strips(&m, &c).unwrap();
            assert!((d.total_area - 2.0).abs() < 1e-9, "λ={lambda}: area {}", d.total_area);
            let len: f64 = d.strips.iter().map(|s| s.width).sum();
            assert!((len - c.length).abs() < 1e-9);
            for s in &d.strips {
                assert!(s.height > 0.0 && s.width > 0.0);
                for z in &s.zippers {
                    // a prong from an endpoint of γ puts its singularity at the top corner
                    assert!(z.height >= 0.0 && z.height <= s.height + 1e-9, "{s:?}");
                }
                assert!(s.left + s.shift > -1e-9 && s.right + s.shift < d.holonomy.x + 1e-9);
            }
        }
    }
}

#[test]
fn strip_count_depends_only_on_the_stratum() {
    let mut ms = Vec::new();
    for (lambda, angle) in SURFACES {
        let m = slit_mesh(lambda, angle);
        for c in shortest_connections(&m, 5) {
            ms.push(decompose_strips(&m, &c).unwrap().m);
        }
    }
    // genus 2, two cone points: 2g - 1 + n
    assert!(ms.iter().all(|&m| m == 5), "{ms:?}");
}

#[test]
fn buffered_square_is_a_buffer() {
    for (lambda, angle) in SURFACES {
        let m = slit_mesh(lambda, angle);
        let c = &shortest_connections(&m, 1)[0];
        let d = decompose_strips(&m, c).unwrap();
        let b = buffered_square_from_strip(&m, &d).unwrap();
        assert!(b.alpha >= 1.0 / d.m as f64, "{}", b.alpha);
        assert!(b.overlap <= 1, "λ={lambda}: overlap {}", b.overlap);
        assert!((b.square.side - d.strips[b.strip].transverse_width.min(b.buffer.height())).abs() < 1e-12);
    }
}

#[test]
fn golden_widths_do_not_decay() {
    let s = build_slit_torus(0.5).unwrap();
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let times: Vec<f64> = (0..=58).map(|i| 1.0 + 0.5 * i as f64).collect();
    let r = strip_width_bound_check(&s.surface, Vec2::new(1.0, g), 0.5, &times).unwrap();
    assert!(r.rows.iter().all(|r| r.m == 5));
    assert!(r.delta_fit <= 0.5, "{}", r.delta_fit);
    // bounded type: the narrowest strip stays at a fixed scale, below t^-1/2
    // on this range
    let w: Vec<f64> = r.rows.iter().map(|r| r.min_width).collect();
    let (lo, hi) = w.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(lo > 0.02 && hi < 0.05, "{lo} {hi}");
    assert!(r.kappa < 1.0);
}

#[test]
fn rational_direction_is_not_minimal() {
    let s = build_slit_torus(0.5).unwrap();
    let r = strip_width_bound_check(&s.surface, Vec2::new(1.0, 2.0), 0.5, &[1.0, 2.0, 4.0]);
    assert!(matches!(r, Err(flatline::Error::VerticalSaddleConnection { .. })), "{r:?}");
}

#[test]
fn time_sequence_at_scale() {
    let clock = Instant::now();
    let s = time_sequence(1.0, 10.0, 100_000).unwrap();
    assert!(s.max_residual < 1e-10, "{}", s.max_residual);
    assert_eq!(s.growth_bounded, Some(true));
    assert!(s.doubling_ok);
    assert!(clock.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn independent_events_calibrate() {
    let r = independent_masks(50, 0.5, &PzOptions::default()).unwrap();
    assert!((0.95..=1.05).contains(&r.k_hat), "{}", r.k_hat);
    let r = nested_masks(50, 0.3, &PzOptions::default()).unwrap();
    assert!((r.k_hat * 0.3 - 1.0).abs() < 0.05, "{}", r.k_hat);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn area_partition(lambda in 0.05f64..0.95, angle in 0.05f64..1.5) {
        let m = slit_mesh(lambda, angle);
        let c = &shortest_connections(&m, 1)[0];
        let d = decompose_strips(&m, c).unwrap();
        // near-periodic directions have very tall strips and lose digits
        // along the rays
        prop_assume!(d.strips.iter().all(|s| s.height < 100.0));
        prop_assert!((d.total_area - 2.0).abs() < 1e-9);
        prop_assert_eq!(d.m, 5);
    }
}
