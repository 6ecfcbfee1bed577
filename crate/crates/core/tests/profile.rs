use flatline::connections::profile::{flowed_length, BreakKind};
use flatline::connections::{diophantine_check, divergence_profile, minimum_time};
use flatline::kernel::square_torus;
use flatline::slit::build_slit_torus;
use flatline::{Mat2, Norm, Vec2};

fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Vectors of W ∪ Z (slit torus with slit λ) near the line of slope `s`
/// with |h|·|v| ≤ `c` after rotating that line to vertical, up to `x_max`.
/// Any vector of sup length ≤ √c at some flow time is among them.
fn lattice_candidates(lambda: f64, s: f64, c: f64, x_max: i64) -> Vec<Vec2> {
    let rot = Mat2::rotate_to_vertical(Vec2::new(1.0, s));
    let mut out = Vec::new();
    for m in -x_max..=x_max {
        for x in [m as f64, lambda + m as f64] {
            let y0 = (s * x).round() as i64;
            for n in y0 - 3..=y0 + 3 {
                let v = rot.apply(Vec2::new(x, n as f64));
                if v.norm() > 1e-12 && v.x.abs() * v.y.abs() <= c {
                    out.push(v);
                }
            }
        }
    }
    out
}

#[test]
fn minimum_time_closed_form() {
    let (t, l) = minimum_time(Vec2::new(0.1, 10.0), Norm::Sup);
    assert!((t - 4.605170185988091).abs() < 1e-12);
    assert!((l - 1.0).abs() < 1e-12);
}

#[test]
fn golden_slit_torus_profile() {
    let s = build_slit_torus(0.5).unwrap();
    let dir = Vec2::new(1.0, golden());
    let p = divergence_profile(&s.surface, dir, 0.0, 20.0, 0.01, Norm::Sup).unwrap();
    assert!(p.max_slope_deviation() < 1e-6, "slope deviation {}", p.max_slope_deviation());
    assert!(p.minima().count() > 5);
    for b in &p.breakpoints {
        assert!(b.residual < 1e-9, "{b:?}");
    }
    // every realizer is a vector of W ∪ Z, so ℓ₁ is at least the lattice minimum
    let lmax = p.l1.iter().cloned().fold(0.0, f64::max);
    // for t ≥ 0 a competitor has |h| ≤ ℓmax, so |y - s x| ≤ ℓmax √(1+s²) < 3
    assert!(lmax * (1.0 + golden() * golden()).sqrt() < 3.0);
    // sup-norm vectors up to e^{10}·ℓmax in the rotated frame have |x| below this
    let lat = lattice_candidates(0.5, golden(), 1.01 * lmax * lmax, (1.5 * 10f64.exp() * lmax) as i64);
    let mut lower_d: f64 = 0.0;
    for (i, &t) in p.times.iter().enumerate() {
        let m = lat.iter().map(|&v| flowed_length(v, t, Norm::Sup)).fold(f64::INFINITY, f64::min);
        assert!(p.l1[i] >= m - 1e-9, "t={t}");
        lower_d = lower_d.max(-2.0 * m.ln());
    }
    // bounded partial quotients: d stays below the lattice bound, so d/log t is bounded
    let dmax = p.d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(dmax <= lower_d + 1e-9);
    let late = p.times.iter().zip(&p.d).filter(|(t, _)| **t >= 10.0).map(|(_, d)| *d).fold(f64::NEG_INFINITY, f64::max);
    assert!(late / 20f64.ln() < lower_d / 2f64.ln() + 1e-9);
}

#[test]
fn profile_realizers_meet_breakpoint_equation() {
    let s = build_slit_torus(2f64.sqrt() - 1.0).unwrap();
    let p = divergence_profile(&s.surface, Vec2::new(0.3, 1.0), 0.0, 8.0, 0.02, Norm::Sup).unwrap();
    for b in p.breakpoints.iter().filter(|b| b.kind == BreakKind::Minimum) {
        let lhs = (b.t / 2.0).exp() * b.holonomy.x.abs();
        let rhs = (-b.t / 2.0).exp() * b.holonomy.y.abs();
        assert!((lhs - rhs).abs() < 1e-9);
    }
    let csv = p.to_csv();
    assert!(csv.starts_with("t,l1,d,realizer_h,realizer_v\n"));
    assert_eq!(csv.lines().count(), p.times.len() + 1);
}

#[test]
fn golden_torus_diophantine_constant_is_stable() {
    let t = square_torus();
    let dir = Vec2::new(1.0, golden());
    let a = diophantine_check(&t, dir, 1.0, 100.0, 1.0).unwrap();
    let b = diophantine_check(&t, dir, 1.0, 1000.0, 1.0).unwrap();
    assert!(a.violations.is_empty());
    assert!(a.c_best > 0.0 && b.c_best > 0.0);
    assert!((a.c_best - b.c_best).abs() <= 1e-12 * a.c_best, "{} {}", a.c_best, b.c_best);
    // oracle: h v ≥ 1/√5 - o(1) for convergents of the golden ratio
    let v = b.minimizer.unwrap();
    assert!(v.x.abs() * v.y.abs() > 0.4);
    // consistency with the profile: ℓ₁(X_t) t^{ε/2} stays bounded below
    let p = divergence_profile(&t, dir, 1.0, 12.0, 0.05, Norm::Sup).unwrap();
    let worst = p.times.iter().zip(&p.l1).map(|(t, l)| l * t.sqrt()).fold(f64::INFINITY, f64::min);
    assert!(worst > 0.3);
}

#[test]
fn rational_slope_violates() {
    let r = diophantine_check(&square_torus(), Vec2::new(2.0, 3.0), 1.0, 50.0, 1.0).unwrap();
    assert_eq!(r.c_best, 0.0);
    assert_eq!(r.violations.len(), 1);
}
