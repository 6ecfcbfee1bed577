use flatline::connections::{enumerate_connections, l1, l2, l3, SaddleConnection};
use flatline::kernel::square_torus;
use flatline::slit::{build_slit_torus, SlitTorus};
use flatline::{Error, Norm, Vec2};
use std::collections::BTreeMap;

type Key = (&'static str, i64, i64);

/// Segment from base point `p` (x coordinate on the horizontal axis of the
/// torus) with holonomy `w` passes through a branch point in its interior.
fn blocked(lambda: f64, px: f64, w: Vec2) -> bool {
    let n = w.y.round() as i64;
    for zx in [0.0, lambda] {
        if n != 0 {
            for k in 1..n.abs() {
                let s = k as f64 / n.abs() as f64;
                let x = px + s * w.x - zx;
                if (x - x.round()).abs() < 1e-9 {
                    return true;
                }
            }
        } else {
            let (lo, hi) = if w.x > 0.0 { (px, px + w.x) } else { (px + w.x, px) };
            let mut j = (lo - zx).floor() as i64 - 1;
            while zx + (j as f64) < hi + 1.0 {
                let x = zx + j as f64;
                if x > lo + 1e-9 && x < hi - 1e-9 {
                    return true;
                }
                j += 1;
            }
        }
    }
    false
}

/// Brute force over W and Z: saddle connections of the double cover with
/// their multiplicities.
fn oracle(lambda: f64, bound: f64, norm: Norm) -> BTreeMap<Key, usize> {
    let mut out = BTreeMap::new();
    let r = bound.ceil() as i64 + 2;
    for m in -r..=r {
        for n in -r..=r {
            // loops based at each branch point
            let z = Vec2::new(m as f64, n as f64);
            if (m, n) != (0, 0) && z.is_positive() && norm.length(z) <= bound + 1e-12 {
                for px in [0.0, lambda] {
                    if !blocked(lambda, px, z) {
                        *out.entry(("loop", m, n)).or_insert(0) += 2;
                    }
                }
            }
            // slits from z0 to z1
            let w = Vec2::new(lambda + m as f64, n as f64);
            if norm.length(w) <= bound + 1e-12 && !blocked(lambda, 0.0, w) {
                *out.entry(("slit", m, n)).or_insert(0) += 2;
            }
        }
    }
    out
}

fn classify(s: &SlitTorus, c: &SaddleConnection) -> Key {
    let v = c.holonomy;
    if c.start == c.end {
        return ("loop", v.x.round() as i64, v.y.round() as i64);
    }
    let w = if c.start == s.z0 { v } else { -v };
    let m = (w.x - s.lambda).round();
    assert!((w.x - s.lambda - m).abs() < 1e-9 && (w.y - w.y.round()).abs() < 1e-9, "not in W: {w:?}");
    ("slit", m as i64, w.y.round() as i64)
}

fn kernel(s: &SlitTorus, bound: f64, norm: Norm) -> BTreeMap<Key, usize> {
    let mut out = BTreeMap::new();
    for c in enumerate_connections(s.surface.mesh(), bound, norm).unwrap() {
        *out.entry(classify(s, &c)).or_insert(0) += 1;
    }
    out
}

#[test]
fn slit_torus_holonomies_match_lattice() {
    for lambda in [0.3, 0.5, 2f64.sqrt() - 1.0, 0.77] {
        let s = build_slit_torus(lambda).unwrap();
        for norm in [Norm::Euclid, Norm::Sup] {
            assert_eq!(kernel(&s, 2.0, norm), oracle(lambda, 2.0, norm), "lambda {lambda} {norm:?}");
        }
    }
}

#[test]
fn slit_torus_short_connections() {
    let s = build_slit_torus(0.3).unwrap();
    let c = enumerate_connections(s.surface.mesh(), 0.9, Norm::Euclid).unwrap();
    let k: Vec<Key> = c.iter().map(|c| classify(&s, c)).collect();
    assert_eq!(k, vec![("slit", 0, 0), ("slit", 0, 0), ("slit", -1, 0), ("slit", -1, 0)]);
    assert!((l1(s.surface.mesh(), Norm::Euclid).unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn lengths_on_flat_torus() {
    let t = square_torus();
    let r = l2(&t, Norm::Euclid, 1.5).unwrap();
    assert!(r.exact);
    assert!((r.value - 1.0).abs() < 1e-12);
    assert_eq!(l3(&t, Norm::Euclid, 2.0, 3).unwrap_err(), Error::GenusTooSmall { genus: 1 });
    let low = l2(&t, Norm::Euclid, 0.5).unwrap();
    assert!(!low.exact);
    assert_eq!(low.value, 0.5);
}

#[test]
fn lengths_on_slit_torus() {
    let s = build_slit_torus(0.3).unwrap();
    let a = l1(s.surface.mesh(), Norm::Euclid).unwrap();
    let b = l2(&s.surface, Norm::Euclid, 1.0).unwrap();
    let c = l3(&s.surface, Norm::Euclid, 1.0, 4).unwrap();
    assert!(b.exact && c.exact);
    assert!((b.value - 0.6).abs() < 1e-12, "{}", b.value);
    assert!((c.value - 0.6).abs() < 1e-12, "{}", c.value);
    assert_eq!(c.witness.len(), 2);
    assert!(a <= b.value + 1e-12 && b.value <= c.value + 1e-12);
}

#[test]
fn separating_pairs_on_slit_torus() {
    // for a generic slit the only separating systems of two slits are pairs
    // of lifts of an even slit
    let s = build_slit_torus(0.37).unwrap();
    let c = l3(&s.surface, Norm::Euclid, 2.5, 2).unwrap();
    assert!(c.exact);
    for w in &c.witness {
        let (kind, m, n) = classify(&s, w);
        assert_eq!(kind, "slit");
        assert!(m % 2 == 0 && n % 2 == 0);
    }
}

#[test]
fn flow_equivariance_of_enumeration() {
    let s = build_slit_torus(0.41).unwrap();
    let t = 1.3;
    let flowed = s.surface.apply_flow(t);
    let base = enumerate_connections(s.surface.mesh(), 3.0, Norm::Euclid).unwrap();
    let (a, b) = ((t / 2.0).exp(), (-t / 2.0).exp());
    // every flowed connection of length <= 1.5 comes from one of length <= 1.5/b
    let f = enumerate_connections(flowed.mesh(), 1.5, Norm::Euclid).unwrap();
    let mut want: Vec<(i64, i64)> = base
        .iter()
        .map(|c| Vec2::new(c.holonomy.x * a, c.holonomy.y * b))
        .filter(|v| v.norm() <= 1.5)
        .map(|v| ((v.x * 1e8).round() as i64, (v.y * 1e8).round() as i64))
        .collect();
    let mut got: Vec<(i64, i64)> =
        f.iter().map(|c| ((c.holonomy.x * 1e8).round() as i64, (c.holonomy.y * 1e8).round() as i64)).collect();
    want.sort();
    got.sort();
    assert_eq!(got, want);
}

#[test]
fn slit_pairs_separate_exactly_when_even() {
    use flatline::connections::Drawing;
    for lambda in [0.37, 2f64.sqrt() - 1.0] {
        let s = build_slit_torus(lambda).unwrap();
        let all = enumerate_connections(s.surface.mesh(), 3.0, Norm::Euclid).unwrap();
        let mut by_key: BTreeMap<Key, Vec<&SaddleConnection>> = BTreeMap::new();
        for c in &all {
            by_key.entry(classify(&s, c)).or_default().push(c);
        }
        let mut seen = 0;
        for ((kind, m, n), pair) in by_key {
            if kind != "slit" {
                continue;
            }
            assert_eq!(pair.len(), 2);
            let d = Drawing::new(s.surface.mesh(), &pair);
            assert!(d.is_disjoint());
            let even = m % 2 == 0 && n % 2 == 0;
            assert_eq!(d.is_separating_system(), even, "slit ({m},{n})");
            let chi = d.component_euler_characteristics();
            if even {
                assert_eq!(chi, vec![-1, -1]);
            } else {
                assert_eq!(chi, vec![-2]);
            }
            seen += 1;
        }
        assert!(seen > 10);
    }
}
