use flatline::numbers::parse_real;
use flatline::slit::{classify, plant_direction, shortest_sequence, Kind, Plant, SequenceOptions, Verdict};
use num_bigint::BigInt;
use std::time::Instant;

fn round_trip(b: &[u64]) -> (Plant, flatline::slit::DirectionAnalysis) {
    let lambda = parse_real("sqrt(2)-1", 200).unwrap();
    let p = plant_direction(&lambda, b, (0, 0), Some(200)).unwrap();
    let opts = SequenceOptions { entries: 2 * b.len() + 4, t_min: p.t_first - 0.1, digits: Some(200), ..Default::default() };
    let a = shortest_sequence(&lambda, &p.slope, &opts).unwrap();
    (p, a)
}

/// Planted slits and loops appear in order from the seed on, and the
/// exchange coefficients come back exactly (the last level is not
/// determined by the direction).
fn check_recovery(p: &Plant, a: &flatline::slit::DirectionAnalysis, levels: usize) {
    let seq = &a.sequence;
    let start = seq
        .iter()
        .position(|e| e.class.kind == Kind::Slit && (e.class.m.clone(), e.class.n.clone()) == p.w_exact[0])
        .expect("seed slit in sequence");
    for j in 0..levels {
        let w = &seq[start + 2 * j].class;
        let v = &seq[start + 2 * j + 1].class;
        assert_eq!(w.kind, Kind::Slit);
        assert_eq!((w.m.clone(), w.n.clone()), p.w_exact[j], "slit {j}");
        assert_eq!(v.kind, Kind::Loop);
        assert_eq!((v.m.clone(), v.n.clone()), p.v_exact[j], "loop {j}");
    }
    for j in 0..levels - 1 {
        assert_eq!(a.b[j], BigInt::from(p.b[j]), "b_{}", j + 1);
    }
}

#[test]
fn planted_powers_of_two_round_trip() {
    let b: Vec<u64> = (1..=21).map(|j| 1u64 << j).collect();
    let t = Instant::now();
    let (p, a) = round_trip(&b);
    check_recovery(&p, &a, 20);
    let c = classify(&a);
    assert_eq!(c.verdict, Verdict::NonergodicEvidence, "{c:?}");
    assert!(c.tail_ratio.unwrap() < 1e-3);
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn planted_ones_round_trip() {
    let (_, a) = round_trip(&[1u64; 21]);
    let c = classify(&a);
    assert_eq!(c.verdict, Verdict::UeEvidence, "{c:?} {:?}", a.pattern);
}

#[test]
fn ones_plant_has_recurring_consecutive_slits() {
    let (_, a) = round_trip(&[1u64; 21]);
    assert!(a.consecutive_slit_pairs >= 2 && a.late_consecutive_slits);
    assert_eq!(a.loop_loop_pairs, 0);
}

#[test]
fn minima_match_the_divergence_profile() {
    use flatline::connections::divergence_profile;
    use flatline::slit::build_slit_torus;
    use flatline::{Norm, Vec2};
    let lambda = parse_real("sqrt(2)-1", 60).unwrap();
    let slope = parse_real("golden", 60).unwrap();
    let a = shortest_sequence(&lambda, &slope, &SequenceOptions { entries: 60, ..Default::default() }).unwrap();
    let want: Vec<f64> = a.sequence.iter().map(|e| e.t).filter(|&t| t > 0.05 && t < 11.95).collect();
    let s = build_slit_torus(2f64.sqrt() - 1.0).unwrap();
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let p = divergence_profile(&s.surface, Vec2::new(1.0, g), 0.0, 12.0, 0.01, Norm::Sup).unwrap();
    let got: Vec<f64> = p.minima().map(|b| b.t).filter(|&t| t > 0.05 && t < 11.95).collect();
    assert_eq!(got.len(), want.len(), "{got:?} {want:?}");
    for (x, y) in got.iter().zip(&want) {
        assert!((x - y).abs() < 1e-9, "{x} {y}");
    }
}

#[test]
fn birkhoff_clusters() {
    use flatline::numbers::to_f64;
    use flatline::slit::{birkhoff_experiment, build_slit_torus, BirkhoffOptions};
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let ue = birkhoff_experiment(&build_slit_torus(0.5).unwrap(), g, &BirkhoffOptions::default()).unwrap();
    assert_eq!(ue.clusters.len(), 1, "{ue:?}");
    assert!(ue.spread <= 0.05);
    // the mean matches the transverse length of the arc in the direction
    let expected = 0.5 / 2.0;
    assert!((ue.clusters[0].mean - expected).abs() < 0.01 * expected, "{}", ue.clusters[0].mean);

    let b: Vec<u64> = (1..=21).map(|j| 1u64 << j).collect();
    let lambda = parse_real("sqrt(2)-1", 200).unwrap();
    let p = plant_direction(&lambda, &b, (0, 0), None).unwrap();
    let st = build_slit_torus(to_f64(&lambda)).unwrap();
    let ne = birkhoff_experiment(&st, p.slope_f64, &BirkhoffOptions::default()).unwrap();
    assert_eq!(ne.clusters.len(), 2, "{ne:?}");
    assert!(ne.gap >= 0.2);
}
