//! Slits and loops realizing the local minima of ℓ₁(X_t) in the sup norm,
//! found by exact lattice enumeration in integer arithmetic.
//!
//! A direction is given by its slope `s`, i.e. the vector `(1, s)`. For a
//! vector `(x, y)` put `H = y - s x` and `V = x + s y`; these are the
//! horizontal and vertical components after rotating the direction to
//! vertical, up to the common factor `√(1+s²)`. A vector realizes a local
//! minimum of ℓ₁ exactly when no other vector has both smaller `|H|` and
//! smaller `|V|`, and it does so at `t = log(|V|/|H|)`.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::numbers::{small_rational_big, to_f64};
use crate::slit::model::RATIONAL_DENOMINATOR_BOUND;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::collections::HashMap;
use std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Slit,
    Loop,
}

fn big_str<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn big_vec_str<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_string()))
}

/// A slit `(λ+m, n)` or a loop `(m, n)`. Loops are oriented so that their
/// component along the direction is positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyClass {
    pub kind: Kind,
    #[serde(serialize_with = "big_str")]
    pub m: BigInt,
    #[serde(serialize_with = "big_str")]
    pub n: BigInt,
    /// Slits with `m` and `n` both even.
    pub separating: bool,
    pub vector: Vec2,
}

impl HolonomyClass {
    pub fn is_slit(&self) -> bool {
        self.kind == Kind::Slit
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceEntry {
    /// Time of the minimum; infinite for a vertical vector.
    pub t: f64,
    pub class: HolonomyClass,
    /// `|H|` and `|V|` normalized by `√(1+s²)`.
    pub h: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// Separating slits and loops alternate.
    Alternating,
    ConsecutiveSlits,
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionAnalysis {
    pub lambda: f64,
    pub slope: f64,
    pub lambda_rational: bool,
    pub slope_rational: bool,
    pub sequence: Vec<SequenceEntry>,
    pub pattern: Pattern,
    /// Area exchanges `|v_j × w_j|` along the final alternating run.
    pub deltas: Vec<f64>,
    /// Index in `sequence` of the first slit of that run.
    pub run_start: usize,
    /// Coefficients with `w_{j+1} - w_j = 2 b_{j+1} v_j` along that run.
    #[serde(serialize_with = "big_vec_str")]
    pub b: Vec<BigInt>,
    pub partial_sums: Vec<f64>,
    pub consecutive_slit_pairs: usize,
    /// Index of the first slit-slit pair in the second half of the sequence.
    pub late_consecutive_slits: bool,
    pub loop_loop_pairs: usize,
    /// The sequence ended with a vertical vector (rational slope).
    pub terminated: bool,
    /// Entry count after which the input precision no longer determines
    /// the sequence.
    pub precision_exhausted: Option<usize>,
    /// Requested number of entries.
    pub cutoff: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Ue,
    UeEvidence,
    NonergodicEvidence,
    /// Rational slope: every leaf is closed or a saddle connection.
    Periodic,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub rule: String,
    /// Extrapolated remainder of Σδ over the partial sum.
    pub tail_ratio: Option<f64>,
    /// Geometric decay rate of the δ's over the second half.
    pub decay_rate: Option<f64>,
    pub cutoff: usize,
    pub entries: usize,
}

/// Tail ratio below which δ counts as summable.
pub const SUMMABLE_TAIL: f64 = 1e-3;
/// Tail ratio above which δ counts as divergent.
pub const DIVERGENT_TAIL: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct SequenceOptions {
    /// Number of minima to compute.
    pub entries: usize,
    /// Minima before this time are not reported.
    pub t_min: f64,
    /// Decimal digits to which λ is known, `None` if exact.
    pub digits: Option<u32>,
    /// Decimal digits to which the slope is known, `None` if exact.
    pub slope_digits: Option<u32>,
    pub max_windows: usize,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions { entries: 40, t_min: 0.0, digits: None, slope_digits: None, max_windows: 50_000 }
    }
}

/// Exact data over a common denominator `D`: `λ = l/D`, `s = sl/D`.
struct Frame {
    d: BigInt,
    d2: BigInt,
    l: BigInt,
    sl: BigInt,
    lambda: BigRational,
    slope: BigRational,
    norm: f64,
}

/// `a ≈ m · 2^e` with `|m| < 2^60`.
fn split(a: &BigInt) -> (f64, i64) {
    let bits = a.bits() as i64;
    let sh = bits - 60;
    let m = if sh > 0 { a >> (sh as usize) } else { a << ((-sh) as usize) };
    (m.to_f64().unwrap_or(0.0), sh)
}

/// `a / b · 2^e` in floating point without overflow in the intermediates.
fn ratio(a: &BigInt, b: &BigInt, e: i64) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let (ma, ea) = split(a);
    let (mb, eb) = split(b);
    let ex = (ea - eb + e).clamp(-2000, 2000) as i32;
    ma / mb * 2f64.powi(ex)
}

fn log_ratio(a: &BigInt, b: &BigInt) -> f64 {
    let (ma, ea) = split(a);
    let (mb, eb) = split(b);
    (ma.abs() / mb.abs()).ln() + (ea - eb) as f64 * LN_2
}

impl Frame {
    fn new(lambda: &BigRational, slope: &BigRational) -> Frame {
        let d = lambda.denom().lcm(slope.denom());
        let l = lambda.numer() * (&d / lambda.denom());
        let sl = slope.numer() * (&d / slope.denom());
        let s = to_f64(slope);
        Frame { d2: &d * &d, d, l, sl, lambda: lambda.clone(), slope: slope.clone(), norm: (1.0 + s * s).sqrt() }
    }

    /// `(x, y)·D`.
    fn xy(&self, kind: Kind, m: &BigInt, n: &BigInt) -> (BigInt, BigInt) {
        match kind {
            Kind::Loop => (m * &self.d, n * &self.d),
            Kind::Slit => (&self.l + m * &self.d, n * &self.d),
        }
    }

    /// `(H, V)·D²`.
    fn hv(&self, kind: Kind, m: &BigInt, n: &BigInt) -> (BigInt, BigInt) {
        let (x, y) = self.xy(kind, m, n);
        (&y * &self.d - &self.sl * &x, &x * &self.d + &self.sl * &y)
    }

    /// Flowed `(H, V)` of a loop at window `k` (time `2k log 2`) as floats.
    fn fvec(&self, m: &BigInt, n: &BigInt, k: i64) -> [f64; 2] {
        let (h, v) = self.hv(Kind::Loop, m, n);
        [ratio(&h, &self.d2, k), ratio(&v, &self.d2, -k)]
    }

    fn class(&self, kind: Kind, m: BigInt, n: BigInt) -> HolonomyClass {
        let x = match kind {
            Kind::Loop => to_f64(&BigRational::from_integer(m.clone())),
            Kind::Slit => to_f64(&(&self.lambda + BigRational::from_integer(m.clone()))),
        };
        let y = n.to_f64().unwrap_or(f64::NAN);
        let separating = kind == Kind::Slit && m.is_even() && n.is_even();
        HolonomyClass { kind, m, n, separating, vector: Vec2::new(x, y) }
    }

    /// Smallest nonzero `|H|·D²` over loops and slits.
    fn h_floor(&self) -> BigInt {
        let g = self.d.gcd(&self.sl);
        let step = &self.d * &g;
        let r = (&self.sl * &self.l).mod_floor(&step);
        if r.is_zero() {
            step
        } else {
            let other = &step - &r;
            step.clone().min(r).min(other)
        }
    }
}

#[derive(Clone)]
struct Cand {
    kind: Kind,
    m: BigInt,
    n: BigInt,
    h: BigInt,
    v: BigInt,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Gauss reduction of an integer basis for the flowed form at window `k`.
fn reduce(f: &Frame, b: &mut [(BigInt, BigInt); 2], k: i64) -> [[f64; 2]; 2] {
    for _ in 0..10_000 {
        let e1 = f.fvec(&b[0].0, &b[0].1, k);
        let e2 = f.fvec(&b[1].0, &b[1].1, k);
        if dot(e1, e1) > dot(e2, e2) {
            b.swap(0, 1);
            continue;
        }
        let mu = dot(e1, e2) / dot(e1, e1);
        let r = mu.round();
        if r == 0.0 || !r.is_finite() {
            return [e1, e2];
        }
        let rb = BigInt::from(r as i128);
        let (m0, n0) = (b[0].0.clone(), b[0].1.clone());
        b[1].0 -= &rb * m0;
        b[1].1 -= &rb * n0;
    }
    [f.fvec(&b[0].0, &b[0].1, k), f.fvec(&b[1].0, &b[1].1, k)]
}

/// Integer floor and fractional part of `num / D`.
fn floor_frac(num: &BigInt, d: &BigInt) -> (BigInt, f64) {
    let (q, r) = num.div_mod_floor(d);
    (q, ratio(&r, d, 0))
}

/// All loops and slits whose flowed vector at window `k` lies in the disk
/// of radius `rad` (with a margin), keyed by kind and coordinates.
fn window(f: &Frame, b: &mut [(BigInt, BigInt); 2], k: i64, rad: f64, out: &mut HashMap<(Kind, BigInt, BigInt), Cand>) {
    let [e1, e2] = reduce(f, b, k);
    let l1 = dot(e1, e1).sqrt();
    // a minimum within log 2 of this window is shortest at its own time,
    // so here it is at most twice as long as e1 in each component
    let rad = rad.min(3.0 * l1);
    let area = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
    let h2 = area / l1;
    let det = &b[0].0 * &b[1].1 - &b[0].1 * &b[1].0;
    // (λ, 0) = α b1 + β b2
    let (ai, af) = floor_frac(&(&f.l * &b[1].1 * &det), &f.d);
    let (bi, bf) = floor_frac(&(-(&f.l * &b[0].1 * &det)), &f.d);
    let zero = BigInt::zero();
    for (kind, oa, oc, ia, ic) in [(Kind::Loop, 0.0, 0.0, &zero, &zero), (Kind::Slit, af, bf, &ai, &bi)] {
        let cmax = rad / h2 + 2.0;
        let c_lo = (-cmax - oc).floor() as i64;
        let c_hi = (cmax - oc).ceil() as i64;
        for c in c_lo..=c_hi {
            let cr = oc + c as f64;
            let center = -cr * dot(e1, e2) / (l1 * l1);
            let half = rad / l1 + 1.0;
            let a_lo = (center - half - oa).floor() as i64 - 1;
            let a_hi = (center + half - oa).ceil() as i64 + 1;
            for a in a_lo..=a_hi {
                let ca = BigInt::from(a) - ia;
                let cc = BigInt::from(c) - ic;
                let mut m = &ca * &b[0].0 + &cc * &b[1].0;
                let mut n = &ca * &b[0].1 + &cc * &b[1].1;
                if kind == Kind::Loop && m.is_zero() && n.is_zero() {
                    continue;
                }
                let (mut h, mut v) = f.hv(kind, &m, &n);
                if kind == Kind::Loop && (v.is_negative() || (v.is_zero() && h.is_negative())) {
                    m = -m;
                    n = -n;
                    h = -h;
                    v = -v;
                }
                let key = (kind, m.clone(), n.clone());
                out.entry(key).or_insert_with(|| Cand { kind, m, n, h: h.abs(), v: v.abs() });
            }
        }
    }
}

/// Relative minima of `(|H|, |V|)` in order of increasing `|V|`.
fn sweep(cands: &HashMap<(Kind, BigInt, BigInt), Cand>) -> Vec<Cand> {
    let mut all: Vec<&Cand> = cands.values().collect();
    all.sort_by(|x, y| x.v.cmp(&y.v).then(x.h.cmp(&y.h)).then(x.kind.cmp(&y.kind)).then(x.m.cmp(&y.m)).then(x.n.cmp(&y.n)));
    let mut out = Vec::new();
    let mut min_h: Option<BigInt> = None;
    for c in all {
        if c.v.is_zero() {
            continue;
        }
        if min_h.as_ref().is_none_or(|mh| &c.h < mh) {
            min_h = Some(c.h.clone());
            out.push(c.clone());
            if c.h.is_zero() {
                break;
            }
        }
    }
    out
}

fn is_rational(x: &BigRational) -> bool {
    small_rational_big(x, RATIONAL_DENOMINATOR_BOUND).is_some()
}

/// The sequence of slits and loops realizing the local minima of ℓ₁ for
/// the direction of slope `slope` on the slit torus with slit `lambda`.
pub fn shortest_sequence(lambda: &BigRational, slope: &BigRational, opts: &SequenceOptions) -> Result<DirectionAnalysis> {
    if !(lambda.is_positive() && lambda < &BigRational::one()) {
        return Err(Error::OutOfRange(format!("slit length {} not in (0, 1)", to_f64(lambda))));
    }
    let f = Frame::new(lambda, slope);
    let s = to_f64(slope);
    // windows at t = 2k log 2 cover every minimum within log 2 of one of
    // them; the shortest vector then has sup length ≤ √2 √(1+s²)
    let rad = (2.0 * (1.0 + s * s).sqrt() + 0.5) * std::f64::consts::SQRT_2;
    let k0 = ((opts.t_min - LN_2) / (2.0 * LN_2)).floor() as i64;
    let mut basis = [(BigInt::one(), BigInt::zero()), (BigInt::zero(), BigInt::one())];
    let mut cands = HashMap::new();
    let mut final_seq: Vec<Cand> = Vec::new();
    let mut vertical_bound: Option<f64> = None;
    let mut terminated = false;
    let mut k = k0;
    for w in 0..opts.max_windows {
        window(&f, &mut basis, k, rad, &mut cands);
        let covered = 2.0 * k as f64 * LN_2 + LN_2;
        let check = w % 8 == 7 || w + 1 == opts.max_windows;
        if check {
            let seq = sweep(&cands);
            if vertical_bound.is_none() {
                if let Some(z) = seq.iter().find(|c| c.h.is_zero()) {
                    vertical_bound = Some(log_ratio(&z.v, &f.h_floor()));
                }
            }
            let done: Vec<Cand> = seq
                .into_iter()
                .filter(|c| {
                    let t = if c.h.is_zero() { f64::INFINITY } else { log_ratio(&c.v, &c.h) };
                    t >= opts.t_min && (t <= covered || (c.h.is_zero() && vertical_bound.is_some_and(|b| covered >= b)))
                })
                .collect();
            let finished_vertical = vertical_bound.is_some_and(|b| covered >= b);
            if done.len() >= opts.entries || finished_vertical {
                terminated = finished_vertical && done.len() <= opts.entries && done.last().is_some_and(|c| c.h.is_zero());
                final_seq = done;
                break;
            }
            final_seq = done;
        }
        k += 1;
    }
    final_seq.truncate(opts.entries);
    if !final_seq.last().is_some_and(|c| c.h.is_zero()) {
        terminated = false;
    }
    // input precision: an error ε in λ moves H of a slit by |s| ε, an error
    // ε in the slope moves H of any vector by |x| ε
    let tenth = |d: Option<u32>| d.map_or(0.0, |d| 10f64.powi(-(d as i32)));
    let (el, es) = (tenth(opts.digits), tenth(opts.slope_digits));
    let mut precision_exhausted = None;
    let mut sequence = Vec::with_capacity(final_seq.len());
    for (i, c) in final_seq.into_iter().enumerate() {
        let t = if c.h.is_zero() { f64::INFINITY } else { log_ratio(&c.v, &c.h) };
        let h = ratio(&c.h, &f.d2, 0) / f.norm;
        let v = ratio(&c.v, &f.d2, 0) / f.norm;
        let unc = if c.kind == Kind::Slit { s.abs() * el } else { 0.0 } + v.abs().max(1.0) * es;
        if precision_exhausted.is_none() && h > 0.0 && unc > 1e-6 * h {
            precision_exhausted = Some(i);
        }
        if precision_exhausted.is_some() {
            break;
        }
        sequence.push(SequenceEntry { t, class: f.class(c.kind, c.m, c.n), h, v });
    }
    // the vertical vector of a truncated input is an artifact of the digits
    if precision_exhausted.is_some() {
        terminated = false;
    }
    Ok(build_analysis(&f, sequence, terminated, precision_exhausted, opts.entries))
}

fn cross_exact(f: &Frame, v: &HolonomyClass, w: &HolonomyClass) -> BigRational {
    let (vx, vy) = f.xy(v.kind, &v.m, &v.n);
    let (wx, wy) = f.xy(w.kind, &w.m, &w.n);
    BigRational::new(vx * wy - vy * wx, f.d2.clone())
}

/// `b` with `w' - w = 2 b v`, when it is a positive integer.
fn exchange_coefficient(w: &HolonomyClass, v: &HolonomyClass, w2: &HolonomyClass) -> Option<BigInt> {
    let dm = &w2.m - &w.m;
    let dn = &w2.n - &w.n;
    let two = BigInt::from(2);
    let b = if !v.m.is_zero() {
        let (q, r) = dm.div_rem(&(&two * &v.m));
        if !r.is_zero() {
            return None;
        }
        q
    } else {
        let (q, r) = dn.div_rem(&(&two * &v.n));
        if !r.is_zero() {
            return None;
        }
        q
    };
    (dm == &two * &b * &v.m && dn == &two * &b * &v.n && b.is_positive()).then_some(b)
}

fn build_analysis(
    f: &Frame,
    sequence: Vec<SequenceEntry>,
    terminated: bool,
    precision_exhausted: Option<usize>,
    cutoff: usize,
) -> DirectionAnalysis {
    let n = sequence.len();
    let kinds: Vec<Kind> = sequence.iter().map(|e| e.class.kind).collect();
    let mut consecutive = 0;
    let mut late = false;
    let mut loop_loop = 0;
    for i in 1..n {
        match (kinds[i - 1], kinds[i]) {
            (Kind::Slit, Kind::Slit) => {
                consecutive += 1;
                if i >= n / 2 {
                    late = true;
                }
            }
            (Kind::Loop, Kind::Loop) => loop_loop += 1,
            _ => {}
        }
    }
    // final alternating run of separating slits and loops; a terminal
    // vertical entry belongs to it only as the last slit
    let ok = |e: &SequenceEntry| e.class.kind == Kind::Loop || e.class.separating;
    let mut start = n;
    while start > 0 {
        let i = start - 1;
        if !ok(&sequence[i]) || (start < n && kinds[i] == kinds[start]) {
            break;
        }
        start -= 1;
    }
    while start < n && kinds[start] != Kind::Slit {
        start += 1;
    }
    let mut deltas = Vec::new();
    let mut b = Vec::new();
    let mut j = start;
    while j + 1 < n {
        let (w, v) = (&sequence[j].class, &sequence[j + 1].class);
        deltas.push(to_f64(&cross_exact(f, v, w).abs()));
        if j + 2 < n {
            match exchange_coefficient(w, v, &sequence[j + 2].class) {
                Some(c) => b.push(c),
                None => break,
            }
        }
        j += 2;
    }
    let partial_sums = deltas
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect();
    let alternating_all = n > 0 && start <= kinds.iter().position(|&k| k == Kind::Slit).unwrap_or(n) && consecutive == 0 && loop_loop == 0;
    let pattern = if consecutive > 0 {
        Pattern::ConsecutiveSlits
    } else if alternating_all {
        Pattern::Alternating
    } else {
        Pattern::Mixed
    };
    DirectionAnalysis {
        lambda: to_f64(&f.lambda),
        slope: to_f64(&f.slope),
        lambda_rational: is_rational(&f.lambda),
        slope_rational: is_rational(&f.slope),
        sequence,
        pattern,
        deltas,
        run_start: start,
        b,
        partial_sums,
        consecutive_slit_pairs: consecutive,
        late_consecutive_slits: late,
        loop_loop_pairs: loop_loop,
        terminated,
        precision_exhausted,
        cutoff,
    }
}

/// Geometric decay rate of the second half of `deltas`.
pub fn decay_rate(deltas: &[f64]) -> Option<f64> {
    if deltas.len() < 4 {
        return None;
    }
    let tail = &deltas[deltas.len() / 2..];
    let (a, b) = (tail[0], tail[tail.len() - 1]);
    if !(a > 0.0 && b > 0.0) {
        return None;
    }
    Some((b / a).powf(1.0 / (tail.len() - 1) as f64))
}

/// Remainder `Σ_{j>J} δ_j`, extrapolated geometrically from the second half,
/// over the partial sum `Σ_{j≤J} δ_j`. Infinite when the δ's do not decay.
pub fn tail_ratio(deltas: &[f64]) -> Option<f64> {
    let r = decay_rate(deltas)?;
    let total: f64 = deltas.iter().sum();
    if r >= 1.0 {
        return Some(f64::INFINITY);
    }
    Some(deltas[deltas.len() - 1] * r / (1.0 - r) / total)
}

/// Verdict from the exact rules for rational data, then the evidence rules
/// within the computed window.
pub fn classify(a: &DirectionAnalysis) -> Classification {
    let mk = |verdict, rule: &str, tail| Classification { verdict, rule: rule.into(), tail_ratio: tail, decay_rate: decay_rate(&a.deltas), cutoff: a.cutoff, entries: a.sequence.len() };
    if a.slope_rational || (a.terminated && a.lambda_rational) {
        return mk(Verdict::Periodic, "rational slope: periodic direction", None);
    }
    if a.lambda_rational {
        return mk(Verdict::Ue, "rational slit, irrational slope: square-tiled surface", None);
    }
    if a.sequence.len() < 4 {
        return mk(Verdict::Inconclusive, "too few minima", None);
    }
    if a.consecutive_slit_pairs >= 2 && a.late_consecutive_slits {
        return mk(Verdict::UeEvidence, "consecutive slits recur through the window", tail_ratio(&a.deltas));
    }
    let tail = tail_ratio(&a.deltas);
    match tail {
        Some(r) if r < SUMMABLE_TAIL => mk(Verdict::NonergodicEvidence, "alternating run with summable area exchanges", tail),
        Some(r) if r > DIVERGENT_TAIL => mk(Verdict::UeEvidence, "alternating run with divergent area exchanges", tail),
        _ => mk(Verdict::Inconclusive, "no trend within the window", tail),
    }
}

/// Planted nonergodic-candidate direction.
#[derive(Debug, Clone, Serialize)]
pub struct Plant {
    /// Slits `w_j` as `(m, n)`.
    pub w: Vec<(String, String)>,
    /// Loops `v_j`.
    pub v: Vec<(String, String)>,
    pub b: Vec<u64>,
    pub deltas: Vec<f64>,
    /// Slope of the last slit, exactly.
    #[serde(skip)]
    pub slope: BigRational,
    #[serde(rename = "slope")]
    pub slope_f64: f64,
    /// Time of the first minimum, `log(|V|/|H|)` of `w_1`.
    pub t_first: f64,
    #[serde(skip)]
    pub w_exact: Vec<(BigInt, BigInt)>,
    #[serde(skip)]
    pub v_exact: Vec<(BigInt, BigInt)>,
}

fn wvec(lambda: &BigRational, w: &(BigInt, BigInt)) -> (BigRational, BigRational) {
    (lambda + BigRational::from_integer(w.0.clone()), BigRational::from_integer(w.1.clone()))
}

fn cross_q(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> BigRational {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn loop_q(v: &(BigInt, BigInt)) -> (BigRational, BigRational) {
    (BigRational::from_integer(v.0.clone()), BigRational::from_integer(v.1.clone()))
}

/// Builds `w_{j+1} = w_j + 2 b_{j+1} v_j` from the separating seed slit
/// `w1` and the loop `(0, 1)`. Each new loop keeps the new slit on the same
/// side as the previous loop, and among those its area exchange is the
/// closest to `δ_j / b_{j+1}`. The direction is the slope of the last slit.
pub fn plant_direction(lambda: &BigRational, b: &[u64], w1: (i64, i64), digits: Option<u32>) -> Result<Plant> {
    if !(lambda.is_positive() && lambda < &BigRational::one()) {
        return Err(Error::OutOfRange(format!("slit length {} not in (0, 1)", to_f64(lambda))));
    }
    if w1.0 % 2 != 0 || w1.1 % 2 != 0 {
        return Err(Error::Usage("seed slit must be separating (even m and n)".into()));
    }
    if b.contains(&0) {
        return Err(Error::Usage("plant coefficients must be positive".into()));
    }
    let mut w = (BigInt::from(w1.0), BigInt::from(w1.1));
    let mut v = (BigInt::zero(), BigInt::one());
    let mut ws = vec![w.clone()];
    let mut vs = vec![v.clone()];
    let mut deltas = vec![to_f64(&cross_q(&loop_q(&v), &wvec(lambda, &w)).abs())];
    for (j, &bj) in b.iter().enumerate() {
        let two_b = BigInt::from(2u64) * BigInt::from(bj);
        w = (&w.0 + &two_b * &v.0, &w.1 + &two_b * &v.1);
        let wq = wvec(lambda, &w);
        let target = deltas.last().unwrap() / bj as f64;
        let reference = cross_q(&wq, &loop_q(&v));
        // unimodular partner u0 of v: cross(v, u0) = 1
        let eg = v.0.extended_gcd(&v.1);
        let u0 = (-eg.y.clone(), eg.x.clone());
        let c0 = cross_q(&loop_q(&u0), &wq);
        let dv = cross_q(&loop_q(&v), &wq);
        let kc = (-(c0 / dv)).round().to_integer();
        let mut best: Option<(f64, (BigInt, BigInt), f64)> = None;
        for dk in -6i64..=6 {
            let kk = &kc + BigInt::from(dk);
            let mut u = (&u0.0 + &kk * &v.0, &u0.1 + &kk * &v.1);
            if u.1.is_negative() {
                u = (-u.0, -u.1);
            }
            let side = cross_q(&wq, &loop_q(&u));
            if side.is_zero() || side.is_positive() != reference.is_positive() {
                continue;
            }
            let d = to_f64(&side.abs());
            let score = (d / target).ln().abs();
            if best.as_ref().is_none_or(|bb| score < bb.0) {
                best = Some((score, u, d));
            }
        }
        let (_, u, d) = best.ok_or_else(|| Error::HypothesisFailure("no admissible loop in plant".into()))?;
        // an error ε in λ moves each area exchange by about |v| ε
        if let Some(dg) = digits {
            let size = u.0.to_f64().unwrap_or(f64::INFINITY).hypot(u.1.to_f64().unwrap_or(f64::INFINITY));
            if size * 10f64.powi(-(dg as i32)) > 1e-6 * d {
                return Err(Error::PrecisionExhausted { reached: j });
            }
        }
        v = u;
        ws.push(w.clone());
        vs.push(v.clone());
        deltas.push(d);
    }
    let last = wvec(lambda, ws.last().unwrap());
    let slope = &last.1 / &last.0;
    let first = wvec(lambda, &ws[0]);
    // H = y - s x, V = x + s y for the seed
    let h = (&first.1 - &slope * &first.0).abs();
    let vv = (&first.0 + &slope * &first.1).abs();
    let t_first = (to_f64(&vv) / to_f64(&h)).ln();
    Ok(Plant {
        w: ws.iter().map(|p| (p.0.to_string(), p.1.to_string())).collect(),
        v: vs.iter().map(|p| (p.0.to_string(), p.1.to_string())).collect(),
        b: b.to_vec(),
        deltas,
        slope_f64: to_f64(&slope),
        slope,
        t_first,
        w_exact: ws,
        v_exact: vs,
    })
}
