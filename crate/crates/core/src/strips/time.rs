//! The times t_{n+1} = t_n + ε log t_{n+1}.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct TimeSequence {
    pub eps: f64,
    pub t0: f64,
    /// t_0, t_1, ..., t_n.
    pub times: Vec<f64>,
    /// Largest `|t_{n+1} - t_n - ε log t_{n+1}|`.
    pub max_residual: f64,
    /// Largest `t_k / (k log k log log k)` over `16 <= k <= n`.
    pub growth_max: f64,
    /// Whether the ratio above stays below its early maximum over the second
    /// half of the range. `None` when `n < 32`.
    pub growth_bounded: Option<bool>,
    /// Whether `t_{k+1} < 2 t_k` throughout.
    pub doubling_ok: bool,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Solves each step by Newton's method on the increment. The times are
/// carried as unevaluated sums of two doubles so that the residual is
/// not limited by the spacing of doubles near t_n.
pub fn time_sequence(eps: f64, t0: f64, n: usize) -> Result<TimeSequence> {
    if !(eps >= 0.0) || !(t0 > eps) || !t0.is_finite() || !(t0 > 1.0) {
        return Err(Error::Usage("need eps >= 0 and t0 > max(eps, 1)".into()));
    }
    let (mut hi, mut lo) = (t0, 0.0);
    let mut times = Vec::with_capacity(n + 1);
    times.push(t0);
    let mut max_residual: f64 = 0.0;
    let mut doubling_ok = true;
    let mut d = eps * t0.ln();
    for _ in 0..n {
        let t = hi + lo;
        for _ in 0..100 {
            let x = t + d;
            let step = (d - eps * x.ln()) / (1.0 - eps / x);
            d -= step;
            if step.abs() <= 1e-17 * d.abs().max(1e-300) {
                break;
            }
        }
        let (s, e) = two_sum(hi, d);
        let (nhi, nlo) = two_sum(s, e + lo);
        let next = nhi + nlo;
        max_residual = max_residual.max((d - eps * next.ln()).abs());
        doubling_ok &= next < 2.0 * t;
        hi = nhi;
        lo = nlo;
        times.push(next);
    }
    let ratio = |k: usize| {
        let k = k as f64;
        times[k as usize] / (k * k.ln() * k.ln().ln())
    };
    let growth_max = (16..=n).map(ratio).fold(0.0, f64::max);
    let growth_bounded = (n >= 32).then(|| {
        let early = (16..=n / 2).map(ratio).fold(0.0, f64::max);
        (n / 2 + 1..=n).map(ratio).all(|r| r <= early)
    });
    Ok(TimeSequence { eps, t0, times, max_residual, growth_max, growth_bounded, doubling_ok })
}
