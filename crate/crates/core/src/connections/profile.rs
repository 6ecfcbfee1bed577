//! The divergence profile d(t) = -2 log ℓ₁(X_t) along the Teichmüller flow,
//! and the Diophantine diagnostic on vertical and horizontal components.

use super::enumerate::{enumerate_connections, shortest, SaddleConnection};
use crate::delaunay::{flip_to_delaunay, DEFAULT_FLIP_BUDGET};
use crate::error::{Error, Result};
use crate::geom::{Mat2, Norm, Vec2};
use crate::kernel::surface::FlatSurface;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BreakKind {
    /// Local minimum of ℓ₁: the realizer turns from shrinking to growing.
    Minimum,
    /// The realizing connection changes.
    Switch,
}

#[derive(Debug, Clone, Serialize)]
pub struct Breakpoint {
    pub t: f64,
    pub kind: BreakKind,
    /// Holonomy in the rotated, unflowed frame (after the change for a switch).
    pub holonomy: Vec2,
    pub l1: f64,
    /// `|e^{t/2}|h| - e^{-t/2}|v||` for minima, length mismatch for switches.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceProfile {
    pub norm: Norm,
    pub times: Vec<f64>,
    pub l1: Vec<f64>,
    pub d: Vec<f64>,
    /// Holonomy of the realizer at each time, in the unflowed frame.
    pub realizers: Vec<Vec2>,
    pub breakpoints: Vec<Breakpoint>,
}

/// Time at which the flowed length of `(h, v)` is minimal, and that minimum
/// in the given norm.
pub fn minimum_time(hol: Vec2, norm: Norm) -> (f64, f64) {
    let t = (hol.y.abs() / hol.x.abs()).ln();
    (t, flowed_length(hol, t, norm))
}

pub fn flowed_length(hol: Vec2, t: f64, norm: Norm) -> f64 {
    norm.length(Mat2::flow(t).apply(hol))
}

fn canonical(v: Vec2) -> Vec2 {
    if v.is_positive() {
        v
    } else {
        -v
    }
}

fn same(a: Vec2, b: Vec2) -> bool {
    a.approx_eq(b, 1e-9 * a.norm().max(b.norm()).max(1.0))
}

/// Samples ℓ₁ after rotating `direction` to vertical, keeping a Delaunay
/// triangulation of each X_t by flips so that the shortest connection is
/// found near the edges.
pub fn divergence_profile(
    surface: &FlatSurface,
    direction: Vec2,
    t0: f64,
    t1: f64,
    step: f64,
    norm: Norm,
) -> Result<DivergenceProfile> {
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) || !(step > 0.0) {
        return Err(Error::Usage("time range must be finite with t0 <= t1 and step > 0".into()));
    }
    let x = surface.rotate_to_vertical(direction)?;
    let mut base = x.mesh().clone();
    let n = ((t1 - t0) / step).round() as usize;
    let mut times = Vec::with_capacity(n + 1);
    let mut l1s = Vec::with_capacity(n + 1);
    let mut ds = Vec::with_capacity(n + 1);
    let mut realizers = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = if i == n { t1 } else { t0 + i as f64 * step };
        let mut m = base.transformed(&Mat2::flow(t));
        flip_to_delaunay(&mut m, DEFAULT_FLIP_BUDGET, |h| base.flip(h))?;
        let c = shortest(&m, norm)?;
        let hol = canonical(Mat2::flow(-t).apply(c.holonomy));
        let l = flowed_length(hol, t, norm);
        times.push(t);
        l1s.push(l);
        ds.push(-2.0 * l.ln());
        realizers.push(hol);
    }
    let breakpoints = find_breakpoints(&times, &realizers, norm);
    Ok(DivergenceProfile { norm, times, l1: l1s, d: ds, realizers, breakpoints })
}

fn find_breakpoints(times: &[f64], realizers: &[Vec2], norm: Norm) -> Vec<Breakpoint> {
    let mut out = Vec::new();
    let min_in = |r: Vec2, a: f64, b: f64, out: &mut Vec<Breakpoint>| {
        let (ts, l) = minimum_time(r, norm);
        if ts > a && ts <= b {
            let residual = ((ts / 2.0).exp() * r.x.abs() - (-ts / 2.0).exp() * r.y.abs()).abs();
            out.push(Breakpoint { t: ts, kind: BreakKind::Minimum, holonomy: r, l1: l, residual });
        }
    };
    for i in 0..times.len().saturating_sub(1) {
        let (a, b) = (times[i], times[i + 1]);
        let (ra, rb) = (realizers[i], realizers[i + 1]);
        if same(ra, rb) {
            min_in(ra, a, b, &mut out);
            continue;
        }
        // crossing of the two length functions by bisection on the log ratio
        let f = |t: f64| flowed_length(ra, t, norm).ln() - flowed_length(rb, t, norm).ln();
        let (mut lo, mut hi) = (a, b);
        if f(lo) * f(hi) <= 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-15 * hi.abs().max(1.0) {
                    break;
                }
            }
        }
        let ts = if f(a) * f(b) <= 0.0 {
            0.5 * (lo + hi)
        } else if f(a).abs() <= f(b).abs() {
            // a tie at a grid point
            a
        } else {
            b
        };
        min_in(ra, a, ts, &mut out);
        let la = flowed_length(ra, ts, norm);
        let lb = flowed_length(rb, ts, norm);
        out.push(Breakpoint { t: ts, kind: BreakKind::Switch, holonomy: rb, l1: lb, residual: (la - lb).abs() });
        min_in(rb, ts, b, &mut out);
    }
    out
}

impl DivergenceProfile {
    /// Largest deviation of `|slope of d| ` from 1 over grid intervals that
    /// contain no breakpoint. Meaningful in the sup norm.
    pub fn max_slope_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut k = 0;
        for i in 0..self.times.len().saturating_sub(1) {
            let (a, b) = (self.times[i], self.times[i + 1]);
            while k < self.breakpoints.len() && self.breakpoints[k].t < a {
                k += 1;
            }
            if k < self.breakpoints.len() && self.breakpoints[k].t <= b {
                continue;
            }
            let slope = (self.d[i + 1] - self.d[i]) / (b - a);
            worst = worst.max((slope.abs() - 1.0).abs());
        }
        worst
    }

    /// Minima of ℓ₁ only.
    pub fn minima(&self) -> impl Iterator<Item = &Breakpoint> {
        self.breakpoints.iter().filter(|b| b.kind == BreakKind::Minimum)
    }

    /// Columns `t,l1,d,realizer_h,realizer_v`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,l1,d,realizer_h,realizer_v\n");
        for i in 0..self.times.len() {
            let r = self.realizers[i];
            let _ = writeln!(s, "{},{},{},{},{}", self.times[i], self.l1[i], self.d[i], r.x, r.y);
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiophantineReport {
    pub eps: f64,
    pub v_bound: f64,
    pub h0: f64,
    /// Largest c' with h(γ) v(γ) (log v(γ))^ε ≥ c' over the checked connections.
    pub c_best: f64,
    pub minimizer: Option<Vec2>,
    /// Connections with vanishing horizontal component.
    pub violations: Vec<Vec2>,
    pub checked: usize,
}

/// Scans connections with `e < v(γ) <= v_bound` and `h(γ) < h0` of the
/// surface rotated so that `direction` is vertical.
pub fn diophantine_check(surface: &FlatSurface, direction: Vec2, eps: f64, v_bound: f64, h0: f64) -> Result<DiophantineReport> {
    if !(eps > 0.0) || !(v_bound > std::f64::consts::E) || !(h0 > 0.0) {
        return Err(Error::Usage("need eps > 0, v_bound > e and h0 > 0".into()));
    }
    let x = surface.rotate_to_vertical(direction)?;
    // flow the box |h| < h0, |v| <= V to a square of side √(h0 V)
    let t = (v_bound / h0).ln();
    let mut m = x.mesh().transformed(&Mat2::flow(t));
    flip_to_delaunay(&mut m, DEFAULT_FLIP_BUDGET, |_| {})?;
    let side = (h0 * v_bound).sqrt();
    let conns: Vec<SaddleConnection> = enumerate_connections(&m, side * (1.0 + 1e-12), Norm::Sup)?;
    let back = Mat2::flow(-t);
    let mut report = DiophantineReport { eps, v_bound, h0, c_best: f64::INFINITY, minimizer: None, violations: Vec::new(), checked: 0 };
    for c in conns {
        let hol = canonical(back.apply(c.holonomy));
        let (h, v) = (hol.x.abs(), hol.y.abs());
        if v > v_bound * (1.0 + 1e-12) || h >= h0 {
            continue;
        }
        // a vertical connection violates the bound whatever its length
        let vertical = h <= 1e-12 * v;
        if v <= std::f64::consts::E && !vertical {
            continue;
        }
        report.checked += 1;
        if vertical {
            if !report.violations.iter().any(|&w| same(w, hol)) {
                report.violations.push(hol);
            }
            report.c_best = 0.0;
            report.minimizer = Some(hol);
            continue;
        }
        let c = h * v * v.ln().powf(eps);
        if c < report.c_best {
            report.c_best = c;
            report.minimizer = Some(hol);
        }
    }
    if report.minimizer.is_none() {
        report.c_best = f64::INFINITY;
    }
    Ok(report)
}
