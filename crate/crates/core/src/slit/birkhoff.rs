//! Crossing averages of a transverse arc and its image on the other sheet,
//! over many starting points, grouped by single linkage.

use super::model::SlitTorus;
use crate::error::{Error, Result};
use crate::geom::{Mat2, Vec2};
use crate::kernel::birkhoff::{birkhoff_average, Arc};
use crate::kernel::SurfacePoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct BirkhoffOptions {
    pub starts: usize,
    /// Length of the vertical segments.
    pub t: f64,
    /// Anchor of the arc in torus coordinates (on the first sheet).
    pub anchor: Vec2,
    pub arc_length: f64,
    /// Relative gap (to the mean) separating clusters.
    pub gap: f64,
    pub seed: u64,
}

impl Default for BirkhoffOptions {
    fn default() -> Self {
        BirkhoffOptions { starts: 10, t: 1e4, anchor: Vec2::new(0.61, 0.37), arc_length: 0.5, gap: 0.1, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StartResult {
    pub crossings: [u64; 2],
    /// Crossings per unit length with the arc on each sheet.
    pub averages: [f64; 2],
    pub restarts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    pub members: Vec<usize>,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BirkhoffReport {
    pub slope: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub arc_length: f64,
    pub starts: Vec<StartResult>,
    /// Clusters of the first-sheet averages in increasing order.
    pub clusters: Vec<Cluster>,
    /// `(max - min) / mean` over all starts.
    pub spread: f64,
    /// Largest gap between consecutive clusters over the mean.
    pub gap: f64,
}

/// Runs `opts.starts` vertical segments of length `opts.t` in the direction
/// of slope `slope` and counts crossings with the arc on each sheet. A start
/// that runs into a branch point is moved slightly and retried.
pub fn birkhoff_experiment(st: &SlitTorus, slope: f64, opts: &BirkhoffOptions) -> Result<BirkhoffReport> {
    if !slope.is_finite() {
        return Err(Error::Usage("slope must be finite".into()));
    }
    if opts.starts == 0 {
        return Err(Error::Usage("need at least one start".into()));
    }
    let dir = Vec2::new(1.0, slope);
    let rot = Mat2::rotate_to_vertical(dir);
    let x = st.surface.rotate_to_vertical(dir)?;
    let mesh = x.mesh();
    let arcs: Vec<Arc> = (0..2)
        .map(|sheet| Arc::horizontal(mesh, x.point(sheet, rot.apply(opts.anchor))?, opts.arc_length))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let seeds: Vec<(SurfacePoint, u64)> = (0..opts.starts).map(|_| (mesh.sample_point(&mut rng), rng.gen())).collect();
    let starts: Vec<StartResult> = seeds
        .into_par_iter()
        .map(|(p0, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut p = p0;
            for restarts in 0..100 {
                let r: Result<Vec<_>> = arcs.iter().map(|a| birkhoff_average(mesh, p, a, opts.t)).collect();
                match r {
                    Ok(e) => {
                        return Ok(StartResult {
                            crossings: [e[0].crossings, e[1].crossings],
                            averages: [e[0].average, e[1].average],
                            restarts,
                        })
                    }
                    Err(Error::SingularityHit { .. }) => p = mesh.sample_point(&mut rng),
                    Err(e) => return Err(e),
                }
            }
            Err(Error::RayBudgetExceeded)
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = starts.iter().map(|s| s.averages[0]).collect();
    let (clusters, spread, gap) = single_linkage(&values, opts.gap);
    Ok(BirkhoffReport { slope, t: opts.t, arc_length: opts.arc_length, starts, clusters, spread, gap })
}

/// Splits sorted values wherever consecutive ones differ by more than
/// `gap` times the mean.
pub fn single_linkage(values: &[f64], gap: f64) -> (Vec<Cluster>, f64, f64) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
    let scale = if mean > 0.0 { mean } else { 1.0 };
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut widest: f64 = 0.0;
    for &i in &idx {
        let v = values[i];
        match clusters.last_mut() {
            Some(c) if (v - c.max) <= gap * scale => {
                c.members.push(i);
                c.max = v;
            }
            last => {
                if let Some(c) = last {
                    widest = widest.max((v - c.max) / scale);
                }
                clusters.push(Cluster { members: vec![i], min: v, max: v, mean: 0.0 });
            }
        }
    }
    for c in &mut clusters {
        c.mean = c.members.iter().map(|&i| values[i]).sum::<f64>() / c.members.len() as f64;
    }
    let spread = match (idx.first(), idx.last()) {
        (Some(&a), Some(&b)) => (values[b] - values[a]) / scale,
        _ => 0.0,
    };
    (clusters, spread, widest)
}
