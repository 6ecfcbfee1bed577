//! Quasi-independence estimates for a family of sets from sampled
//! membership masks, and the family of buffered squares along a flow.

use super::{buffered_square_from_strip, decompose_strips, BufferedSquare};
use crate::connections::enumerate::shortest;
use crate::delaunay::{flip_to_delaunay, DEFAULT_FLIP_BUDGET};
use crate::error::{Error, Result};
use crate::geom::{Mat2, Norm, Vec2};
use crate::kernel::mesh::{tri_of, Mesh, SurfacePoint};
use crate::kernel::surface::FlatSurface;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

const CHUNK: usize = 4096;

#[derive(Debug, Clone)]
pub struct PzOptions {
    pub samples: usize,
    /// Only the first `window` sets enter the estimates.
    pub window: usize,
    /// A sample counts as recurring when it lies in at least `k` sets.
    pub k: usize,
    pub seed: u64,
}

impl Default for PzOptions {
    fn default() -> Self {
        PzOptions { samples: 1_000_000, window: 50, k: 10, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PzReport {
    pub n_sets: usize,
    pub samples: usize,
    pub measures: Vec<f64>,
    /// `max |A_n ∩ A_m| / (|A_n| |A_m|)` over pairs `n != m` of sets with
    /// positive estimated measure.
    pub k_hat: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub partial_sums: Vec<f64>,
    pub io_k: usize,
    /// Fraction of samples in at least `io_k` of the sets.
    pub io_fraction: f64,
}

/// Estimates from one membership mask per sample (bit n set when the
/// sample lies in set n).
pub fn pz_statistics(masks: &[u64], n_sets: usize, k: usize) -> Result<PzReport> {
    if n_sets == 0 || n_sets > 64 || masks.is_empty() {
        return Err(Error::Usage("need 1..=64 sets and at least one sample".into()));
    }
    let keep = if n_sets == 64 { u64::MAX } else { (1u64 << n_sets) - 1 };
    let zero = || (vec![0u64; n_sets], vec![0u64; n_sets * n_sets], 0u64);
    let (single, pairs, io) = masks
        .par_chunks(CHUNK)
        .fold(zero, |(mut s, mut p, mut io), chunk| {
            for &m in chunk {
                let m = m & keep;
                if m.count_ones() as usize >= k {
                    io += 1;
                }
                let mut a = m;
                while a != 0 {
                    let i = a.trailing_zeros() as usize;
                    a &= a - 1;
                    s[i] += 1;
                    let mut b = a;
                    while b != 0 {
                        let j = b.trailing_zeros() as usize;
                        b &= b - 1;
                        p[i * n_sets + j] += 1;
                    }
                }
            }
            (s, p, io)
        })
        .reduce(zero, |(mut s, mut p, io), (s2, p2, io2)| {
            s.iter_mut().zip(&s2).for_each(|(a, b)| *a += b);
            p.iter_mut().zip(&p2).for_each(|(a, b)| *a += b);
            (s, p, io + io2)
        });
    let n = masks.len() as f64;
    let measures: Vec<f64> = single.iter().map(|&c| c as f64 / n).collect();
    let mut k_hat: f64 = 0.0;
    let mut worst_pair = None;
    for i in 0..n_sets {
        for j in i + 1..n_sets {
            let denom = measures[i] * measures[j];
            if denom <= 0.0 {
                continue;
            }
            let r = pairs[i * n_sets + j] as f64 / n / denom;
            if r > k_hat {
                k_hat = r;
                worst_pair = Some((i, j));
            }
        }
    }
    let partial_sums = measures
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    Ok(PzReport { n_sets, samples: masks.len(), measures, k_hat, worst_pair, partial_sums, io_k: k, io_fraction: io as f64 / n })
}

/// Samples `opts.samples` points with `gen` and records membership through
/// `member`, which returns the mask of sets containing the sample.
pub fn pz_check<S, G, F>(n_sets: usize, gen: G, member: F, opts: &PzOptions) -> Result<PzReport>
where
    G: Fn(&mut ChaCha8Rng) -> S + Sync,
    F: Fn(&S) -> u64 + Sync,
{
    let n_sets = n_sets.min(opts.window);
    let chunks = opts.samples.div_ceil(CHUNK);
    let masks: Vec<u64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(opts.samples - c * CHUNK);
            (0..len).map(|_| member(&gen(&mut rng))).collect::<Vec<_>>()
        })
        .collect();
    pz_statistics(&masks, n_sets, opts.k)
}

/// `n` independent events of measure `p` each.
pub fn independent_masks(n: usize, p: f64, opts: &PzOptions) -> Result<PzReport> {
    pz_check(n, |rng| (0..n).fold(0u64, |m, i| if rng.gen::<f64>() < p { m | 1 << i } else { m }), |&m| m, opts)
}

/// `n` copies of one event of measure `a`.
pub fn nested_masks(n: usize, a: f64, opts: &PzOptions) -> Result<PzReport> {
    let all = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    pz_check(n, |rng| rng.gen::<f64>(), |&u| if u < a { all } else { 0 }, opts)
}

/// Sample points carried along edge flips of the base triangulation.
struct Cloud {
    pts: Vec<SurfacePoint>,
    by_tri: Vec<Vec<u32>>,
}

impl Cloud {
    fn new(mesh: &Mesh, pts: Vec<SurfacePoint>) -> Cloud {
        let mut by_tri = vec![Vec::new(); mesh.n_triangles()];
        for (i, p) in pts.iter().enumerate() {
            by_tri[p.tri].push(i as u32);
        }
        Cloud { pts, by_tri }
    }

    /// Flips `h` in `mesh` and re-expresses the points of the two triangles.
    fn flip(&mut self, mesh: &mut Mesh, h: usize) {
        let g = mesh.twin(h);
        let (t1, t2) = (tri_of(h), tri_of(g));
        // everything in the frame of t1 before the flip
        let a = mesh.start_of(h);
        let b = a + mesh.vec(h);
        let offset2 = b - mesh.start_of(g);
        let c = b + mesh.vec(crate::kernel::mesh::next(h));
        let d = a + mesh.vec(crate::kernel::mesh::next(g));
        let mut moved: Vec<(u32, Vec2)> = Vec::with_capacity(self.by_tri[t1].len() + self.by_tri[t2].len());
        for &i in &self.by_tri[t1] {
            moved.push((i, self.pts[i as usize].pos));
        }
        for &i in &self.by_tri[t2] {
            moved.push((i, self.pts[i as usize].pos + offset2));
        }
        mesh.flip(h);
        // the new h runs from d to c, its twin from c to d
        let o1 = d - mesh.start_of(h);
        let o2 = c - mesh.start_of(g);
        self.by_tri[t1].clear();
        self.by_tri[t2].clear();
        for (i, p) in moved {
            let q1 = p - o1;
            let (t, q) = if mesh.contains(t1, q1, 1e-12) { (t1, q1) } else { (t2, p - o2) };
            self.pts[i as usize] = SurfacePoint { tri: t, pos: q };
            self.by_tri[t].push(i);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SquareSummary {
    pub t: f64,
    pub gamma: Vec2,
    pub m: usize,
    pub side: f64,
    pub embedded: bool,
    pub alpha: f64,
    pub overlap: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlitPzReport {
    pub squares: Vec<SquareSummary>,
    pub alpha_min: f64,
    pub stats: PzReport,
}

/// Sets A_n = points of X lying in the buffered square of X_{t_n}, where
/// X is `surface` with `direction` turned vertical.
pub fn slit_pz(surface: &FlatSurface, direction: Vec2, times: &[f64], opts: &PzOptions) -> Result<SlitPzReport> {
    let n = times.len().min(opts.window);
    if n == 0 || n > 64 || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Usage("need 1..=64 increasing times".into()));
    }
    let x = surface.rotate_to_vertical(direction)?;
    let mut base = x.mesh().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pts = (0..opts.samples).map(|_| base.sample_point(&mut rng)).collect();
    let mut cloud = Cloud::new(&base, pts);
    let mut masks = vec![0u64; opts.samples];
    let mut squares = Vec::with_capacity(n);
    for (k, &t) in times[..n].iter().enumerate() {
        let flow = Mat2::flow(t);
        let mut m = base.transformed(&flow);
        flip_to_delaunay(&mut m, DEFAULT_FLIP_BUDGET, |h| cloud.flip(&mut base, h))?;
        let c = shortest(&m, Norm::Euclid)?;
        let dec = decompose_strips(&m, &c)?;
        let bs: BufferedSquare = buffered_square_from_strip(&m, &dec)?;
        let sq = &bs.square;
        let rect = sq.rect();
        let mut dev_by_tri: Vec<Vec<Vec2>> = vec![Vec::new(); m.n_triangles()];
        for &(tri, b) in &sq.development {
            dev_by_tri[tri].push(b);
        }
        masks.par_iter_mut().zip(cloud.pts.par_iter()).for_each(|(mask, p)| {
            let q = flow.apply(p.pos);
            if dev_by_tri[p.tri].iter().any(|&b| rect.contains(b + q, 0.0)) {
                *mask |= 1 << k;
            }
        });
        squares.push(SquareSummary { t, gamma: dec.holonomy, m: dec.m, side: sq.side, embedded: sq.embedded, alpha: bs.alpha, overlap: bs.overlap });
    }
    let alpha_min = squares.iter().map(|s| s.alpha).fold(f64::INFINITY, f64::min);
    let stats = pz_statistics(&masks, n, opts.k)?;
    Ok(SlitPzReport { squares, alpha_min, stats })
}
