//! Vertical strips cut out by a saddle connection, the buffered squares
//! they carry, and the shrinking-target machinery built on them.

pub mod pz;
pub mod time;

pub use pz::{independent_masks, nested_masks, pz_check, pz_statistics, slit_pz, PzOptions, PzReport, SlitPzReport};
pub use time::{time_sequence, TimeSequence};

use crate::connections::enumerate::{end_corner, shortest, SaddleConnection};
use crate::delaunay::{flip_to_delaunay, DEFAULT_FLIP_BUDGET};
use crate::error::{Error, Result};
use crate::geom::{Mat2, Norm, Vec2};
use crate::kernel::mesh::{Mesh, SurfacePoint};
use crate::kernel::ray::cast_vertical_ray;
use crate::kernel::surface::FlatSurface;
use crate::network::{clipped_area, cone_vertices, develop, embed_square, EmbeddedSquare, Rect};
use serde::Serialize;
use std::f64::consts::PI;

/// Total vertical length a critical leaf may travel before giving up, in
/// units of area / horizontal extent of γ.
pub const RAY_BUDGET: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zipper {
    pub vertex: usize,
    /// Height of the singularity above the base of the strip.
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strip {
    /// Horizontal coordinates of the base on γ, measured from its start.
    pub left: f64,
    pub right: f64,
    /// Length of the base along γ.
    pub width: f64,
    /// Horizontal width `right - left`.
    pub transverse_width: f64,
    /// First return time of the vertical flow from the base to γ.
    pub height: f64,
    pub area: f64,
    /// The top lands on `[left + shift, right + shift]`.
    pub shift: f64,
    pub zippers: [Zipper; 2],
    /// Midpoint of the base.
    pub base_point: SurfacePoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct StripDecomposition {
    /// Holonomy of γ, oriented left to right.
    pub holonomy: Vec2,
    pub start: usize,
    pub end: usize,
    pub strips: Vec<Strip>,
    pub m: usize,
    pub total_area: f64,
    pub surface_area: f64,
}

struct Gamma {
    hol: Vec2,
    /// (triangle, from, to, horizontal coordinate of `from`)
    pieces: Vec<(usize, Vec2, Vec2, f64)>,
    by_tri: Vec<Vec<usize>>,
    tol: f64,
}

impl Gamma {
    fn trace(mesh: &Mesh, corner: (usize, usize), hol: Vec2, edge: Option<usize>) -> Result<Gamma> {
        let (t, k) = corner;
        let c0 = mesh.corners(t)[k];
        let len = hol.norm();
        let mut raw: Vec<(usize, Vec2, Vec2)> = Vec::new();
        if let Some(h) = edge {
            // an edge lies on both of its triangles
            let h = if mesh.vec(h).approx_eq(hol, 1e-9 * len) { h } else { mesh.twin(h) };
            let g = mesh.twin(h);
            let a = mesh.start_of(h);
            raw.push((crate::kernel::mesh::tri_of(h), a, a + hol));
            let b = mesh.start_of(g);
            raw.push((crate::kernel::mesh::tri_of(g), b + mesh.vec(g), b));
        } else {
            // leave the corner by a short step of our own: a ray cast from a
            // vertex is nudged sideways
            let eta = 1e-7 * len;
            let p = c0 + hol * (eta / len);
            raw.push((t, c0, p));
            let tr = crate::kernel::ray::cast_ray(mesh, SurfacePoint { tri: t, pos: p }, hol, len - eta);
            if let Some((_, d)) = tr.hit {
                if d < (len - eta) * (1.0 - 1e-9) {
                    return Err(Error::HypothesisFailure("saddle connection meets a vertex in its interior".into()));
                }
            }
            raw.extend(tr.pieces.iter().map(|p| (p.tri, p.from, p.to)));
        }
        let mut pieces = Vec::with_capacity(raw.len());
        let mut by_tri = vec![Vec::new(); mesh.n_triangles()];
        let mut u = 0.0;
        for (tri, a, b) in raw {
            by_tri[tri].push(pieces.len());
            pieces.push((tri, a, b, u));
            if edge.is_none() {
                u += b.x - a.x;
            }
        }
        Ok(Gamma { hol, pieces, by_tri, tol: 1e-9 * mesh.area().sqrt() })
    }

    /// First meeting of a vertical ray with γ beyond distance `tol`:
    /// (distance along the ray, horizontal coordinate on γ).
    fn first_hit(&self, pieces: &[crate::kernel::ray::RayPiece], offset: f64) -> Option<(f64, f64)> {
        let eps = 1e-12 * (1.0 + self.hol.norm());
        let mut along = offset;
        for rp in pieces {
            let x = rp.from.x;
            let (ylo, yhi) = if rp.from.y < rp.to.y { (rp.from.y, rp.to.y) } else { (rp.to.y, rp.from.y) };
            let mut best: Option<(f64, f64)> = None;
            for &i in &self.by_tri[rp.tri] {
                let (_, a, b, u0) = self.pieces[i];
                if b.x - a.x <= 0.0 || x < a.x - eps || x > b.x + eps {
                    continue;
                }
                let s = ((x - a.x) / (b.x - a.x)).clamp(0.0, 1.0);
                let y = a.y + s * (b.y - a.y);
                if y < ylo - eps || y > yhi + eps {
                    continue;
                }
                let d = along + (y - rp.from.y).abs();
                if d > self.tol && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, u0 + (x - a.x).clamp(0.0, b.x - a.x)));
                }
            }
            if best.is_some() {
                return best;
            }
            along += rp.length();
        }
        None
    }

    /// Follows the vertical leaf from `p` until it meets γ.
    fn flow_to(&self, mesh: &Mesh, mut p: SurfacePoint, up: bool, budget: f64) -> Result<(f64, f64)> {
        let chunk = (4.0 * mesh.area() / self.hol.x).max(1.0);
        let mut travelled = 0.0;
        while travelled < budget {
            let tr = cast_vertical_ray(mesh, p, chunk, up);
            if let Some(hit) = self.first_hit(&tr.pieces, travelled) {
                return Ok(hit);
            }
            if let Some((v, _)) = tr.hit {
                return Err(Error::VerticalSaddleConnection { vertex: v });
            }
            travelled += tr.length;
            p = tr.end;
        }
        Err(Error::RayBudgetExceeded)
    }

    fn point_at(&self, u: f64) -> SurfacePoint {
        let i = self.pieces.iter().rposition(|&(_, a, b, u0)| u0 <= u && b.x > a.x).unwrap_or(0);
        let (t, a, b, u0) = self.pieces[i];
        let s = ((u - u0) / (b.x - a.x)).clamp(0.0, 1.0);
        SurfacePoint { tri: t, pos: a + (b - a) * s }
    }
}

fn ccw_angle(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).atan2(a.dot(b)).rem_euclid(2.0 * PI)
}

/// Downward critical leaves: (vertex, half-edge whose corner contains the
/// prong). A vertical edge at a cone point is a vertical saddle connection.
fn downward_prongs(mesh: &Mesh, cone: &[bool]) -> Result<Vec<(usize, usize)>> {
    let down = Vec2::new(0.0, -1.0);
    let tol = 1e-11;
    let mut out = Vec::new();
    for h in 0..mesh.n_halfedges() {
        let v = mesh.origin(h);
        if !cone[v] {
            continue;
        }
        let off = ccw_angle(mesh.vec(h), down);
        let e = mesh.vec(h);
        if e.x.abs() <= tol * e.norm() {
            return Err(Error::VerticalSaddleConnection { vertex: v });
        }
        if off > tol && off < mesh.corner_angle(h) - tol {
            out.push((v, h));
        }
    }
    Ok(out)
}

/// Cuts the surface along `gamma` and the vertical critical leaves through
/// the cone points, each extended until it first meets `gamma`. The pieces
/// are parallelograms with base and top on `gamma`.
pub fn decompose_strips(mesh: &Mesh, gamma: &SaddleConnection) -> Result<StripDecomposition> {
    let hol0 = gamma.holonomy;
    if hol0.x.abs() <= 1e-12 * hol0.norm() {
        return Err(Error::VerticalSaddleConnection { vertex: gamma.start });
    }
    let (corner, hol, s, e) =
        if hol0.x > 0.0 { (gamma.corner, hol0, gamma.start, gamma.end) } else { (end_corner(mesh, gamma), -hol0, gamma.end, gamma.start) };
    let g = Gamma::trace(mesh, corner, hol, gamma.edge)?;
    let hx = hol.x;
    let budget = RAY_BUDGET * mesh.area() / hx;
    let cone = cone_vertices(mesh);

    let mut cuts: Vec<(f64, Zipper)> = Vec::new();
    for (v, h) in downward_prongs(mesh, &cone)? {
        let t = crate::kernel::mesh::tri_of(h);
        // start just below the vertex inside its own sector; a ray cast from
        // the vertex itself may be nudged onto another sheet
        let eta = 1e-7 * mesh.area().sqrt();
        let start = SurfacePoint { tri: t, pos: mesh.corners(t)[h % 3] - Vec2::new(0.0, eta) };
        if !mesh.contains(t, start.pos, 0.0) {
            return Err(Error::VerticalSaddleConnection { vertex: v });
        }
        let (a, u) = g.flow_to(mesh, start, false, budget)?;
        cuts.push((u, Zipper { vertex: v, height: a + eta }));
    }
    cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let utol = 1e-10 * hx.max(1.0);
    let mut bounds = vec![(0.0, Zipper { vertex: s, height: 0.0 })];
    bounds.extend(cuts);
    bounds.push((hx, Zipper { vertex: e, height: 0.0 }));
    for w in bounds.windows(2) {
        if w[1].0 - w[0].0 <= utol {
            return Err(Error::VerticalSaddleConnection { vertex: w[1].1.vertex });
        }
    }

    let along = hol.norm() / hx;
    let mut strips = Vec::with_capacity(bounds.len() - 1);
    for w in bounds.windows(2) {
        let (l, r) = (w[0].0, w[1].0);
        let mid = 0.5 * (l + r);
        let p = g.point_at(mid);
        let (height, u) = g.flow_to(mesh, p, true, budget)?;
        let shift = u - mid;
        // with a regular endpoint γ closes up and tops may wrap around it
        let wraps = !cone[s] || !cone[e];
        if !wraps && (l + shift < -utol || r + shift > hx + utol) {
            return Err(Error::HypothesisFailure(format!("strip over [{l}, {r}] lands outside the connection")));
        }
        strips.push(Strip {
            left: l,
            right: r,
            width: (r - l) * along,
            transverse_width: r - l,
            height,
            area: (r - l) * height,
            shift,
            zippers: [w[0].1, w[1].1],
            base_point: p,
        });
    }
    let total_area = strips.iter().map(|s| s.area).sum();
    Ok(StripDecomposition { holonomy: hol, start: s, end: e, m: strips.len(), strips, total_area, surface_area: mesh.area() })
}

#[derive(Debug, Clone, Serialize)]
pub struct BufferedSquare {
    /// Index of the strip of largest area.
    pub strip: usize,
    pub square: EmbeddedSquare,
    /// Rectangle around the base midpoint of the strip containing it.
    pub buffer_anchor: SurfacePoint,
    pub buffer: Rect,
    pub buffer_area: f64,
    /// `buffer_area / surface area`.
    pub alpha: f64,
    pub m: usize,
    /// Largest number of extra sheets of the buffer over a point: 0 if
    /// embedded, 1 if it covers no point more than twice, 2 otherwise.
    pub overlap: usize,
}

/// Number of copies in a development covering a common point, capped at 3.
fn multiplicity(mesh: &Mesh, dev: &[(usize, Vec2)], rect: &Rect) -> usize {
    let mut by_tri: Vec<Vec<Vec2>> = vec![Vec::new(); mesh.n_triangles()];
    for &(t, b) in dev {
        by_tri[t].push(b);
    }
    let scale = rect.x1 - rect.x0;
    let min_area = 1e-12 * scale * scale;
    let meet = |t: usize, bs: &[Vec2]| -> Option<Rect> {
        // points p of the triangle with b + p in the rectangle for all b
        let r = Rect {
            x0: bs.iter().map(|b| rect.x0 - b.x).fold(f64::NEG_INFINITY, f64::max),
            x1: bs.iter().map(|b| rect.x1 - b.x).fold(f64::INFINITY, f64::min),
            y0: bs.iter().map(|b| rect.y0 - b.y).fold(f64::NEG_INFINITY, f64::max),
            y1: bs.iter().map(|b| rect.y1 - b.y).fold(f64::INFINITY, f64::min),
        };
        (r.x1 > r.x0 && r.y1 > r.y0 && clipped_area(mesh.corners(t), &r) > min_area).then_some(r)
    };
    let mut best = 1;
    for (t, bs) in by_tri.iter().enumerate() {
        for i in 0..bs.len() {
            for j in i + 1..bs.len() {
                if meet(t, &[bs[i], bs[j]]).is_none() {
                    continue;
                }
                best = best.max(2);
                for k in j + 1..bs.len() {
                    if meet(t, &[bs[i], bs[j], bs[k]]).is_some() {
                        return 3;
                    }
                }
            }
        }
    }
    best
}

/// Square of side the transverse width of the strip of largest area,
/// centred in it, inside the smallest axis-parallel rectangle containing the
/// strip.
pub fn buffered_square_from_strip(mesh: &Mesh, dec: &StripDecomposition) -> Result<BufferedSquare> {
    let (k, strip) = dec
        .strips
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.area.total_cmp(&b.1.area))
        .ok_or_else(|| Error::Usage("empty decomposition".into()))?;
    let w = strip.transverse_width;
    let sigma = (dec.holonomy.y / dec.holonomy.x).abs();
    let buffer = Rect { x0: -w / 2.0, x1: w / 2.0, y0: -sigma * w / 2.0, y1: strip.height + sigma * w / 2.0 };
    let dev = develop(mesh, strip.base_point, &buffer, &cone_vertices(mesh))?;
    let overlap = multiplicity(mesh, &dev, &buffer) - 1;
    let side = w.min(buffer.height());
    let centre = cast_vertical_ray(mesh, strip.base_point, strip.height / 2.0, true);
    if let Some((v, _)) = centre.hit {
        return Err(Error::SingularityInInterior { vertex: v });
    }
    let square = embed_square(mesh, centre.end, side)?;
    let buffer_area = w * buffer.height();
    Ok(BufferedSquare {
        strip: k,
        square,
        buffer_anchor: strip.base_point,
        buffer,
        buffer_area,
        alpha: buffer_area / mesh.area(),
        m: dec.m,
        overlap,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WidthRow {
    pub t: f64,
    /// Shortest connection of X_t.
    pub gamma: Vec2,
    pub gamma_length: f64,
    pub m: usize,
    pub min_width: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WidthReport {
    pub delta: f64,
    pub rows: Vec<WidthRow>,
    pub violations: usize,
    /// Largest length of the chosen connections.
    pub kappa: f64,
    /// Least-squares exponent δ' in min width ~ t^-δ' over the run.
    pub delta_fit: f64,
}

/// Along the flow of `direction` turned vertical, decomposes each X_t by
/// its shortest saddle connection and compares the narrowest strip with
/// `t^-delta`. Times must increase and be at least 1.
pub fn strip_width_bound_check(surface: &FlatSurface, direction: Vec2, delta: f64, times: &[f64]) -> Result<WidthReport> {
    if !(delta > 0.0) || times.iter().any(|&t| !(t >= 1.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Usage("need delta > 0 and increasing times >= 1".into()));
    }
    let x = surface.rotate_to_vertical(direction)?;
    let mut base = x.mesh().clone();
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let mut m = base.transformed(&Mat2::flow(t));
        flip_to_delaunay(&mut m, DEFAULT_FLIP_BUDGET, |h| base.flip(h))?;
        let c = shortest(&m, Norm::Euclid)?;
        let dec = decompose_strips(&m, &c)?;
        let min_width = dec.strips.iter().map(|s| s.width).fold(f64::INFINITY, f64::min);
        let bound = t.powf(-delta);
        rows.push(WidthRow { t, gamma: dec.holonomy, gamma_length: c.length, m: dec.m, min_width, bound, ok: min_width >= bound });
    }
    let violations = rows.iter().filter(|r| !r.ok).count();
    let kappa = rows.iter().map(|r| r.gamma_length).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.t.ln(), r.min_width.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let delta_fit = if sxx > 0.0 { -sxy / sxx } else { 0.0 };
    Ok(WidthReport { delta, rows, violations, kappa, delta_fit })
}
