//! Embedded squares, vertical visibility and reachability, and networks of
//! squares built from a Delaunay triangulation.

use crate::connections::l3;
use crate::delaunay::{classify, TriangleClass};
use crate::error::{Error, Result};
use crate::geom::{circumcenter, Norm, Vec2};
use crate::kernel::mesh::{tri_of, Mesh, SurfacePoint};
use crate::kernel::ray::{cast_ray, cast_vertical_ray};
use crate::kernel::surface::FlatSurface;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;
use std::f64::consts::PI;

const TOL: f64 = 1e-9;
const DEVELOPMENT_CAP: usize = 200_000;

/// Axis-parallel rectangle `[x0, x1] × [y0, y1]` relative to an anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn square(side: f64) -> Rect {
        let h = side / 2.0;
        Rect { x0: -h, x1: h, y0: -h, y1: h }
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    fn shifted(&self, d: Vec2) -> Rect {
        Rect { x0: self.x0 + d.x, x1: self.x1 + d.x, y0: self.y0 + d.y, y1: self.y1 + d.y }
    }

    fn union(&self, o: &Rect) -> Rect {
        Rect { x0: self.x0.min(o.x0), x1: self.x1.max(o.x1), y0: self.y0.min(o.y0), y1: self.y1.max(o.y1) }
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        p.x >= self.x0 - tol && p.x <= self.x1 + tol && p.y >= self.y0 - tol && p.y <= self.y1 + tol
    }

    fn strictly_contains(&self, p: Vec2, tol: f64) -> bool {
        p.x > self.x0 + tol && p.x < self.x1 - tol && p.y > self.y0 + tol && p.y < self.y1 - tol
    }
}

/// Vertices whose cone angle differs from 2π.
pub fn cone_vertices(mesh: &Mesh) -> Vec<bool> {
    let mut angle = vec![0.0; mesh.n_vertices()];
    for h in 0..mesh.n_halfedges() {
        angle[mesh.origin(h)] += mesh.corner_angle(h);
    }
    angle.into_iter().map(|a| (a - 2.0 * PI).abs() > 1e-6).collect()
}

/// Parameters of the part of segment `a b` inside the open rectangle.
fn clip_open(a: Vec2, b: Vec2, r: &Rect, tol: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-d.x, a.x - (r.x0 + tol)), (d.x, (r.x1 - tol) - a.x), (-d.y, a.y - (r.y0 + tol)), (d.y, (r.y1 - tol) - a.y)] {
        if p.abs() < 1e-300 {
            if q < 0.0 {
                return None;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    (t1 - t0 > 1e-12).then_some((t0, t1))
}

/// Copies of triangles meeting a rectangle around `anchor`, as (triangle,
/// position of corner 0 relative to the anchor). Fails if a cone point lies
/// strictly inside.
pub fn develop(mesh: &Mesh, anchor: SurfacePoint, rect: &Rect, cone: &[bool]) -> Result<Vec<(usize, Vec2)>> {
    let key = |t: usize, b: Vec2| (t, (b.x * 1e8).round() as i64, (b.y * 1e8).round() as i64);
    let base0 = -anchor.pos;
    let mut visited = HashSet::new();
    visited.insert(key(anchor.tri, base0));
    let mut out = vec![(anchor.tri, base0)];
    let mut stack = vec![(anchor.tri, base0)];
    while let Some((t, base)) = stack.pop() {
        let cs = mesh.corners(t);
        for (i, &c) in cs.iter().enumerate() {
            let v = mesh.origin(3 * t + i);
            if cone[v] && rect.strictly_contains(base + c, TOL) {
                return Err(Error::SingularityInInterior { vertex: v });
            }
        }
        for i in 0..3 {
            let a = base + cs[i];
            let b = base + cs[(i + 1) % 3];
            if clip_open(a, b, rect, TOL).is_none() {
                continue;
            }
            let g = mesh.twin(3 * t + i);
            let nb = b - mesh.start_of(g);
            if visited.insert(key(tri_of(g), nb)) {
                if out.len() >= DEVELOPMENT_CAP {
                    return Err(Error::BudgetExceeded { what: "development", cap: DEVELOPMENT_CAP });
                }
                out.push((tri_of(g), nb));
                stack.push((tri_of(g), nb));
            }
        }
    }
    Ok(out)
}

/// Area of the part of a triangle (given by corners) inside a rectangle.
pub(crate) fn clipped_area(c: [Vec2; 3], r: &Rect) -> f64 {
    let mut poly: Vec<Vec2> = c.to_vec();
    let planes: [(Vec2, f64); 4] =
        [(Vec2::new(1.0, 0.0), r.x0), (Vec2::new(-1.0, 0.0), -r.x1), (Vec2::new(0.0, 1.0), r.y0), (Vec2::new(0.0, -1.0), -r.y1)];
    for (n, off) in planes {
        let inside = |p: Vec2| n.dot(p) >= off;
        let mut next = Vec::new();
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            if inside(p) {
                next.push(p);
            }
            if inside(p) != inside(q) {
                let s = (off - n.dot(p)) / n.dot(q - p);
                next.push(p + (q - p) * s);
            }
        }
        poly = next;
        if poly.len() < 3 {
            return 0.0;
        }
    }
    crate::geom::polygon_area(&poly).abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddedSquare {
    pub anchor: SurfacePoint,
    pub side: f64,
    /// Developed triangles meeting the square.
    pub development: Vec<(usize, Vec2)>,
    pub embedded: bool,
    /// Translate of the square overlapping it, when not embedded.
    pub obstruction: Option<Vec2>,
}

impl EmbeddedSquare {
    pub fn rect(&self) -> Rect {
        Rect::square(self.side)
    }
}

/// Develops the axis-parallel square of side `side` centered at `anchor`
/// and certifies that it does not overlap itself.
pub fn embed_square(mesh: &Mesh, anchor: SurfacePoint, side: f64) -> Result<EmbeddedSquare> {
    if !(side > 0.0) {
        return Err(Error::Usage("square side must be positive".into()));
    }
    let rect = Rect::square(side);
    let dev = develop(mesh, anchor, &rect, &cone_vertices(mesh))?;
    let mut obstruction: Option<Vec2> = None;
    let min_area = 1e-12 * side * side;
    for i in 0..dev.len() {
        for j in i + 1..dev.len() {
            let ((ti, bi), (tj, bj)) = (dev[i], dev[j]);
            if ti != tj {
                continue;
            }
            // points p of the triangle with bi + p and bj + p both in the square
            let both = Rect { x0: rect.x0 - bi.x.min(bj.x), x1: rect.x1 - bi.x.max(bj.x), y0: rect.y0 - bi.y.min(bj.y), y1: rect.y1 - bi.y.max(bj.y) };
            if both.x1 <= both.x0 || both.y1 <= both.y0 {
                continue;
            }
            if clipped_area(mesh.corners(ti), &both) > min_area {
                let mut d = bj - bi;
                if !d.is_positive() {
                    d = -d;
                }
                let better = obstruction.is_none_or(|o| (d.norm(), d.y.abs()) < (o.norm() - 1e-12, o.y.abs()));
                if better {
                    obstruction = Some(d);
                }
            }
        }
    }
    Ok(EmbeddedSquare { anchor, side, development: dev, embedded: obstruction.is_none(), obstruction })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisibilityWitness {
    pub up: bool,
    /// Length of the vertical segment from the point to the region.
    pub length: f64,
}

/// Shortest vertical segment (either orientation, at most `max`) from
/// `point` into the developed rectangle.
pub fn vertical_reach(mesh: &Mesh, point: SurfacePoint, dev: &[(usize, Vec2)], rect: &Rect, max: f64) -> Option<VisibilityWitness> {
    if dev.iter().any(|&(t, b)| t == point.tri && rect.contains(b + point.pos, TOL)) {
        return Some(VisibilityWitness { up: true, length: 0.0 });
    }
    let mut best: Option<VisibilityWitness> = None;
    for up in [true, false] {
        let trace = cast_vertical_ray(mesh, point, max, up);
        let mut along = 0.0;
        'pieces: for p in &trace.pieces {
            for &(t, b) in dev {
                if t != p.tri {
                    continue;
                }
                let x = b.x + p.from.x;
                if x < rect.x0 - TOL || x > rect.x1 + TOL {
                    continue;
                }
                let (ya, yb) = (b.y + p.from.y, b.y + p.to.y);
                let entry = if ya >= rect.y0 - TOL && ya <= rect.y1 + TOL {
                    Some(0.0)
                } else if up && ya < rect.y0 && yb >= rect.y0 - TOL {
                    Some(rect.y0 - ya)
                } else if !up && ya > rect.y1 && yb <= rect.y1 + TOL {
                    Some(ya - rect.y1)
                } else {
                    None
                };
                if let Some(e) = entry {
                    let length = along + e.max(0.0);
                    if length <= max + TOL && best.is_none_or(|w| length < w.length) {
                        best = Some(VisibilityWitness { up, length });
                    }
                    break 'pieces;
                }
            }
            along += p.length();
        }
    }
    best
}

/// `point` is reached from `square` by a vertical segment of length at most
/// `k · side`.
pub fn k_visible(mesh: &Mesh, point: SurfacePoint, square: &EmbeddedSquare, k: f64) -> Option<VisibilityWitness> {
    vertical_reach(mesh, point, &square.development, &square.rect(), k * square.side)
}

/// Grid of `n × n` sample points of a square.
pub fn square_samples(mesh: &Mesh, sq: &EmbeddedSquare, n: usize) -> Vec<SurfacePoint> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let q = Vec2::new(((i as f64 + 0.5) / n as f64 - 0.5) * sq.side, ((j as f64 + 0.5) / n as f64 - 0.5) * sq.side);
            if let Some(&(t, b)) = sq.development.iter().find(|&&(t, b)| mesh.contains(t, q - b, 1e-12)) {
                out.push(SurfacePoint { tri: t, pos: q - b });
            }
        }
    }
    out
}

/// Distance a vertical column `x0 < x < x1` can be extended beyond `y_from`
/// (upwards if `up`) before meeting a vertex, capped at `cap`.
fn column_extent(mesh: &Mesh, anchor: SurfacePoint, x0: f64, x1: f64, y_from: f64, up: bool, cap: f64) -> f64 {
    let sgn = if up { 1.0 } else { -1.0 };
    let mut best = cap;
    let key = |t: usize, b: Vec2| (t, (b.x * 1e8).round() as i64, (b.y * 1e8).round() as i64);
    let base0 = -anchor.pos;
    let mut visited = HashSet::new();
    visited.insert(key(anchor.tri, base0));
    let mut stack = vec![(anchor.tri, base0)];
    while let Some((t, base)) = stack.pop() {
        if visited.len() > DEVELOPMENT_CAP {
            return 0.0;
        }
        let cs = mesh.corners(t);
        for &c in &cs {
            let q = base + c;
            let d = sgn * (q.y - y_from);
            if q.x > x0 + TOL && q.x < x1 - TOL && d > TOL {
                best = best.min(d);
            }
        }
        let region = if up {
            Rect { x0, x1, y0: -y_from.abs(), y1: y_from + best }
        } else {
            Rect { x0, x1, y0: y_from - best, y1: y_from.abs() }
        };
        for i in 0..3 {
            let a = base + cs[i];
            let b = base + cs[(i + 1) % 3];
            if clip_open(a, b, &region, TOL).is_none() {
                continue;
            }
            let g = mesh.twin(3 * t + i);
            let nb = b - mesh.start_of(g);
            if visited.insert(key(tri_of(g), nb)) {
                stack.push((tri_of(g), nb));
            }
        }
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct ReachWitness {
    /// Which square anchors the witness rectangle (0 for A, 1 for B).
    pub around: usize,
    pub rect: Rect,
}

/// Searches for a rectangle from which every sample point of both squares
/// is `k`-visible. Candidates: the bounding box of both squares (when
/// `offset`, the developed vector from A's anchor to B's, is known), each
/// square itself, and each square extended vertically until it meets a
/// vertex.
pub fn k_reachable(
    mesh: &Mesh,
    a: &EmbeddedSquare,
    b: &EmbeddedSquare,
    k: f64,
    samples: usize,
    offset: Option<Vec2>,
) -> Option<ReachWitness> {
    let cone = cone_vertices(mesh);
    let n = (samples as f64).sqrt().ceil().max(1.0) as usize;
    let pts = [square_samples(mesh, a, n), square_samples(mesh, b, n)];
    let sqs = [a, b];
    let sees_all = |anchor: SurfacePoint, rect: &Rect| -> bool {
        let Ok(dev) = develop(mesh, anchor, rect, &cone) else { return false };
        let max = k * rect.height();
        pts.iter().flatten().all(|&p| vertical_reach(mesh, p, &dev, rect, max).is_some())
    };
    if let Some(d) = offset {
        let r = a.rect().union(&b.rect().shifted(d));
        if sees_all(a.anchor, &r) {
            return Some(ReachWitness { around: 0, rect: r });
        }
    }
    for (i, s) in sqs.iter().enumerate() {
        if sees_all(s.anchor, &s.rect()) {
            return Some(ReachWitness { around: i, rect: s.rect() });
        }
    }
    for (i, s) in sqs.iter().enumerate() {
        let r0 = s.rect();
        let cap = 4.0 * k.max(1.0) * s.side;
        let up = column_extent(mesh, s.anchor, r0.x0, r0.x1, r0.y1, true, cap);
        let down = column_extent(mesh, s.anchor, r0.x0, r0.x1, r0.y0, false, cap);
        let r = Rect { y0: r0.y0 - down, y1: r0.y1 + up, ..r0 };
        if sees_all(s.anchor, &r) {
            return Some(ReachWitness { around: i, rect: r });
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct NetworkOptions {
    pub eps: f64,
    pub delta: f64,
    pub k: f64,
    /// Coverage samples.
    pub samples: usize,
    /// Sample points per square for reachability.
    pub reach_samples: usize,
    /// Coverage segments have length `k_prime · eps`.
    pub k_prime: f64,
    /// Largest number of connections tried for a separating system.
    pub l3_subset: usize,
    pub seed: u64,
}

impl Default for NetworkOptions {
    fn default() -> Self {
        NetworkOptions { eps: 0.05, delta: 0.2, k: 2.0, samples: 10_000, reach_samples: 16, k_prime: 10.0, l3_subset: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SquareRole {
    /// At the circumcenter of a medium or large triangle.
    Central { triangle: usize },
    /// At the midpoint of a long edge (one square per edge, shared by its
    /// two triangles).
    Edge { halfedge: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct NetworkSquare {
    pub role: SquareRole,
    /// Triangle whose frame holds `local`.
    pub home: usize,
    pub local: Vec2,
    pub square: EmbeddedSquare,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageWitness {
    pub point: SurfacePoint,
    pub up: bool,
    /// Distance along the vertical ray where the sub-segment starts.
    pub offset: f64,
    pub length: f64,
    pub triangle: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NetworkReport {
    pub eps: f64,
    pub delta: f64,
    pub k: f64,
    pub n_triangles: usize,
    pub l3: f64,
    pub l3_exact: bool,
    pub squares: Vec<NetworkSquare>,
    pub edges: Vec<(usize, usize)>,
    pub components: usize,
    pub connected: bool,
    pub coverage: f64,
    pub samples: usize,
    /// A few sampled points without a coverage witness.
    pub uncovered: Vec<SurfacePoint>,
    /// Witnesses for the first covered samples.
    pub witnesses: Vec<CoverageWitness>,
}

impl NetworkReport {
    /// Errors for a disconnected graph or coverage below `min_coverage`.
    pub fn check(&self, min_coverage: f64) -> Result<()> {
        if !self.connected {
            return Err(Error::NotConnected { components: self.components });
        }
        if self.coverage < min_coverage {
            return Err(Error::CoverageGap { uncovered: self.samples - (self.coverage * self.samples as f64).round() as usize, samples: self.samples });
        }
        Ok(())
    }
}

/// Surface point at `local` in the frame of triangle `home`, reached by a
/// straight segment from the centroid.
fn locate(mesh: &Mesh, home: usize, local: Vec2) -> Result<SurfacePoint> {
    if mesh.contains(home, local, 0.0) {
        return Ok(SurfacePoint { tri: home, pos: local });
    }
    let c = mesh.corners(home);
    let g = (c[0] + c[1] + c[2]) * (1.0 / 3.0);
    let d = local - g;
    let r = cast_ray(mesh, SurfacePoint { tri: home, pos: g }, d, d.norm());
    if let Some((vertex, _)) = r.hit {
        return Err(Error::SingularityInInterior { vertex });
    }
    Ok(r.end)
}

/// Largest square of side `side / 2^k` at the point that is embedded and
/// free of cone points.
fn fit_square(mesh: &Mesh, home: usize, local: Vec2, side: f64) -> Result<EmbeddedSquare> {
    let anchor = locate(mesh, home, local)?;
    let mut s = side;
    for _ in 0..40 {
        match embed_square(mesh, anchor, s) {
            Ok(sq) if sq.embedded => return Ok(sq),
            Ok(_) | Err(Error::SingularityInInterior { .. }) => s /= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::HypothesisFailure("no embedded square fits".into()))
}

/// Position of triangle `tri_of(twin(h))`'s corner 0 in the frame of `tri_of(h)`.
fn neighbor_offset(mesh: &Mesh, h: usize) -> Vec2 {
    let g = mesh.twin(h);
    mesh.start_of(h) + mesh.vec(h) - mesh.start_of(g)
}

/// Central squares for medium and large triangles, midpoint squares for
/// long edges, their reachability graph and the vertical coverage of the
/// surface. `mesh` must be a Delaunay triangulation of `surface`.
pub fn build_network(surface: &FlatSurface, mesh: &Mesh, opts: &NetworkOptions) -> Result<NetworkReport> {
    let (eps, delta) = (opts.eps, opts.delta);
    let cls = classify(mesh, eps, delta);
    if cls.hypothesis_failure {
        return Err(Error::HypothesisFailure(format!("edge lengths fall in [{eps}, {delta}) or 2ε ≥ δ")));
    }
    let sep = l3(surface, Norm::Euclid, 2.0 * delta * (1.0 + 1e-9), opts.l3_subset)?;
    if sep.exact && sep.value <= 2.0 * delta {
        return Err(Error::HypothesisFailure(format!("separating system of length {} ≤ 2δ", sep.value)));
    }
    let mut squares: Vec<NetworkSquare> = Vec::new();
    for t in 0..mesh.n_triangles() {
        if !matches!(cls.triangles[t], TriangleClass::Medium | TriangleClass::Large) {
            continue;
        }
        let c = mesh.corners(t);
        let cc = circumcenter(c[0], c[1], c[2]);
        let r = (c[0] - cc).norm();
        let side = delta.min(std::f64::consts::SQRT_2 * r) * (1.0 - 1e-9);
        let square = fit_square(mesh, t, cc, side)?;
        squares.push(NetworkSquare { role: SquareRole::Central { triangle: t }, home: t, local: cc, square });
    }
    for h in mesh.edges() {
        if mesh.edge_length(h) < delta {
            continue;
        }
        let t = tri_of(h);
        let m = mesh.start_of(h) + mesh.vec(h) * 0.5;
        let square = fit_square(mesh, t, m, delta / 2.0)?;
        squares.push(NetworkSquare { role: SquareRole::Edge { halfedge: h }, home: t, local: m, square });
    }
    // candidate pairs: same or adjacent home triangles
    let mut pairs: Vec<(usize, usize, Vec<Vec2>)> = Vec::new();
    for i in 0..squares.len() {
        for j in i + 1..squares.len() {
            let (a, b) = (&squares[i], &squares[j]);
            let mut offs = Vec::new();
            if a.home == b.home {
                offs.push(b.local - a.local);
            }
            for k in 0..3 {
                let h = 3 * a.home + k;
                if tri_of(mesh.twin(h)) == b.home {
                    offs.push(neighbor_offset(mesh, h) + b.local - a.local);
                }
            }
            if !offs.is_empty() {
                pairs.push((i, j, offs));
            }
        }
    }
    let edges: Vec<(usize, usize)> = pairs
        .par_iter()
        .filter(|(i, j, offs)| {
            offs.iter().any(|&d| k_reachable(mesh, &squares[*i].square, &squares[*j].square, opts.k, opts.reach_samples, Some(d)).is_some())
        })
        .map(|(i, j, _)| (*i, *j))
        .collect();
    let components = count_components(squares.len(), &edges);
    let (coverage, uncovered, witnesses) = coverage(mesh, &cls.triangles, eps, opts.k_prime, opts.samples, opts.seed);
    Ok(NetworkReport {
        eps,
        delta,
        k: opts.k,
        n_triangles: mesh.n_triangles(),
        l3: sep.value,
        l3_exact: sep.exact,
        squares,
        edges,
        components,
        connected: components <= 1,
        coverage,
        samples: opts.samples,
        uncovered,
        witnesses,
    })
}

fn count_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps
}

/// A vertical segment of length `k_prime · eps` from the point (either
/// orientation) with a piece of length at least `eps` inside one medium or
/// large triangle.
pub fn coverage_witness(mesh: &Mesh, classes: &[TriangleClass], p: SurfacePoint, eps: f64, k_prime: f64) -> Option<CoverageWitness> {
    for up in [true, false] {
        let trace = cast_vertical_ray(mesh, p, k_prime * eps, up);
        let mut along = 0.0;
        for piece in &trace.pieces {
            let len = piece.length();
            if len >= eps && matches!(classes[piece.tri], TriangleClass::Medium | TriangleClass::Large) {
                return Some(CoverageWitness { point: p, up, offset: along, length: len, triangle: piece.tri });
            }
            along += len;
        }
    }
    None
}

fn coverage(
    mesh: &Mesh,
    classes: &[TriangleClass],
    eps: f64,
    k_prime: f64,
    samples: usize,
    seed: u64,
) -> (f64, Vec<SurfacePoint>, Vec<CoverageWitness>) {
    const CHUNK: usize = 256;
    let chunks = samples.div_ceil(CHUNK);
    let results: Vec<(usize, Vec<SurfacePoint>, Vec<CoverageWitness>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut hit = 0;
            let mut miss = Vec::new();
            let mut wit = Vec::new();
            for _ in 0..n {
                let p = mesh.sample_point(&mut rng);
                match coverage_witness(mesh, classes, p, eps, k_prime) {
                    Some(w) => {
                        hit += 1;
                        if wit.len() < 4 {
                            wit.push(w);
                        }
                    }
                    None => miss.push(p),
                }
            }
            (hit, miss, wit)
        })
        .collect();
    let hits: usize = results.iter().map(|r| r.0).sum();
    let uncovered = results.iter().flat_map(|r| r.1.iter().copied()).take(20).collect();
    let witnesses = results.iter().flat_map(|r| r.2.iter().cloned()).take(20).collect();
    (if samples == 0 { 1.0 } else { hits as f64 / samples as f64 }, uncovered, witnesses)
}
