//! Flat cylinders crossed by long Delaunay edges.

use crate::connections::enumerate_connections;
use crate::geom::{circumcenter, Norm, Vec2};
use crate::kernel::mesh::{tri_of, Mesh, SurfacePoint};
use crate::kernel::ray::cast_ray;
use serde::Serialize;
use std::collections::HashSet;

/// Default modulus threshold.
pub const DEFAULT_MODULUS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cylinder {
    /// Holonomy of a core curve, oriented to cross the edge from right to left.
    pub core_holonomy: Vec2,
    pub height: f64,
    pub circumference: f64,
    pub modulus: f64,
    /// Circumdiameter of the triangle owning the edge.
    pub circumdiameter: f64,
    pub edge_length: f64,
}

fn circumdiameter(mesh: &Mesh, t: usize) -> f64 {
    let c = mesh.corners(t);
    2.0 * (c[0] - circumcenter(c[0], c[1], c[2])).norm()
}

/// First return of the leaf through `p` (given on edge `h`) in direction
/// `dir`, if it closes up before `max_len` without meeting a singularity.
fn closed_leaf_length(mesh: &Mesh, h: usize, dir: Vec2, max_len: f64) -> Option<f64> {
    let g = mesh.twin(h);
    let reps = [
        (tri_of(h), mesh.start_of(h) + mesh.vec(h) * 0.5),
        (tri_of(g), mesh.start_of(g) + mesh.vec(g) * 0.5),
    ];
    let start = SurfacePoint { tri: reps[0].0, pos: reps[0].1 };
    let trace = cast_ray(mesh, start, dir, max_len);
    let tol = 1e-9 * max_len.max(1.0);
    let mut along = 0.0;
    for piece in &trace.pieces {
        for &(t, p) in &reps {
            if piece.tri != t {
                continue;
            }
            let seg = piece.to - piece.from;
            let off = p - piece.from;
            let len = seg.norm();
            if len == 0.0 {
                continue;
            }
            let s = off.dot(seg) / len;
            if s < -tol || s > len + tol || (seg.cross(off) / len).abs() > tol {
                continue;
            }
            let w = along + s;
            if w > tol {
                return Some(w);
            }
        }
        along += piece.length();
    }
    None
}

/// Height of the cylinder of closed leaves of direction `u` (unit) and
/// length `w` through the midpoint of `h`: develop the strip around the
/// leaf until singularities bound it on both sides.
fn cylinder_height(mesh: &Mesh, h: usize, u: Vec2, w: f64) -> Option<f64> {
    let n = u.perp();
    let t0 = tri_of(h);
    let p0 = mesh.start_of(h) + mesh.vec(h) * 0.5;
    let tol = 1e-9 * w.max(1.0);
    let half = 0.5 * w + tol;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let key = |t: usize, b: Vec2| (t, (b.x * 1e7).round() as i64, (b.y * 1e7).round() as i64);
    let mut visited = HashSet::new();
    let base0 = -p0;
    visited.insert(key(t0, base0));
    let mut stack = vec![(t0, base0)];
    while let Some((t, base)) = stack.pop() {
        if visited.len() > 200_000 {
            return None;
        }
        let cs = mesh.corners(t);
        for c in cs {
            let q = base + c;
            let (a, s) = (q.dot(u), q.dot(n));
            if a.abs() > half {
                continue;
            }
            if s.abs() <= tol {
                return None;
            }
            if s > 0.0 {
                hi = hi.min(s);
            } else {
                lo = lo.max(s);
            }
        }
        for i in 0..3 {
            let a = base + cs[i];
            let b = base + cs[(i + 1) % 3];
            // clip the edge to the window |a| <= w/2 and check it meets lo < s < hi
            let (pa, pb) = ((a.dot(u), a.dot(n)), (b.dot(u), b.dot(n)));
            let Some((s0, s1)) = clip(pa, pb, half) else { continue };
            let (smin, smax) = if s0 < s1 { (s0, s1) } else { (s1, s0) };
            if smin >= hi - tol || smax <= lo + tol {
                continue;
            }
            let g = mesh.twin(3 * t + i);
            let nb = b - mesh.start_of(g);
            if visited.insert(key(tri_of(g), nb)) {
                stack.push((tri_of(g), nb));
            }
        }
    }
    (lo.is_finite() && hi.is_finite()).then_some(hi - lo)
}

/// Normal coordinates at the ends of the part of segment `pa pb` (given as
/// (along, normal)) with `|along| <= half`.
fn clip(pa: (f64, f64), pb: (f64, f64), half: f64) -> Option<(f64, f64)> {
    let (a0, a1) = (pa.0, pb.0);
    let da = a1 - a0;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    if da.abs() < 1e-300 {
        if a0.abs() > half {
            return None;
        }
    } else {
        let (ta, tb) = ((-half - a0) / da, (half - a0) / da);
        let (ta, tb) = if ta < tb { (ta, tb) } else { (tb, ta) };
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return None;
        }
    }
    let s = |t: f64| pa.1 + t * (pb.1 - pa.1);
    Some((s(t0), s(t1)))
}

/// The maximal cylinder of modulus above `mu` crossed by edge `h` whose core
/// is the shortest such closed geodesic. Edges of length at most
/// `√(2/π)·√area` give `None`.
pub fn detect_cylinder(mesh: &Mesh, h: usize, mu: f64) -> Option<Cylinder> {
    let len = mesh.edge_length(h);
    let scale = mesh.area().sqrt();
    if len <= (2.0 / std::f64::consts::PI).sqrt() * scale {
        return None;
    }
    let d = circumdiameter(mesh, tri_of(h));
    // a cylinder of modulus > mu inside the circumdisk has circumference < d/mu
    let bound = d.max(len) / mu;
    let conns = enumerate_connections(mesh, bound, Norm::Euclid).ok()?;
    let e = mesh.vec(h);
    let mut dirs: Vec<Vec2> = Vec::new();
    for c in &conns {
        let mut u = c.holonomy.normalized();
        let x = e.normalized().cross(u);
        if x.abs() < 1e-9 {
            continue;
        }
        if x < 0.0 {
            u = -u;
        }
        if !dirs.iter().any(|v| v.approx_eq(u, 1e-12)) {
            dirs.push(u);
        }
    }
    let mut best: Option<Cylinder> = None;
    for u in dirs {
        let Some(w) = closed_leaf_length(mesh, h, u, bound * (1.0 + 1e-9)) else { continue };
        if best.as_ref().is_some_and(|b| b.circumference <= w) {
            continue;
        }
        let Some(height) = cylinder_height(mesh, h, u, w) else { continue };
        let modulus = height / w;
        if modulus > mu {
            best = Some(Cylinder { core_holonomy: u * w, height, circumference: w, modulus, circumdiameter: d, edge_length: len });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::delaunay_triangulate;
    use crate::kernel::surface::square_torus;

    #[test]
    fn short_edges_give_nothing() {
        let s = square_torus().apply_flow(-5.0);
        let m = s.mesh();
        let h = m.edges().find(|&h| m.edge_length(h) < 0.1).unwrap();
        assert!(detect_cylinder(m, h, 2.0).is_none());
    }

    #[test]
    fn flowed_torus_cylinder() {
        let s = square_torus().apply_flow(-5.0);
        let tri = delaunay_triangulate(&s).unwrap();
        let m = &tri.mesh;
        let (a, b) = ((-2.5f64).exp(), 2.5f64.exp());
        let mut found = 0;
        for h in m.edges() {
            if let Some(c) = detect_cylinder(m, h, 2.0) {
                assert!((c.circumference - a).abs() < 1e-9, "{c:?}");
                assert!((c.height - b).abs() < 1e-9, "{c:?}");
                assert!(c.core_holonomy.y.abs() < 1e-9);
                found += 1;
            }
        }
        assert!(found > 0);
    }
}
