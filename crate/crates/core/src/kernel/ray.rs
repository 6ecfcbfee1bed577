//! Straight-line flow on a triangulated surface.

use super::mesh::{tri_of, Mesh, SurfacePoint};
use crate::geom::{ray_segment, Vec2, TOL};
use serde::Serialize;

/// Horizontal nudge applied when an edge crossing cannot be decided.
pub const PERTURBATION: f64 = 1e-12;

/// The part of a ray inside one triangle, in that triangle's local frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayPiece {
    pub tri: usize,
    pub from: Vec2,
    pub to: Vec2,
    /// Half-edge the ray leaves through, `None` for the last piece.
    pub exit: Option<usize>,
}

impl RayPiece {
    pub fn length(&self) -> f64 {
        (self.to - self.from).norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayTrace {
    pub pieces: Vec<RayPiece>,
    pub end: SurfacePoint,
    /// Distance travelled.
    pub length: f64,
    /// Vertex class hit before the requested length, with distance.
    pub hit: Option<(usize, f64)>,
    /// Number of perturbations applied to resolve ambiguous crossings.
    pub perturbations: usize,
}

impl RayTrace {
    /// Half-edges crossed, in order.
    pub fn crossings(&self) -> impl Iterator<Item = usize> + '_ {
        self.pieces.iter().filter_map(|p| p.exit)
    }
}

enum Step {
    Exit { s: f64, u: f64, h: usize },
    Vertex { s: f64, v: usize },
    Inside,
}

fn step(mesh: &Mesh, tri: usize, pos: Vec2, d: Vec2, remaining: f64) -> Option<Step> {
    let c = mesh.corners(tri);
    let mut best: Option<(f64, f64, usize)> = None;
    for i in 0..3 {
        let e = mesh.vec(3 * tri + i);
        if d.cross(e) <= 0.0 {
            continue;
        }
        if let Some((s, u)) = ray_segment(pos, d, c[i], c[(i + 1) % 3]) {
            let slack = 1e-12 * (1.0 + e.norm());
            if s >= -slack && (-slack..=1.0 + slack).contains(&u) && best.is_none_or(|b| s < b.0) {
                best = Some((s.max(0.0), u.clamp(0.0, 1.0), 3 * tri + i));
            }
        }
    }
    let reach = best.map_or(remaining, |b| b.0.min(remaining));
    // corners passed within tolerance
    for (k, &ck) in c.iter().enumerate() {
        let rel = ck - pos;
        let s = rel.dot(d);
        if s > TOL && s <= reach + TOL && d.cross(rel).abs() <= TOL {
            return Some(Step::Vertex { s, v: mesh.origin(3 * tri + k) });
        }
    }
    match best {
        Some((s, _, _)) if s >= remaining => Some(Step::Inside),
        Some((s, u, h)) => Some(Step::Exit { s, u, h }),
        None => None,
    }
}

fn at_vertex(mesh: &Mesh, p: SurfacePoint) -> bool {
    mesh.corners(p.tri).iter().any(|&c| (c - p.pos).norm() <= TOL)
}

/// Flows from `start` in direction `dir` for `length`, stopping early at a
/// vertex of the mesh.
pub fn cast_ray(mesh: &Mesh, start: SurfacePoint, dir: Vec2, length: f64) -> RayTrace {
    let d = dir.normalized();
    let mut perturbations = 0;
    let mut pt = mesh.normalize_point(start).unwrap_or(start);
    while at_vertex(mesh, pt) && perturbations < 8 {
        pt.pos.x += PERTURBATION;
        pt = mesh.normalize_point(pt).unwrap_or(pt);
        perturbations += 1;
    }
    let mut pieces = Vec::new();
    let mut travelled = 0.0;
    let mut guard = 0usize;
    loop {
        let remaining = length - travelled;
        match step(mesh, pt.tri, pt.pos, d, remaining) {
            Some(Step::Inside) => {
                let to = pt.pos + d * remaining;
                pieces.push(RayPiece { tri: pt.tri, from: pt.pos, to, exit: None });
                return RayTrace {
                    pieces,
                    end: SurfacePoint { tri: pt.tri, pos: to },
                    length,
                    hit: None,
                    perturbations,
                };
            }
            Some(Step::Vertex { s, v }) => {
                let to = pt.pos + d * s;
                pieces.push(RayPiece { tri: pt.tri, from: pt.pos, to, exit: None });
                return RayTrace {
                    pieces,
                    end: SurfacePoint { tri: pt.tri, pos: to },
                    length: travelled + s,
                    hit: Some((v, travelled + s)),
                    perturbations,
                };
            }
            Some(Step::Exit { s, u, h }) => {
                let to = pt.pos + d * s;
                pieces.push(RayPiece { tri: pt.tri, from: pt.pos, to, exit: Some(h) });
                travelled += s;
                let g = mesh.twin(h);
                pt = SurfacePoint { tri: tri_of(g), pos: mesh.start_of(g) + mesh.vec(g) * (1.0 - u) };
            }
            None => {
                pt.pos.x += PERTURBATION;
                pt = mesh.normalize_point(pt).unwrap_or(pt);
                perturbations += 1;
            }
        }
        guard += 1;
        if guard > 100_000_000 {
            // pathological loop on a broken mesh; report as a stop at the current point
            return RayTrace { pieces, end: pt, length: travelled, hit: None, perturbations };
        }
    }
}

/// Vertical flow, upwards or downwards.
pub fn cast_vertical_ray(mesh: &Mesh, start: SurfacePoint, length: f64, up: bool) -> RayTrace {
    let d = if up { Vec2::new(0.0, 1.0) } else { Vec2::new(0.0, -1.0) };
    cast_ray(mesh, start, d, length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::surface::square_torus;

    #[test]
    fn unit_torus_wraps_once() {
        let t = square_torus();
        let p = t.point(0, Vec2::new(0.3, 0.4)).unwrap();
        let r = cast_vertical_ray(t.mesh(), p, 1.0, true);
        assert!(r.hit.is_none());
        let (_, xy) = t.polygon_coords(r.end).unwrap();
        assert!(xy.approx_eq(Vec2::new(0.3, 0.4), 1e-12));
        let total: f64 = r.pieces.iter().map(|p| p.length()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hits_cone_point_above() {
        let t = square_torus();
        let p = t.point(0, Vec2::new(0.0, 0.75)).unwrap();
        let r = cast_vertical_ray(t.mesh(), p, 1.0, true);
        let (v, at) = r.hit.unwrap();
        assert_eq!(v, 0);
        assert!((at - 0.25).abs() < 1e-9);
    }

    #[test]
    fn split_ray_matches() {
        let t = square_torus();
        let p = t.point(0, Vec2::new(0.123, 0.456)).unwrap();
        let d = Vec2::new(0.3, 1.0);
        let whole = cast_ray(t.mesh(), p, d, 7.0);
        let a = cast_ray(t.mesh(), p, d, 3.0);
        let b = cast_ray(t.mesh(), a.end, d, 4.0);
        let joined: Vec<usize> = a.crossings().chain(b.crossings()).collect();
        let direct: Vec<usize> = whole.crossings().collect();
        assert_eq!(joined, direct);
        assert!(whole.end.pos.approx_eq(b.end.pos, 1e-9));
    }
}
