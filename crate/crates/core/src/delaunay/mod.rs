//! Delaunay triangulations by edge flips, edge and triangle classes, and
//! cylinders crossed by long edges.

mod cylinder;

pub use cylinder::{detect_cylinder, Cylinder, DEFAULT_MODULUS};

use crate::error::{Error, Result};
use crate::geom::{circumcenter, point_segment_distance, Vec2};
use crate::kernel::mesh::{next, prev, tri_of, Mesh};
use crate::kernel::surface::FlatSurface;
use serde::Serialize;
use std::collections::HashSet;
use std::f64::consts::PI;

/// Slack on the opposite-angle test; co-circular edges within it are kept.
pub const ANGLE_SLACK: f64 = 1e-9;

/// Default cap on the number of flips.
pub const DEFAULT_FLIP_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct Triangulation {
    pub mesh: Mesh,
    pub flips: usize,
}

/// Flips non-Delaunay edges until none is left. `on_flip` sees every flipped
/// half-edge, so that parallel meshes can be kept in step.
pub fn flip_to_delaunay(mesh: &mut Mesh, cap: usize, mut on_flip: impl FnMut(usize)) -> Result<usize> {
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(mesh.fingerprint());
    let mut flips = 0;
    let mut queue: Vec<usize> = mesh.edges().collect();
    let mut queued = vec![false; mesh.n_halfedges()];
    for &h in &queue {
        queued[h] = true;
    }
    queue.reverse();
    while let Some(h) = queue.pop() {
        queued[h] = false;
        if mesh.opposite_angle_sum(h) <= PI + ANGLE_SLACK || !mesh.is_flippable(h) {
            continue;
        }
        if flips >= cap {
            return Err(Error::FlipBudgetExceeded(cap));
        }
        mesh.flip(h);
        on_flip(h);
        flips += 1;
        if !seen.insert(mesh.fingerprint()) {
            return Err(Error::FlipCycle);
        }
        let g = mesh.twin(h);
        for k in [next(h), prev(h), next(g), prev(g)] {
            let r = k.min(mesh.twin(k));
            if !queued[r] {
                queued[r] = true;
                queue.push(r);
            }
        }
    }
    Ok(flips)
}

pub fn delaunay_triangulate(surface: &FlatSurface) -> Result<Triangulation> {
    let mut mesh = surface.mesh().clone();
    let flips = flip_to_delaunay(&mut mesh, DEFAULT_FLIP_BUDGET, |_| {})?;
    Ok(Triangulation { mesh, flips })
}

/// Every edge satisfies the opposite-angle condition.
pub fn is_locally_delaunay(mesh: &Mesh) -> bool {
    mesh.edges().all(|h| mesh.opposite_angle_sum(h) <= PI + ANGLE_SLACK)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskViolation {
    pub triangle: usize,
    pub vertex: usize,
    /// Distance from the circumcenter minus the circumradius (negative).
    pub depth: f64,
}

/// Empty-circumdisk check by developing the surface across every edge that
/// meets the open circumdisk. Returns all singularities found strictly
/// inside, with the given margin.
pub fn circumdisk_violations(mesh: &Mesh, margin: f64) -> Vec<DiskViolation> {
    let mut out = Vec::new();
    for t in 0..mesh.n_triangles() {
        let c = mesh.corners(t);
        let center = circumcenter(c[0], c[1], c[2]);
        let r = (c[0] - center).norm();
        let inner = r - margin * r.max(1.0);
        let key = |tri: usize, p: Vec2| (tri, (p.x * 1e7).round() as i64, (p.y * 1e7).round() as i64);
        let mut visited = HashSet::new();
        visited.insert(key(t, c[0]));
        // developed triangles as (triangle, position of corner 0)
        let mut stack = vec![(t, c[0])];
        let mut guard = 0;
        while let Some((tri, base)) = stack.pop() {
            guard += 1;
            if guard > 100_000 {
                break;
            }
            let cs = mesh.corners(tri);
            for i in 0..3 {
                let a = base + cs[i];
                let b = base + cs[(i + 1) % 3];
                if point_segment_distance(center, a, b) >= inner {
                    continue;
                }
                let h = 3 * tri + i;
                let g = mesh.twin(h);
                let nt = tri_of(g);
                // g runs from b to a in the developed picture
                let nbase = b - mesh.start_of(g);
                let apex = nbase + mesh.corners(nt)[(g % 3 + 2) % 3];
                let d = (apex - center).norm();
                if d < inner {
                    out.push(DiskViolation { triangle: t, vertex: mesh.origin(prev(g)), depth: d - r });
                    continue;
                }
                if visited.insert(key(nt, nbase)) {
                    stack.push((nt, nbase));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    Short,
    Long,
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleClass {
    Small,
    Medium,
    Large,
    /// Neither of the above, or containing an intermediate edge.
    Flagged,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub eps: f64,
    pub delta: f64,
    /// Per half-edge (both halves of an edge agree).
    pub edges: Vec<EdgeClass>,
    pub triangles: Vec<TriangleClass>,
    /// Set when an intermediate edge exists or `2ε < δ` fails.
    pub hypothesis_failure: bool,
}

pub fn classify_edge(len: f64, eps: f64, delta: f64) -> EdgeClass {
    if len < eps {
        EdgeClass::Short
    } else if len >= delta {
        EdgeClass::Long
    } else {
        EdgeClass::Intermediate
    }
}

pub fn classify_triangle(e: [EdgeClass; 3]) -> TriangleClass {
    let short = e.iter().filter(|&&c| c == EdgeClass::Short).count();
    let long = e.iter().filter(|&&c| c == EdgeClass::Long).count();
    match (short, long) {
        (3, 0) => TriangleClass::Small,
        (1, 2) => TriangleClass::Medium,
        (0, 3) => TriangleClass::Large,
        _ => TriangleClass::Flagged,
    }
}

pub fn classify(mesh: &Mesh, eps: f64, delta: f64) -> Classification {
    let edges: Vec<EdgeClass> = (0..mesh.n_halfedges()).map(|h| classify_edge(mesh.edge_length(h), eps, delta)).collect();
    let triangles: Vec<TriangleClass> =
        (0..mesh.n_triangles()).map(|t| classify_triangle([edges[3 * t], edges[3 * t + 1], edges[3 * t + 2]])).collect();
    let hypothesis_failure = !(2.0 * eps < delta) || edges.contains(&EdgeClass::Intermediate);
    Classification { eps, delta, edges, triangles, hypothesis_failure }
}

/// Worst value of `area / δ⁴` over triangles with all edges at least `δ`.
pub fn large_triangle_constant(mesh: &Mesh, delta: f64) -> Option<f64> {
    (0..mesh.n_triangles())
        .filter(|&t| (0..3).all(|i| mesh.edge_length(3 * t + i) >= delta))
        .map(|t| mesh.triangle_area(t) / delta.powi(4))
        .min_by(f64::total_cmp)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExportTriangle {
    pub corners: [[f64; 2]; 3],
    pub vertices: [usize; 3],
    /// Neighbouring triangle across each edge.
    pub neighbors: [usize; 3],
}

/// Triangles in their local developed coordinates with adjacency.
pub fn export(mesh: &Mesh) -> Vec<ExportTriangle> {
    (0..mesh.n_triangles())
        .map(|t| {
            let c = mesh.corners(t);
            ExportTriangle {
                corners: [[c[0].x, c[0].y], [c[1].x, c[1].y], [c[2].x, c[2].y]],
                vertices: mesh.corner_vertices(t),
                neighbors: [0, 1, 2].map(|i| tri_of(mesh.twin(3 * t + i))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::surface::{lattice_torus, square_torus};

    #[test]
    fn square_torus_is_already_delaunay() {
        let t = delaunay_triangulate(&square_torus()).unwrap();
        assert_eq!(t.flips, 0);
        assert_eq!(t.mesh.n_triangles(), 2);
        assert!(circumdisk_violations(&t.mesh, 1e-9).is_empty());
    }

    #[test]
    fn sheared_torus_flips() {
        let s = lattice_torus(Vec2::new(1.0, 0.0), Vec2::new(3.3, 1.0)).unwrap();
        assert!(!is_locally_delaunay(s.mesh()));
        assert!(!circumdisk_violations(s.mesh(), 1e-9).is_empty());
        let t = delaunay_triangulate(&s).unwrap();
        assert!(t.flips > 0);
        assert!(is_locally_delaunay(&t.mesh));
        assert!(circumdisk_violations(&t.mesh, 1e-9).is_empty());
        assert!((t.mesh.area() - s.area()).abs() < 1e-9);
    }

    #[test]
    fn classes() {
        let (e, d) = (0.1, 0.3);
        assert_eq!(classify_triangle([0.05, 0.3, 0.4].map(|l| classify_edge(l, e, d))), TriangleClass::Medium);
        assert_eq!(classify_triangle([0.5, 0.3, 0.4].map(|l| classify_edge(l, e, d))), TriangleClass::Large);
        assert_eq!(classify_triangle([0.2, 0.3, 0.4].map(|l| classify_edge(l, e, d))), TriangleClass::Flagged);
        let c = classify(square_torus().mesh(), 0.1, 0.3);
        assert!(c.triangles.iter().all(|&t| t == TriangleClass::Large));
        assert!(!c.hypothesis_failure);
    }
}
