//! Saddle connections by development of visibility wedges.

use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, Norm, Vec2, ANGLE_TOL};
use crate::kernel::mesh::{next, prev, tri_of, Mesh};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Default cap on developed triangles.
pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleConnection {
    pub start: usize,
    pub end: usize,
    pub holonomy: Vec2,
    /// Starting corner `(triangle, corner index)`.
    pub corner: (usize, usize),
    /// Half-edges crossed, each given in the triangle being left.
    pub path: Vec<usize>,
    /// Set when the connection is an edge of the triangulation.
    pub edge: Option<usize>,
    pub length: f64,
}

impl SaddleConnection {
    pub fn h(&self) -> f64 {
        self.holonomy.x
    }

    pub fn v(&self) -> f64 {
        self.holonomy.y
    }
}

struct Node {
    h: usize,
    parent: usize,
}

const ROOT: usize = usize::MAX;

fn collect_path(arena: &[Node], mut i: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while i != ROOT {
        out.push(arena[i].h);
        i = arena[i].parent;
    }
    out.reverse();
    out
}

#[inline]
fn strictly_left(a: Vec2, b: Vec2) -> bool {
    a.cross(b) > ANGLE_TOL * a.norm() * b.norm()
}

fn from_corner(
    mesh: &Mesh,
    t: usize,
    k: usize,
    radius: f64,
    budget: &AtomicUsize,
    cap: usize,
) -> Result<Vec<SaddleConnection>> {
    let mut out = Vec::new();
    let h0 = 3 * t + k;
    let start = mesh.origin(h0);
    let r = mesh.vec(h0);
    let l = -mesh.vec(prev(h0));
    if r.norm() <= radius {
        out.push(SaddleConnection {
            start,
            end: mesh.origin(next(h0)),
            holonomy: r,
            corner: (t, k),
            path: Vec::new(),
            edge: Some(h0),
            length: 0.0,
        });
    }
    let mut arena: Vec<Node> = Vec::new();
    // (crossed half-edge, developed start, developed end, right bound, left bound, arena index)
    let mut stack = vec![(next(h0), r, l, r, l, ROOT)];
    while let Some((h, a, b, wr, wl, parent)) = stack.pop() {
        if point_segment_distance(Vec2::ZERO, a, b) > radius {
            continue;
        }
        if budget.fetch_add(1, Ordering::Relaxed) >= cap {
            return Err(Error::BudgetExceeded { what: "developed triangles", cap });
        }
        arena.push(Node { h, parent });
        let me = arena.len() - 1;
        let g = mesh.twin(h);
        let c = a + mesh.vec(next(g));
        let right_of_r = !strictly_left(wr, c);
        let left_of_l = !strictly_left(c, wl);
        if !right_of_r && !left_of_l {
            if c.norm() <= radius {
                out.push(SaddleConnection {
                    start,
                    end: mesh.origin(prev(g)),
                    holonomy: c,
                    corner: (t, k),
                    path: collect_path(&arena, me),
                    edge: None,
                    length: 0.0,
                });
            }
            stack.push((next(g), a, c, wr, c, me));
            stack.push((prev(g), c, b, c, wl, me));
        } else if right_of_r {
            stack.push((prev(g), c, b, wr, wl, me));
        } else {
            stack.push((next(g), a, c, wr, wl, me));
        }
    }
    Ok(out)
}

/// All saddle connections of length at most `bound`, one per unoriented
/// segment with positively oriented holonomy, sorted by length.
pub fn enumerate_connections(mesh: &Mesh, bound: f64, norm: Norm) -> Result<Vec<SaddleConnection>> {
    enumerate_with_budget(mesh, bound, norm, DEFAULT_BUDGET)
}

pub fn enumerate_with_budget(mesh: &Mesh, bound: f64, norm: Norm, cap: usize) -> Result<Vec<SaddleConnection>> {
    let radius = norm.euclid_radius(bound) * (1.0 + 1e-12);
    let budget = AtomicUsize::new(0);
    let corners: Vec<(usize, usize)> = (0..mesh.n_triangles()).flat_map(|t| (0..3).map(move |k| (t, k))).collect();
    let parts: Vec<Result<Vec<SaddleConnection>>> =
        corners.par_iter().map(|&(t, k)| from_corner(mesh, t, k, radius, &budget, cap)).collect();
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
    }
    let tol = bound * 1e-12;
    let mut out: Vec<SaddleConnection> = all
        .into_iter()
        .filter(|c| c.holonomy.is_positive())
        .map(|mut c| {
            c.length = norm.length(c.holonomy);
            c
        })
        .filter(|c| c.length <= bound + tol)
        .collect();
    sort_connections(&mut out);
    Ok(out)
}

pub(crate) fn sort_connections(v: &mut [SaddleConnection]) {
    v.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then(a.holonomy.y.atan2(a.holonomy.x).total_cmp(&b.holonomy.y.atan2(b.holonomy.x)))
            .then(a.start.cmp(&b.start))
            .then(a.corner.cmp(&b.corner))
    });
}

/// Length of the shortest saddle connection.
pub fn l1(mesh: &Mesh, norm: Norm) -> Result<f64> {
    Ok(shortest(mesh, norm)?.length)
}

/// A shortest saddle connection. The shortest edge bounds the answer, so one
/// enumeration suffices.
pub fn shortest(mesh: &Mesh, norm: Norm) -> Result<SaddleConnection> {
    let bound = mesh.edges().map(|h| norm.length(mesh.vec(h))).fold(f64::INFINITY, f64::min);
    let all = enumerate_connections(mesh, bound, norm)?;
    Ok(all.into_iter().next().expect("the shortest edge is a saddle connection"))
}

/// Developed positions of the crossing points of a connection, as
/// parameters along the crossed half-edges.
pub fn crossing_params(mesh: &Mesh, c: &SaddleConnection) -> Vec<f64> {
    let (t, k) = c.corner;
    let mut s = mesh.vec(3 * t + k);
    let mut e = s + mesh.vec(3 * t + (k + 1) % 3);
    let mut out = Vec::with_capacity(c.path.len());
    for (i, &h) in c.path.iter().enumerate() {
        let u = crate::geom::ray_segment(Vec2::ZERO, c.holonomy, s, e).map_or(0.5, |x| x.1).clamp(0.0, 1.0);
        out.push(u);
        if let Some(&nh) = c.path.get(i + 1) {
            let g = mesh.twin(h);
            let apex = s + mesh.vec(next(g));
            if nh == next(g) {
                e = apex;
            } else {
                debug_assert_eq!(nh, prev(g));
                s = apex;
            }
        }
    }
    out
}

/// Triangle in which the connection ends and the local corner index of its
/// endpoint.
pub fn end_corner(mesh: &Mesh, c: &SaddleConnection) -> (usize, usize) {
    match (c.edge, c.path.last()) {
        (Some(h), _) => {
            let n = next(h);
            (tri_of(n), n % 3)
        }
        (None, Some(&h)) => {
            let g = mesh.twin(h);
            (tri_of(g), (g % 3 + 2) % 3)
        }
        (None, None) => unreachable!("connections cross at least one edge or are edges"),
    }
}
