//! The systolic lengths ℓ₂ (shortest essential closed curve) and ℓ₃
//! (shortest separating system), certified up to a cutoff.

use super::enumerate::{enumerate_connections, SaddleConnection};
use super::topology::Drawing;
use crate::error::{Error, Result};
use crate::geom::Norm;
use crate::kernel::surface::FlatSurface;
use serde::Serialize;

/// A length certified below the cutoff, or the cutoff as a lower bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certified {
    pub value: f64,
    pub exact: bool,
    pub witness: Vec<SaddleConnection>,
}

impl Certified {
    fn lower_bound(cutoff: f64) -> Self {
        Certified { value: cutoff, exact: false, witness: Vec::new() }
    }
}

/// Default maximal number of connections in a cycle for ℓ₂.
pub const DEFAULT_MAX_CYCLE: usize = 6;

/// Shortest closed curve made of saddle connections that does not bound a
/// disk. Cylinder core curves are covered because cylinder boundaries are
/// such cycles of the same length.
pub fn l2(surface: &FlatSurface, norm: Norm, cutoff: f64) -> Result<Certified> {
    l2_with(surface, norm, cutoff, DEFAULT_MAX_CYCLE)
}

pub fn l2_with(surface: &FlatSurface, norm: Norm, cutoff: f64, max_cycle: usize) -> Result<Certified> {
    let conns = enumerate_connections(surface.mesh(), cutoff, norm)?;
    let mesh = surface.mesh();
    let mut best: Option<(f64, Vec<usize>)> = None;
    // cycles as vertex walks; the first connection has the smallest index
    let mut path: Vec<usize> = Vec::new();
    let mut visited = vec![false; mesh.n_vertices()];
    fn dfs(
        conns: &[SaddleConnection],
        mesh: &crate::kernel::Mesh,
        first: usize,
        at: usize,
        home: usize,
        total: f64,
        cutoff: f64,
        max_cycle: usize,
        path: &mut Vec<usize>,
        visited: &mut Vec<bool>,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        for (i, c) in conns.iter().enumerate().skip(first + 1) {
            let bound = best.as_ref().map_or(cutoff, |b| b.0);
            if total + c.length > bound + 1e-12 {
                break;
            }
            let other = if c.start == at {
                c.end
            } else if c.end == at {
                c.start
            } else {
                continue;
            };
            if other != home && visited[other] {
                continue;
            }
            path.push(i);
            let fam: Vec<&SaddleConnection> = path.iter().map(|&j| &conns[j]).collect();
            let ok = Drawing::new(mesh, &fam).is_disjoint();
            if ok {
                if other == home {
                    let essential = path.len() <= 2 || !Drawing::new(mesh, &fam).bounds_disk();
                    if essential && best.as_ref().is_none_or(|b| total + c.length < b.0) {
                        *best = Some((total + c.length, path.clone()));
                    }
                } else if path.len() < max_cycle {
                    visited[other] = true;
                    dfs(conns, mesh, first, other, home, total + c.length, cutoff, max_cycle, path, visited, best);
                    visited[other] = false;
                }
            }
            path.pop();
        }
    }
    for (i, c) in conns.iter().enumerate() {
        let bound = best.as_ref().map_or(cutoff, |b| b.0);
        if c.length > bound {
            break;
        }
        path.push(i);
        if c.start == c.end {
            // a loop bounds no disk
            if best.as_ref().is_none_or(|b| c.length < b.0) {
                best = Some((c.length, path.clone()));
            }
        } else if max_cycle >= 2 {
            visited[c.start] = true;
            visited[c.end] = true;
            dfs(&conns, mesh, i, c.end, c.start, c.length, cutoff, max_cycle, &mut path, &mut visited, &mut best);
            visited[c.start] = false;
            visited[c.end] = false;
        }
        path.pop();
    }
    Ok(match best {
        Some((value, idx)) => Certified { value, exact: true, witness: idx.into_iter().map(|i| conns[i].clone()).collect() },
        None => Certified::lower_bound(cutoff),
    })
}

/// Default maximal subset size for ℓ₃.
pub const DEFAULT_MAX_SUBSET: usize = 4;

/// Shortest separating system among subsets of at most `max_subset`
/// pairwise disjoint connections of total length at most `cutoff`.
pub fn l3(surface: &FlatSurface, norm: Norm, cutoff: f64, max_subset: usize) -> Result<Certified> {
    if surface.genus() < 2 {
        return Err(Error::GenusTooSmall { genus: surface.genus() });
    }
    let conns = enumerate_connections(surface.mesh(), cutoff, norm)?;
    let mesh = surface.mesh();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut chosen: Vec<usize> = Vec::new();
    fn go(
        conns: &[SaddleConnection],
        mesh: &crate::kernel::Mesh,
        from: usize,
        total: f64,
        cutoff: f64,
        max_subset: usize,
        chosen: &mut Vec<usize>,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        for i in from..conns.len() {
            let bound = best.as_ref().map_or(cutoff, |b| b.0);
            let t = total + conns[i].length;
            if t > bound + 1e-12 {
                break;
            }
            chosen.push(i);
            let fam: Vec<&SaddleConnection> = chosen.iter().map(|&j| &conns[j]).collect();
            let d = Drawing::new(mesh, &fam);
            if d.is_disjoint() {
                if d.is_separating_system() && best.as_ref().is_none_or(|b| t < b.0) {
                    *best = Some((t, chosen.clone()));
                }
                if chosen.len() < max_subset {
                    go(conns, mesh, i + 1, t, cutoff, max_subset, chosen, best);
                }
            }
            chosen.pop();
        }
    }
    go(&conns, mesh, 0, 0.0, cutoff, max_subset, &mut chosen, &mut best);
    Ok(match best {
        Some((value, idx)) => Certified { value, exact: true, witness: idx.into_iter().map(|i| conns[i].clone()).collect() },
        None => Certified::lower_bound(cutoff),
    })
}
