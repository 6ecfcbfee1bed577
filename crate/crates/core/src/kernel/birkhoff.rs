//! Crossing counts of vertical segments with horizontal arcs.

use super::mesh::{Mesh, SurfacePoint};
use super::ray::{cast_ray, cast_vertical_ray};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BirkhoffEstimate {
    pub start: SurfacePoint,
    pub arc_anchor: SurfacePoint,
    pub arc_length: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub crossings: u64,
    pub average: f64,
}

/// A horizontal arc split into per-triangle pieces `(y, x0, x1)`.
#[derive(Debug, Clone)]
pub struct Arc {
    anchor: SurfacePoint,
    length: f64,
    pieces: Vec<Vec<(f64, f64, f64)>>,
}

impl Arc {
    /// Traces a horizontal arc of the given length starting at `anchor` and
    /// heading right. Fails if it runs into a vertex.
    pub fn horizontal(mesh: &Mesh, anchor: SurfacePoint, length: f64) -> Result<Arc> {
        let mut pieces = vec![Vec::new(); mesh.n_triangles()];
        if length > 0.0 {
            let r = cast_ray(mesh, anchor, Vec2::new(1.0, 0.0), length);
            if let Some((vertex, partial)) = r.hit {
                return Err(Error::SingularityHit { vertex, partial });
            }
            for p in &r.pieces {
                let (x0, x1) = (p.from.x.min(p.to.x), p.from.x.max(p.to.x));
                pieces[p.tri].push((p.from.y, x0, x1));
            }
        }
        Ok(Arc { anchor, length, pieces })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Transversal intersections with a vertical piece inside triangle `tri`.
    /// Pieces are half-open in both directions so shared boundary points are
    /// counted once.
    fn count(&self, tri: usize, from: Vec2, to: Vec2) -> u64 {
        let (lo, hi) = if from.y <= to.y { (from.y, to.y) } else { (to.y, from.y) };
        let up = from.y <= to.y;
        let x = from.x;
        self.pieces[tri]
            .iter()
            .filter(|&&(y, x0, x1)| {
                let in_x = x >= x0 && x < x1;
                let in_y = if up { y >= lo && y < hi } else { y > lo && y <= hi };
                in_x && in_y
            })
            .count() as u64
    }
}

/// Crossing count of the vertical segment of length `t` from `start` with
/// the arc, and the average `crossings / t`.
pub fn birkhoff_average(mesh: &Mesh, start: SurfacePoint, arc: &Arc, t: f64) -> Result<BirkhoffEstimate> {
    let mut crossings = 0u64;
    if t > 0.0 && arc.length > 0.0 {
        let r = cast_vertical_ray(mesh, start, t, true);
        if let Some((vertex, partial)) = r.hit {
            return Err(Error::SingularityHit { vertex, partial });
        }
        for p in &r.pieces {
            crossings += arc.count(p.tri, p.from, p.to);
        }
    }
    let average = if t > 0.0 { crossings as f64 / t } else { 0.0 };
    Ok(BirkhoffEstimate { start, arc_anchor: arc.anchor, arc_length: arc.length, t, crossings, average })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::surface::{lattice_torus, square_torus, FlatSurface};

    fn golden() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    #[test]
    fn golden_torus_average_is_one() {
        // the lattice (1,0), (-1/phi, 1) is the square torus sheared so that
        // slope-phi lines become vertical
        let s = lattice_torus(Vec2::new(1.0, 0.0), Vec2::new(-1.0 / golden(), 1.0)).unwrap();
        let arc = Arc::horizontal(s.mesh(), s.point(0, Vec2::new(0.1, 0.3)).unwrap(), 1.0).unwrap();
        let start = s.point(0, Vec2::new(0.2, 0.5)).unwrap();
        let e = birkhoff_average(s.mesh(), start, &arc, 1000.0).unwrap();
        assert!((e.average - 1.0).abs() < 0.02);
    }

    #[test]
    fn empty_arc() {
        let s = square_torus();
        let arc = Arc::horizontal(s.mesh(), s.point(0, Vec2::new(0.1, 0.3)).unwrap(), 0.0).unwrap();
        let e = birkhoff_average(s.mesh(), s.point(0, Vec2::new(0.5, 0.5)).unwrap(), &arc, 100.0).unwrap();
        assert_eq!(e.crossings, 0);
        assert_eq!(e.average, 0.0);
    }

    #[test]
    fn refinement_invariance() {
        let shear = Vec2::new(-0.381966, 1.0);
        let coarse = lattice_torus(Vec2::new(1.0, 0.0), shear).unwrap();
        // same torus cut into two parallelograms
        let h = Vec2::new(0.5, 0.0);
        let fine = FlatSurface::build(
            vec![vec![Vec2::ZERO, h, h + shear, shear], vec![h, h * 2.0, h * 2.0 + shear, h + shear]],
            vec![((0, 1), (1, 3)), ((1, 1), (0, 3)), ((0, 0), (0, 2)), ((1, 0), (1, 2))],
        )
        .unwrap();
        let count = |s: &FlatSurface| {
            let arc = Arc::horizontal(s.mesh(), s.point(0, Vec2::new(0.05, 0.3)).unwrap(), 0.8).unwrap();
            birkhoff_average(s.mesh(), s.point(0, Vec2::new(0.2, 0.6)).unwrap(), &arc, 200.0).unwrap().crossings
        };
        assert_eq!(count(&coarse), count(&fine));
    }
}
