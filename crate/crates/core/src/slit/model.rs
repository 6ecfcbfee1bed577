//! The double of the square torus along a horizontal slit.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::kernel::surface::FlatSurface;
use crate::numbers::small_rational;

/// Denominator bound used to decide whether λ is rational.
pub const RATIONAL_DENOMINATOR_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct SlitTorus {
    pub lambda: f64,
    /// `Some((p, q))` when λ equals `p/q` with `q` below the bound.
    pub rational: Option<(i64, u64)>,
    pub surface: FlatSurface,
    /// Vertex ids of the branch points `0` and `λ`.
    pub z0: usize,
    pub z1: usize,
}

impl SlitTorus {
    pub fn is_rational(&self) -> bool {
        self.rational.is_some()
    }

    /// Sheet index and torus coordinates of a point given on the base
    /// surface.
    pub fn sheet_coords(&self, p: crate::kernel::SurfacePoint) -> Option<(usize, Vec2)> {
        self.surface.polygon_coords(p)
    }

    /// The sheet-swapping involution.
    pub fn tau(&self, p: crate::kernel::SurfacePoint) -> Option<crate::kernel::SurfacePoint> {
        let (sheet, xy) = self.sheet_coords(p)?;
        self.surface.point(1 - sheet, xy).ok()
    }
}

/// Polygon of one sheet: the unit square with the slit endpoint `(λ, 0)`
/// and its translate `(λ, 1)` added as vertices.
///
/// Edges: 0 bottom right, 1 right, 2 top right, 3 top left, 4 left,
/// 5 bottom left (the slit).
fn sheet(lambda: f64) -> Vec<Vec2> {
    vec![
        Vec2::new(lambda, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(lambda, 1.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(0.0, 0.0),
    ]
}

pub fn build_slit_torus(lambda: f64) -> Result<SlitTorus> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::OutOfRange(format!("slit length {lambda} not in (0, 1)")));
    }
    let mut gluings = Vec::new();
    for s in 0..2 {
        gluings.push(((s, 0), (s, 2)));
        gluings.push(((s, 1), (s, 4)));
    }
    gluings.push(((0, 5), (1, 3)));
    gluings.push(((1, 5), (0, 3)));
    let surface = FlatSurface::build(vec![sheet(lambda), sheet(lambda)], gluings)?;
    let z0 = surface.vertex_of(0, 5);
    let z1 = surface.vertex_of(0, 0);
    Ok(SlitTorus { lambda, rational: small_rational(lambda, RATIONAL_DENOMINATOR_BOUND), surface, z0, z1 })
}
