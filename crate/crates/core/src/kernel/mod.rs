//! Flat surfaces, their triangulations, and straight-line flow on them.

pub mod birkhoff;
pub mod mesh;
pub mod ray;
pub mod surface;

pub use birkhoff::{birkhoff_average, Arc, BirkhoffEstimate};
pub use mesh::{Mesh, SurfacePoint};
pub use ray::{cast_ray, cast_vertical_ray, RayPiece, RayTrace};
pub use surface::{lattice_torus, square_torus, ConePoint, FlatSurface, SurfaceDescription};
