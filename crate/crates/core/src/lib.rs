//! Computational tools for translation surfaces: saddle connections,
//! Delaunay triangulations, divergence profiles under the Teichmüller flow,
//! and the slit-torus family.

// `!(x > 0.0)` rejects NaN along with the rest
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connections;
pub mod delaunay;
pub mod error;
pub mod geom;
pub mod kernel;
pub mod network;
pub mod numbers;
pub mod slit;
pub mod strips;

pub use error::{Error, Result};
pub use geom::{Mat2, Norm, Vec2};
pub use kernel::{FlatSurface, Mesh, SurfaceDescription, SurfacePoint};
