//! Branched double covers of the square torus: slits, loops, and the
//! classification of directions.

pub mod birkhoff;
pub mod model;
pub mod sequence;

pub use birkhoff::{birkhoff_experiment, BirkhoffOptions, BirkhoffReport};
pub use model::{build_slit_torus, SlitTorus};
pub use sequence::{
    classify, plant_direction, shortest_sequence, Classification, DirectionAnalysis, HolonomyClass, Kind, Pattern,
    Plant, SequenceEntry, SequenceOptions, Verdict,
};
