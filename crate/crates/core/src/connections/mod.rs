//! Saddle connections and the lengths built from them.

pub mod enumerate;
pub mod lengths;
pub mod profile;
pub mod topology;

pub use enumerate::{enumerate_connections, enumerate_with_budget, l1, shortest, SaddleConnection};
pub use lengths::{l2, l2_with, l3, Certified};
pub use profile::{diophantine_check, divergence_profile, minimum_time, DiophantineReport, DivergenceProfile};
pub use topology::Drawing;
