use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid surface description: {0}")]
    Parse(String),

    #[error("edge ({p},{e}) glued to ({q},{f}) but edge vectors are not opposite (mismatch {mismatch:.3e})")]
    GluingMismatch { p: usize, e: usize, q: usize, f: usize, mismatch: f64 },

    #[error("surface is not connected")]
    Disconnected,

    #[error("bad cone angle at vertex class {vertex}: {angle} is not a positive multiple of 2π")]
    BadConeAngle { vertex: usize, angle: f64 },

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("vertical flow hit singularity {vertex} after length {partial}")]
    SingularityHit { vertex: usize, partial: f64 },

    #[error("{what}: budget of {cap} exceeded")]
    BudgetExceeded { what: &'static str, cap: usize },

    #[error("genus {genus} is too small (need genus >= 2)")]
    GenusTooSmall { genus: usize },

    #[error("edge flip budget of {0} exceeded")]
    FlipBudgetExceeded(usize),

    #[error("flip sequence revisited a previous triangulation")]
    FlipCycle,

    #[error("square interior contains singularity {vertex}")]
    SingularityInInterior { vertex: usize },

    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),

    #[error("reachability graph is not connected ({components} components)")]
    NotConnected { components: usize },

    #[error("coverage gap: {uncovered} of {samples} sample points not covered")]
    CoverageGap { uncovered: usize, samples: usize },

    #[error("vertical saddle connection from singularity {vertex} (direction not minimal)")]
    VerticalSaddleConnection { vertex: usize },

    #[error("ray budget exceeded while extending critical leaves")]
    RayBudgetExceeded,

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("working precision exhausted after {reached} planted steps")]
    PrecisionExhausted { reached: usize },

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
