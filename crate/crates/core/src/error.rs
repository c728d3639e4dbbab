use thiserror::Error;

/// Errors raised by grid construction, body assembly and the checks built on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0} (only n = 1 and n = 2 are supported)")]
    UnsupportedDimension(usize),

    #[error("resolution {got} below minimum {min} per parameter")]
    ResolutionTooLow { got: usize, min: usize },

    #[error("longitude count {0} must be even for cross-pole continuation")]
    OddLongitudeCount(usize),

    #[error("cannot parse resolution '{0}' (expected N or WxH)")]
    BadResolution(String),

    #[error("support function is not strictly convex at node {node} (smallest eigenvalue of A[h] = {margin:.3e})")]
    NonConvex { node: usize, margin: f64 },

    #[error("support function is not positive at node {node} (h = {value:.3e})")]
    NonPositive { node: usize, value: f64 },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid body spec: {0}")]
    InvalidSpec(String),

    #[error("invalid problem spec: {0}")]
    InvalidProblem(String),

    #[error("nonlinearity returned a non-finite value at node {node}")]
    NonFiniteNonlinearity { node: usize },

    #[error("calibration ratio for {name} differs across probe bodies by {spread:.3e}")]
    InconsistentCalibration { name: String, spread: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
