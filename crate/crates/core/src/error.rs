use thiserror::Error;

/// Errors raised by the spherical OT library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("degenerate projection: point is orthogonal to the slice plane (|U^T x| = {norm:e})")]
    DegenerateProjection { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("solver incompatible with configuration: {0}")]
    SolverIncompatible(String),

    #[error("rejection sampler exceeded {cap} proposals (kappa = {kappa}, d = {dim})")]
    RejectionCap { cap: usize, kappa: f64, dim: usize },

    #[error("step size too large: pre-normalization vector vanished")]
    StepSize,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
