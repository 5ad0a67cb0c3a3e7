use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported norm for this operation: {0}")]
    UnsupportedNorm(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("witness not in convex hull: distance {distance:e} exceeds tolerance {tol:e}")]
    WitnessOutsideHull { distance: f64, tol: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("label {0} missing from functional domain")]
    MissingLabel(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
