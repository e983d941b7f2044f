use thiserror::Error;

/// Errors surfaced by the numerical engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("frame invariant violated: {0}")]
    FrameInvariant(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported evaluation: {0}")]
    Unsupported(String),
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("solver did not converge after {iterations} iterations (sup residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("calibration root not bracketed in [{lo:.3e}, {hi:.3e}]")]
    RootNotBracketed { lo: f64, hi: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
