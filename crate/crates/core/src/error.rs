//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("step index n must be >= 1")]
    ZeroStepIndex,

    #[error("invalid schedule: {}", reasons.join("; "))]
    InvalidSchedule { reasons: Vec<String> },

    #[error("auxiliary sequence requires m > 2*omega, got m = {m}, omega = {omega}")]
    StepSequencePrecondition { m: f64, omega: f64 },

    #[error("operation requires a quadratic potential")]
    NotQuadratic,

    #[error("operation requires a diagonal quadratic potential")]
    NotDiagonal,

    #[error(
        "second-moment map is not a contraction at eigenvalue {eigenvalue}: \
         E[a(u)^2] = {contraction} >= 1; decrease the step size"
    )]
    NoStationaryVariance { eigenvalue: f64, contraction: f64 },

    #[error("step size {eta} outside (0, {max}] required by the drift inequality")]
    DriftStepOutOfRange { eta: f64, max: f64 },

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("empty sample set: {0}")]
    EmptySamples(&'static str),

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    /// Shorthand for [`Error::InvalidInput`] with a formatted message.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
