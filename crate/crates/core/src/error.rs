use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "step {step} does not divide the driving period {tau} into an integer number of steps"
    )]
    StepDoesNotDivide { step: f64, tau: f64 },

    #[error("system size N = {n} exceeds the limit {max} for this operation")]
    SizeTooLarge { n: usize, max: usize },

    #[error("state is not normalized: squared norm {norm_sqr}")]
    Unnormalized { norm_sqr: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("trajectory separation underflowed to zero at period {period}")]
    DegenerateSeparation { period: usize },

    #[error("box counting is degenerate: only {nontrivial} scale(s) cover more than one box")]
    DegenerateBoxCount { nontrivial: usize },

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
