use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed network payload: {0}")]
    Parse(String),

    #[error("unsupported network format version {found} (this build reads version {expected})")]
    Version { found: u32, expected: u32 },

    #[error("construction does not fit its budget: {0}")]
    BudgetExceeded(String),

    #[error("target `{target}` has no evaluator for the partial derivative of order {alpha:?} and finite differences are disabled")]
    MissingDerivative { target: String, alpha: Vec<u32> },

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidArgument(_)
                | Error::Parse(_)
                | Error::Version { .. }
                | Error::MissingDerivative { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
