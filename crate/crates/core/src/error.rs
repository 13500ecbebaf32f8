use thiserror::Error;

/// Errors produced by simulation, estimation and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("insufficient exceedances at lag {lag}: {count} above threshold, need at least {required}")]
    InsufficientExceedances {
        lag: usize,
        count: usize,
        required: usize,
    },

    #[error("threshold grid at lag {lag} is empty after the minimum-count filter")]
    EmptyGrid { lag: usize },

    #[error("lag {lag} lies beyond the coefficient truncation M = {max}")]
    LagBeyondTruncation { lag: usize, max: usize },

    #[error("decay fit needs at least {required} usable lags, found {usable} ({zero_theta} with zero estimate, {zero_coeff} with zero coefficient)")]
    InsufficientLags {
        required: usize,
        usable: usize,
        zero_theta: usize,
        zero_coeff: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
