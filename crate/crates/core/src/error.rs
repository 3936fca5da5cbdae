use thiserror::Error;

/// Errors produced by the lotto toolkit.
#[derive(Debug, Error)]
pub enum LottoError {
    /// An argument fell outside the domain of the operation (negative bid,
    /// support beyond the cap, mismatched grids, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A game or strategy violated a structural invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A closed-form constructor was called outside the parameter range it covers.
    #[error("wrong regime: {0}")]
    WrongRegime(String),

    /// A profile lacks the data a check needs.
    #[error("malformed profile: {0}")]
    Malformed(String),

    /// Numerical breakdown that indicates a bug rather than bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LottoError>;
