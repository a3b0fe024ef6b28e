use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("covariance not PSD")]
    NotPsd,
    #[error("non-finite value")]
    NonFinite,
    #[error("matrix is singular: {0}")]
    Singular(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("action {index} out of range for {num_arms} arms")]
    ActionOutOfRange { index: usize, num_arms: usize },
    #[error("observation outside prior support")]
    OutsideSupport,
    #[error("degenerate moments")]
    DegenerateMoments,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("decode mismatch: reward {0} is not in the construction's range")]
    DecodeMismatch(f64),
    #[error("incompatible configuration: {0}")]
    Incompatible(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
