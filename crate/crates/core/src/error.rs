use thiserror::Error;

/// Errors raised by the exact dynamics routines.
///
/// Every variant describes rejected input; the library has no I/O and no
/// internal failure modes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid exponent matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
