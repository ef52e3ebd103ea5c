use alloc::string::String;

/// Failures reported by the library.
///
/// `PreconditionFailed` and `NotApplicable`-style outcomes are distinct on
/// purpose: the former is an error returned to the caller, the latter is a
/// regular report variant (see [`crate::enveloping::RankCaseLabel`]).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("scalar domains differ: {left} vs {right}")]
    DomainMismatch { left: &'static str, right: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("coefficient {index} is zero")]
    ZeroCoefficient { index: usize },

    #[error("diagonal structural constants must vanish")]
    DiagonalNotZero,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("cannot parse scalar {text:?}: {reason}")]
    Parse { text: String, reason: &'static str },

    #[error("non-finite complex entry")]
    NonFinite,

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
