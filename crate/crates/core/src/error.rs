use thiserror::Error;

/// Errors produced by the p-adic Hausdorff toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("values carry different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),

    #[error("degenerate matrix: every entry is zero")]
    DegenerateMatrix,

    #[error("singular matrix")]
    SingularMatrix,

    #[error("matrix family has no finite nu on the probed shells")]
    NoFiniteNu,

    #[error("function is not integrable: {0}")]
    NonIntegrable(String),

    #[error("weight is not locally integrable: {0}")]
    NotLocallyIntegrable(String),

    #[error("weight is not strictly positive: {0}")]
    NonPositiveWeight(String),

    #[error("kernel takes negative values: {0}")]
    NegativeKernel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty shell range")]
    EmptyRange,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
