use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient prefix: {0}")]
    InsufficientPrefix(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not normalized: norm or leading term {0} exceeds 1")]
    NotNormalized(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("SVD did not converge within the iteration cap")]
    ConvergenceFailure,

    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("band projections {0} and {1} are not mutually orthogonal")]
    NonOrthogonalBands(usize, usize),

    #[error("weight sequence violates the norm constraint: {0}")]
    NormViolation(String),

    #[error("all symbols cancelled: the operator is zero")]
    ZeroOperator,

    #[error("sampled evaluation vectors failed to span after {0} draws")]
    SpanFailure(usize),

    #[error("matrix is not supported on the block diagonal (off-block mass {0:e})")]
    SupportViolation(f64),
}
