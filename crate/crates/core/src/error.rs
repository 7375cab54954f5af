use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("weight matrix has a nonzero diagonal entry at {index}")]
    NonzeroDiagonal { index: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("the zero matrix has no leading singular triple")]
    ZeroMatrix,

    #[error("entry {index} is not in {{-1, 1}}")]
    NotBinary { index: usize },

    #[error("product objectives need at least two factors, got {0}")]
    TooFewFactors(usize),

    #[error("Lipschitz estimate is implemented for two factors only, got {0}")]
    UnsupportedFactorCount(usize),

    #[error("descent-lemma search exhausted after {0} doublings")]
    LineSearchExhausted(usize),

    #[error("instance has {0} binary variables; enumeration is limited to 24")]
    TooLargeForEnumeration(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
}
