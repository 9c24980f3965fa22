use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid degree set `{0}`: {1}")]
    InvalidDegreeSet(String, String),

    #[error("vertex index {index} out of range for a tree with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("integrality violation at n = {n}: class sum is not divisible by n")]
    IntegralityViolation { n: usize },

    #[error("brute-force enumeration is limited to n <= {limit}, got {n}")]
    SizeLimitExceeded { n: usize, limit: usize },

    #[error("no iteration converged within {0} steps")]
    NonConvergence(usize),

    #[error("restriction admits no object at the given parameters")]
    InfeasibleRestriction,

    #[error("no object of size {n} exists for this degree set (sizes must satisfy {rule})")]
    UnsupportedSize { n: usize, rule: String },

    #[error("tolerance must be positive and finite")]
    InvalidTolerance,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty sample")]
    EmptySample,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("neighborhood radius mismatch: {0} vs {1}")]
    RadiusMismatch(usize, usize),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
