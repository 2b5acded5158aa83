use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid exponent `{0}`: expected an integer, `p/q` with value >= 1, or `inf`")]
    InvalidExponent(String),
    #[error("invalid rational `{0}`")]
    InvalidRational(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("matrix does not have full rank {expected} (rank {actual})")]
    NotFullRank { expected: usize, actual: usize },
    #[error("no admissible m0 subset")]
    NotFound,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("incompatible grid: {0}")]
    IncompatibleGrid(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
