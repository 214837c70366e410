use thiserror::Error;

/// Errors raised by the linear-algebra kernels, samplers and models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite")]
    NotSpd,
    #[error("Cholesky diagonal entry {index} is not positive")]
    NonPositiveDiagonal { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("Wishart degrees of freedom {dof} must exceed dim - 1 = {}", *dim as f64 - 1.0)]
    InvalidDof { dof: f64, dim: usize },
    #[error("order parameter {lambda} must exceed -1 for Wishart-based proposals")]
    LambdaTooSmall { lambda: f64 },
    #[error("block index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("theta is rank deficient (singular value ratio {ratio:e})")]
    RankDeficientTheta { ratio: f64 },
    #[error("series of length {len} is too short (need at least {min})")]
    SeriesTooShort { len: usize, min: usize },
    #[error("chain has no recorded steps")]
    EmptyChain,
    #[error("moment oracle requires a > 0 and b > 0")]
    BoundaryParams,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
