use thiserror::Error;

use crate::freealg::Gen;
use crate::scalar::ScalarError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("tensor arity mismatch: {left} vs {right}")]
    TensorArity { left: usize, right: usize },
    #[error("generator {0} does not belong to this algebra")]
    ForeignGenerator(Gen),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degree cap {cap} exceeded by a term of degree {degree}")]
    DegreeCap { cap: usize, degree: usize },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("normalization failed: {0}")]
    Normalization(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
