use thiserror::Error;

use crate::field::{Field, FieldError, Scalar};
use crate::matrix::MatrixError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("inputs live over different fields: {0} and {1}")]
    FieldMismatch(Field, Field),
    #[error("basis matrices do not commute")]
    NonCommuting,
    #[error("basis matrices are linearly dependent")]
    Dependent,
    #[error("pencil transform is singular")]
    SingularTransform,
    #[error("λ must satisfy λ≠0, λ≠−1 (got {lambda} over {field})")]
    InvalidLambda { lambda: Scalar, field: Field },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True when the error signals a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::Internal(_) | Error::Matrix(MatrixError::Internal(_))
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
