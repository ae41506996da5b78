use thiserror::Error;

use crate::reduction::Verdict;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not hermitian (max |X - X^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("temperature must be positive or infinite, got {0}")]
    NonPositiveTemperature(f64),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("conditioning state has vanishing overlap with the composite state ({overlap:e})")]
    DegenerateOverlap { overlap: f64 },

    #[error("operator is not nonnegative (min eigenvalue {min_eigenvalue:e})")]
    NotNonnegative { min_eigenvalue: f64 },

    #[error("operator has zero trace")]
    ZeroTrace,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("a Neumann mean vanishes; only the exact correlator {exact} is available")]
    ZeroNeumannMean { exact: f64 },

    #[error("correlated reduction did not converge (verdict {0:?})")]
    NotConverged(Verdict),

    #[error("branch undefined at the tie point C = {0:e}")]
    TieUndefined(f64),
}

impl CoreError {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        CoreError::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
