use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("dimension mismatch: got {0}, expected {1}")]
    DimensionMismatch(usize, usize),
    #[error("state not normalized (norm {0})")]
    Unnormalized(f64),
    #[error("operator on {0} qubits exceeds dense guard")]
    TooLarge(usize),
    #[error("non-Hermitian input (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
