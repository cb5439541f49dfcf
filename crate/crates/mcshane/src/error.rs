use thiserror::Error;

/// Errors raised by the numeric kernels and the geometric constructions built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("singular matrix")]
    Singular,
    #[error("complex spectrum detected")]
    ComplexSpectrum,
    #[error("eigen iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("repeated eigenvalues within tolerance")]
    RepeatedEigenvalues,
    #[error("non-positive coordinate: {0}")]
    NonPositive(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
