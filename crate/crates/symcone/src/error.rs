use thiserror::Error;

/// Errors raised by the cone numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular element: {0}")]
    Singular(String),

    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("branch cut: {factor} = {re}{im:+}i lies on (-inf, 0]")]
    BranchCut { factor: &'static str, re: f64, im: f64 },

    #[error("quadrature: {0}")]
    Quadrature(String),

    #[error("unsupported measure: {0}")]
    UnsupportedMeasure(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, ConeError>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(ConeError::DimensionMismatch { expected, got })
    }
}
