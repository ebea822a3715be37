use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum SoarError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("iteration diverged at step {step}")]
    Diverged { step: usize },

    #[error("conjugate gradient breakdown at step {step}")]
    Breakdown { step: usize },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("relative error undefined: reference solution has zero norm")]
    UndefinedMetric,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SoarError>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(SoarError::DimensionMismatch { expected, actual })
    }
}
