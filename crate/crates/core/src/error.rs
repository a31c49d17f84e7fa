use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the recovery pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid measurement at index {index}: {value} is not -1 or +1")]
    InvalidMeasurement { index: usize, value: f64 },

    #[error("vector is not unit norm (norm = {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("degenerate result: every iterate collapsed to the zero vector after {iterations} iterations")]
    Degenerate { iterations: usize },

    #[error("trial seed={seed} variant={variant}: {source}")]
    Trial {
        seed: u64,
        variant: String,
        #[source]
        source: Box<Error>,
    },

    #[error("bad matrix cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            actual,
        })
    }
}
