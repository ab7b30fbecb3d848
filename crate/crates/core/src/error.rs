use thiserror::Error;

use crate::idlaw::ValidationReport;

pub type Result<T> = std::result::Result<T, IdLawError>;

#[derive(Debug, Error)]
pub enum IdLawError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid Lévy triplet: {0}")]
    InvalidTriplet(ValidationReport),

    #[error("convolution power must be positive, got {0}")]
    NonPositivePower(f64),

    #[error("map parameter beta must be positive and finite, got {0}")]
    InvalidBeta(f64),

    #[error("time argument must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureFailed { achieved: f64, requested: f64 },

    #[error("law is not in ID_log: {0}")]
    NotIdLog(String),

    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),

    #[error("horizon s_max = {s_max} too small: discarded tail mass {bound:e} exceeds {limit:e}")]
    TailBound { s_max: f64, bound: f64, limit: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("law file: {0}")]
    LawFormat(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
