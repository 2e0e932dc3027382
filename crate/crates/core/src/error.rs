use thiserror::Error;

use crate::spectra::SpectrumResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("empty basis: window of length {window_len} cannot hold {n} particles")]
    EmptyBasis { n: usize, window_len: usize },

    #[error("representation mismatch: {0}")]
    Representation(String),

    #[error("dimension {dim} exceeds the dense solver cap {cap}; use the extremal solver")]
    DenseCap { dim: usize, cap: usize },

    #[error(
        "Lanczos did not converge after {iterations} iterations (max residual {max_residual:.3e})"
    )]
    NotConverged {
        iterations: usize,
        max_residual: f64,
        /// Best Ritz pairs available when the iteration cap was hit.
        best: Box<SpectrumResult>,
    },

    #[error("coefficient derivations disagree by {discrepancy:.3e} (N={n}, delta={delta}, theta={theta})")]
    DerivationMismatch {
        n: usize,
        delta: f64,
        theta: f64,
        discrepancy: f64,
    },

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("windows too small: {0}")]
    WindowTooSmall(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
