use thiserror::Error;

use crate::codensity::CodensityError;
use crate::integrate::IntegrateError;
use crate::lipmetric::MetricError;
use crate::measure::MeasureError;
use crate::represent::{ExtensionError, LatticeError, ReconstructError};
use crate::setalg::SetError;

/// Malformed textual or JSON input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("malformed rational {0:?} (expected \"p/q\")")]
    BadRational(String),
    #[error("unsupported format version {0} (expected 1)")]
    Version(u64),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

/// Any error produced by the library; used by the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Codensity(#[from] CodensityError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error reflects bad input (as opposed to a violated
    /// mathematical property of otherwise well-formed input).
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Format(_) | Error::Json(_) | Error::Set(_) => true,
            Error::Measure(e) => e.is_input_error(),
            Error::Integrate(e) => e.is_input_error(),
            Error::Metric(e) => e.is_input_error(),
            Error::Lattice(_) => false,
            Error::Reconstruct(e) => e.is_input_error(),
            Error::Extension(e) => e.is_input_error(),
            Error::Codensity(e) => e.is_input_error(),
        }
    }
}
