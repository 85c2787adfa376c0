use thiserror::Error;

use crate::lie_core::GroupFamily;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported group {family:?}({n})")]
    UnsupportedGroup { family: GroupFamily, n: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("unknown {what} '{id}'; available: {}", available.join(", "))]
    UnknownId {
        what: &'static str,
        id: String,
        available: Vec<String>,
    },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("normal frame construction failed at {coords:?}: {reason}")]
    FrameFailure { coords: Vec<f64>, reason: String },

    #[error("section point {coords:?} is singular (regularity margin {margin:e})")]
    SingularPoint { coords: Vec<f64>, margin: f64 },

    #[error("sample count must be positive")]
    EmptySample,

    #[error("integrand returned non-finite value {value} at {sample}")]
    NonFinite { sample: String, value: f64 },

    #[error("calibration denominator is degenerate ({0:e})")]
    DegenerateCalibration(f64),

    #[error("calibration belongs to action '{found}', not '{expected}'")]
    Uncalibrated { expected: String, found: String },

    #[error("function '{function}' is not invariant under action '{action}'")]
    NotInvariant { function: String, action: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
