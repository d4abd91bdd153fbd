use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum SinoError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("spectrum is not Hermitian: imaginary residue {residue:e} exceeds {bound:e}")]
    HermitianViolation { residue: f64, bound: f64 },

    #[error("incompatible domain: {0}")]
    IncompatibleDomain(String),

    #[error("non-finite values in {context} at {at}")]
    NonFinite { context: String, at: String },

    #[error("trajectory too short: need {needed} snapshots, have {available}")]
    InsufficientLength { needed: usize, available: usize },

    #[error("relative error undefined: reference field has zero norm")]
    DegenerateTruth,

    #[error("correlation undefined: zero variance")]
    ZeroVariance,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = SinoError> = std::result::Result<T, E>;

impl SinoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SinoError::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        SinoError::Format { path: path.into(), reason: reason.into() }
    }

    pub(crate) fn non_finite(context: impl Into<String>, at: impl Into<String>) -> Self {
        SinoError::NonFinite { context: context.into(), at: at.into() }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 2 for validation problems, 3 for numerical failure, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            SinoError::NonFinite { .. }
            | SinoError::HermitianViolation { .. }
            | SinoError::DegenerateTruth
            | SinoError::ZeroVariance => 3,
            SinoError::Io { .. } | SinoError::Format { .. } => 4,
            SinoError::InvalidGrid(_)
            | SinoError::ShapeMismatch(_)
            | SinoError::IncompatibleDomain(_)
            | SinoError::InsufficientLength { .. }
            | SinoError::Config(_) => 2,
        }
    }
}
