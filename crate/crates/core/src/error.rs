use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("time {t} outside tabulated range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("degenerate system at t = {t}: g1 = g2 = 0")]
    DegenerateSystem { t: f64 },

    #[error("basis is not orthonormal at t = {t}: Gram deviation {deviation:.3e}")]
    InvalidBasis { t: f64, deviation: f64 },

    #[error("invalid Fock dimensions: {0}")]
    InvalidDims(String),

    #[error("solver failed at t = {t} (step {step:.3e}): {reason}")]
    Solver { t: f64, step: f64, reason: String },

    #[error("parse error in {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("validation error: `{field}` {reason}")]
    Validation { field: String, reason: String },

    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
