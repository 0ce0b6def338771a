use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator and its I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its domain. `field` is a dotted path such as
    /// `dendrites.n` when the value came from a config file.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("branch index {index} out of range for a bank of {len} branches")]
    BranchOutOfRange { index: usize, len: usize },

    #[error("expected {expected} device states, got {actual}")]
    StateLengthMismatch { expected: usize, actual: usize },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Prefix the field path of an [`Error::InvalidParameter`] with a config
    /// section name, e.g. `n` becomes `dendrites.n`.
    pub(crate) fn in_section(self, section: &str) -> Self {
        match self {
            Error::InvalidParameter { field, reason } => Error::InvalidParameter {
                field: format!("{section}.{field}"),
                reason,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
