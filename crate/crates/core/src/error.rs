use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator.
///
/// `Domain` covers inputs outside an operation's mathematical domain (a
/// position outside the well, a negative elapsed time). `Validation` covers
/// malformed or inconsistent configuration and data that must be fixed by the
/// caller before anything is computed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {field}: {message}")]
    Validation { field: String, message: String },

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// `true` for errors the caller can fix by changing inputs.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Validation { .. } | Error::UndefinedCorrelation(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
