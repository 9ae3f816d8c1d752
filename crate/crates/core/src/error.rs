//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Filesystem failure, tagged with the offending path.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input data: undecodable image, corrupt model file,
    /// bad CSV cache, and the like.
    #[error("format error: {0}")]
    Format(String),

    /// A persisted model was written by an incompatible schema.
    #[error("unsupported model schema version {found} (expected {expected})")]
    UnsupportedVersion { found: u64, expected: u64 },

    /// Image or grid dimensions outside what an operation supports.
    #[error("dimension error: {0}")]
    Dimensions(String),

    /// An argument violates an operation's contract.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn dimensions(msg: impl Into<String>) -> Self {
        Error::Dimensions(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
