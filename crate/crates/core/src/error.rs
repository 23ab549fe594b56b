use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the view-planning engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input at line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("mesh has no faces")]
    EmptyMesh,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid argument `{key}`: {message}")]
    InvalidArgument { key: &'static str, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(key: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            key,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}
