use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("duplicate document id `{0}` in metadata")]
    DuplicateId(String),
    #[error("{path}:{line}: malformed metadata record: {message}")]
    MalformedMetadata {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid term query `{0}`: '*' is only allowed as the final character")]
    Query(String),
    #[error("{0}")]
    Data(String),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error("vocabulary hash mismatch: model expects {expected}, corpus gives {found}")]
    VocabularyMismatch { expected: String, found: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad parameters rather than bad input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Query(_))
    }
}
