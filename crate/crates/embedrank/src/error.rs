//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Invalid configuration (bad TOML, infeasible layer sizes, bad values).
    #[error("config error: {0}")]
    Config(String),

    /// Missing or unusable input data (corpus, word vectors, topics, qrels).
    #[error("data error: {0}")]
    Data(String),

    /// A derived artifact (checkpoint, index, model, embeddings) that a
    /// command depends on does not exist yet.
    #[error("missing artifact: {0} (run `{1}` first)")]
    MissingArtifact(PathBuf, String),

    /// Malformed line in a structured file; carries the 1-based line number.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A run references a query that the qrels never judged.
    #[error("query {0} absent from qrels")]
    UnknownQuery(String),

    #[error("unknown document id {0}")]
    UnknownDoc(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{0} must not be empty")]
    EmptyInput(&'static str),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
