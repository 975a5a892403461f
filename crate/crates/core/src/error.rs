use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("invalid UTF-8 at byte offset {offset}")]
    Decode { offset: u64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("training diverged in epoch {epoch} at position {position}: {detail}")]
    Divergence {
        epoch: usize,
        position: usize,
        detail: String,
    },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("malformed {what} at line {line}: {detail}")]
    Format {
        what: &'static str,
        line: usize,
        detail: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("stage `{stage}` failed ({inputs}): {source}")]
    Stage {
        stage: String,
        inputs: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn format(what: &'static str, line: usize, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            line,
            detail: detail.into(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 configuration, 2 data, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter(_) => 1,
            Error::File { .. } => 1,
            Error::Io(_)
            | Error::Decode { .. }
            | Error::Integrity(_)
            | Error::Format { .. } => 2,
            Error::Degenerate(_)
            | Error::Divergence { .. }
            | Error::Undefined(_)
            | Error::Linalg(_) => 3,
            Error::Stage { source, .. } => source.exit_code(),
        }
    }
}
