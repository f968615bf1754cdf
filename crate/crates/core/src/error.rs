use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is out of its allowed domain.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Statistical routines reject empty or malformed samples.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("enumeration limit exceeded: {0}")]
    SizeLimit(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// Output already on disk does not match its recorded checksum.
    #[error("checksum mismatch for {path}: expected {expected}, found {found}")]
    Checksum {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("missing or short data: {0}")]
    Data(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::Parse { .. } | Error::Data(_) | Error::InvalidInput(_) => 2,
            Error::SizeLimit(_) => 2,
            Error::Checksum { .. } => 3,
            _ => 1,
        }
    }
}
