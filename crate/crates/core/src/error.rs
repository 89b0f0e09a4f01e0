use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown key `{key}`")]
    UnknownKey { key: String },

    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error("schedule violation at iteration {t}: {message}")]
    Schedule { t: u64, message: String },

    #[error("sweep has {cells} cells, limit is {limit}")]
    CellLimit { cells: usize, limit: usize },

    #[error("seed collision between runs {first} and {second}")]
    SeedCollision { first: u64, second: u64 },

    #[error("malformed trace: {0}")]
    Trace(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
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

    /// Process exit code for the CLI: 2 config, 3 schedule violation, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schedule { .. } => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }
}
