use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad input data: unknown ids, mismatched lengths, violated preconditions.
    #[error("input error: {0}")]
    Input(String),

    /// A configuration that cannot produce a defined value (empty denominators,
    /// out-of-range parameters, infeasible synthetic plants).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}:{line}:{column}: {message}", file.display())]
    Load {
        file: PathBuf,
        line: u64,
        column: u64,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn load(file: impl Into<PathBuf>, line: u64, column: u64, msg: impl Into<String>) -> Self {
        Error::Load {
            file: file.into(),
            line,
            column,
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Load { .. } => 2,
            Error::Config(_) => 3,
            Error::Io { .. } => 1,
        }
    }
}
