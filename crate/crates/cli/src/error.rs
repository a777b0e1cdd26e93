use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes, one per failure class.
pub mod exit {
    pub const OTHER: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const PARAMETER: u8 = 4;
    pub const CAPACITY: u8 = 5;
    pub const LEARNER: u8 = 6;
    pub const IO: u8 = 7;
    pub const INPUT: u8 = 8;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] stabilimeter::Error),

    #[error("{0}")]
    Usage(String),

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use stabilimeter::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::Parse { .. } | E::Json(_) => exit::PARSE,
                E::Parameter(_) => exit::PARAMETER,
                E::Capacity(_) => exit::CAPACITY,
                E::Learner { .. } => exit::LEARNER,
                E::Io(_) => exit::IO,
                E::Input(_) => exit::INPUT,
            },
            CliError::Usage(_) => exit::USAGE,
            CliError::Config { .. } => exit::PARSE,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
