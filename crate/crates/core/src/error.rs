use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the library.
///
/// The variants line up with the failure classes the CLI maps onto
/// distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data (empty datasets, schema mismatch, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A numeric parameter outside its declared range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An exhaustive computation would exceed the configured bound.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A learner failed to produce a concept.
    #[error("learner `{learner}` failed: {message}")]
    Learner { learner: String, message: String },

    /// A text format could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
