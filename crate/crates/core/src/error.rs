use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Requested register size is outside what a dense array can hold.
    #[error("capacity: {what} must lie in {min}..={max}, got {got}")]
    Capacity {
        what: &'static str,
        min: usize,
        max: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate oracle `{predicate}`: {marked} of {space} basis states marked")]
    DegenerateOracle { predicate: String, marked: u64, space: u64 },

    #[error("oracle `{0}` cannot be lowered to elementary gates")]
    UnsupportedOracle(String),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("parse error in `{input}`: {message}")]
    Parse { input: String, message: String },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: msg.into(),
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse { .. } => 2,
            Error::Io { .. } | Error::Json { .. } | Error::Csv(_) => 4,
            _ => 3,
        }
    }
}
