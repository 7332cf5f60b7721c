use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("xml parse error at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("cannot decode attribute `{attr}`: {reason}")]
    Decode { attr: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("json error in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{what}: unsupported schema version {found} (expected {expected})")]
    SchemaVersion {
        what: String,
        found: u64,
        expected: u64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("stage `{stage}` cannot run: {reason}; run `{rerun}` first")]
    StageDependency {
        stage: String,
        reason: String,
        rerun: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn decode(attr: &str, reason: impl Into<String>) -> Self {
        Error::Decode {
            attr: attr.to_string(),
            reason: reason.into(),
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::StageDependency { .. } => 4,
            _ => 3,
        }
    }
}
