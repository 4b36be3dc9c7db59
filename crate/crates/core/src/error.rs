use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed or unusable input data. `line` is 1-based and counts the header.
    #[error("{}", match .line { Some(l) => format!("line {l}: {message}"), None => message.clone() })]
    Data { message: String, line: Option<usize> },

    /// A request that is well formed but cannot be served, such as
    /// AdaBoost on a regression task or a holdout larger than the data.
    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("fit failed at {params}: {source}")]
    Fit {
        params: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn data(message: impl Into<String>) -> Self {
        Error::Data {
            message: message.into(),
            line: None,
        }
    }

    pub fn data_at(line: usize, message: impl Into<String>) -> Self {
        Error::Data {
            message: message.into(),
            line: Some(line),
        }
    }

    /// The innermost error, looking through `Fit` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Fit { source, .. } => source.root(),
            other => other,
        }
    }
}
