use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("refinement exceeds the resource bound: {0}")]
    Resource(String),

    #[error(transparent)]
    Core(#[from] bfslab::Error),

    #[error("cannot serialize report: {0}")]
    Serialize(#[from] serde_json::Error),
}
