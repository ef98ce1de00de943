//! File formats, named experiments and report rendering behind the `pidss`
//! command-line tool.

pub mod experiments;
pub mod io;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("parse error in antichain `{text}`: {message}")]
    Antichain { text: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] pid_secret::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
