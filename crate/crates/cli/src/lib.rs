//! Command-line front end: model files, subcommands and reports.
//!
//! Exit codes are a stable contract: [`EXIT_OK`] for "equivalent" or
//! "valid", [`EXIT_DIFFERENT`] for "not equivalent", [`EXIT_INVALID`] for
//! any problem with the input, [`EXIT_INTERNAL`] otherwise.

use thiserror::Error;

pub mod commands;
pub mod model_file;

pub use model_file::ModelFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIFFERENT: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable holding the default sampling seed.
pub const SEED_ENV: &str = "COHMM_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Input {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    /// Located validation diagnostics, one per line.
    #[error("{}", .0.join("\n"))]
    Invalid(Vec<String>),

    #[error("{0}")]
    Usage(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_INVALID,
        }
    }
}
