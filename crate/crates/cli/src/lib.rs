//! Command-line driver for `deltasink-core`: configuration, one pipeline per
//! mode, and CSV output.

pub mod config;
pub mod output;
pub mod pipelines;

use deltasink_core::Error;

pub use config::{preset, ExperimentConfig, Mode, PRESETS};
pub use output::{write_csv, Table};
pub use pipelines::run;

/// Crate version written into every CSV header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot write output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Wraps an error raised while validating user input.
    pub fn from_config(e: Error) -> Self {
        CliError::Config(e.to_string())
    }

    /// `2` for configuration and output problems, `3` for numerical guards.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::Domain { .. }
            | Error::OutOfRegime(_)
            | Error::Normalization(_)
            | Error::InvalidProblem(_) => CliError::from_config(e),
            _ => CliError::Numerical(e),
        }
    }
}
