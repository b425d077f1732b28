//! Batch experiment runner: generate or ingest device traffic, run the
//! federated training simulation, evaluate every device and emit
//! machine-readable reports. See the `fediot` binary for the CLI surface.

mod commands;
mod config;
pub mod report;

pub use commands::{cmd_compare, cmd_run, cmd_synth, CompareRow, RunArtifacts};
pub use config::{ExperimentFile, ResolvedData, ResolvedExperiment};

use fediot_core::Error as CoreError;

/// CLI-level errors; each class maps to a distinct process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or hyperparameters (exit 2).
    Config(String),
    /// Malformed input data (exit 3).
    Format(String),
    /// Filesystem failures (exit 4).
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Format(m) => write!(f, "data format error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Format(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(m) => CliError::Config(m),
            CoreError::Format(m) => CliError::Format(m),
            CoreError::Io(e) => CliError::Io(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
