//! Experiment configuration, runs and their on-disk outputs for the
//! `g2flow` command-line tool.

pub mod config;
pub mod run;

use std::path::PathBuf;

pub use config::{ExperimentConfig, Family, Overrides};
pub use run::{reduce_json, run_experiment, sweep_experiments, Summary};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ENGINE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const IO: i32 = 3;
    pub const VERIFY_FAIL: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Engine(#[from] g2flow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Io { .. } => exit::IO,
            CliError::Engine(_) => exit::ENGINE,
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
