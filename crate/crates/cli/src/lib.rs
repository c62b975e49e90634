//! Library side of the `qdbench` command-line tool.

pub mod config;
pub mod figures;
pub mod run;
pub mod selftest;

/// Failures of a CLI run, each with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] qdbench::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Core(qdbench::Error::InvalidInput(_)) => 2,
            Self::Core(qdbench::Error::Assumption(_)) => 3,
            Self::Core(qdbench::Error::Solver(_) | qdbench::Error::NotHermitian { .. }) => 4,
            Self::Core(qdbench::Error::Io(_)) => 1,
        }
    }

    pub(crate) fn into_core(self) -> qdbench::Error {
        match self {
            Self::Config(msg) => qdbench::Error::InvalidInput(msg),
            Self::Core(e) => e,
        }
    }
}
