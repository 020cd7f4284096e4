//! Library behind the `convograph` binary: configuration resolution and the
//! subcommand implementations, kept callable so integration tests can drive
//! them directly.

pub mod commands;
pub mod config;

use std::fmt;

/// Command failures, each mapped to a process exit code:
/// usage/config errors exit 1, data errors 2, scorer-backend errors 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Scorer(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Scorer(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Scorer(m) => write!(f, "scorer error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<convograph_core::corpus::CorpusError> for CliError {
    fn from(e: convograph_core::corpus::CorpusError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<convograph_core::pipeline::PipelineError> for CliError {
    fn from(e: convograph_core::pipeline::PipelineError) -> Self {
        if e.is_scorer_error() {
            CliError::Scorer(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

impl From<convograph_core::scoring::ScoringError> for CliError {
    fn from(e: convograph_core::scoring::ScoringError) -> Self {
        match e {
            convograph_core::scoring::ScoringError::InvalidConfig(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Scorer(e.to_string()),
        }
    }
}
