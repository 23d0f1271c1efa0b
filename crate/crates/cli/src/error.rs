use std::path::PathBuf;
use std::process::ExitCode;

use bridgenet_core::ScenarioError;
use bridgenet_harness::HarnessError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Policy(String),
    #[error("{0}")]
    Episodes(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 usage, 3 I/O or unreadable input, 4 remote policy, 5 verification
    /// mismatch, 1 anything else.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Scenario(ScenarioError::InvalidConfig { .. }) => 2,
            CliError::Scenario(_) => 3,
            CliError::Harness(e) if e.is_policy_error() => 4,
            CliError::Harness(HarnessError::Io { .. } | HarnessError::MalformedTrace { .. }) => 3,
            CliError::Harness(HarnessError::Scenario(ScenarioError::InvalidConfig { .. })) => 2,
            CliError::Harness(_) => 1,
            CliError::Policy(_) => 4,
            CliError::Mismatch(_) => 5,
            CliError::Episodes(_) => 1,
        })
    }
}
