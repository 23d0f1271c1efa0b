use std::io;
use std::path::PathBuf;

use bridgenet_core::{EnvError, NodeId, ScenarioError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot reach policy at {address}: {source}")]
    Connect {
        address: String,
        #[source]
        source: io::Error,
    },
    #[error("policy at {address} timed out at step {step}")]
    Timeout { address: String, step: usize },
    #[error("policy at {address} disconnected: {detail}")]
    Disconnected { address: String, detail: String },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("policy sent action {code} for agent {agent} at step {step}; expected 0..=8")]
    InvalidAction { agent: NodeId, step: usize, code: i64 },
    #[error("protocol version mismatch: expected {expected}, peer speaks {got}")]
    VersionMismatch { expected: String, got: String },
    #[error("policy refused the session: {0}")]
    Refused(String),
    #[error("{path}: row {row}, column {column}: {reason}")]
    MalformedTrace { path: PathBuf, row: usize, column: String, reason: String },
}

impl HarnessError {
    /// Whether the failure came from talking to a remote policy.
    pub fn is_policy_error(&self) -> bool {
        matches!(
            self,
            HarnessError::Connect { .. }
                | HarnessError::Timeout { .. }
                | HarnessError::Disconnected { .. }
                | HarnessError::Protocol(_)
                | HarnessError::InvalidAction { .. }
                | HarnessError::VersionMismatch { .. }
                | HarnessError::Refused(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}
