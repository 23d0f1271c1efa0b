//! Episode runner, metrics and trace files for the bridgenet simulator,
//! plus both ends of the remote policy protocol.

pub mod error;
pub mod metrics;
pub mod policy;
pub mod protocol;
pub mod runner;
pub mod server;
pub mod trace;

pub use error::HarnessError;
pub use metrics::{audit_trace, BatchSummary, EpisodeMetrics, TraceAudit};
pub use policy::{HeuristicPolicy, Policy, PolicyEndpoint, RemotePolicy, DEFAULT_REMOTE_TIMEOUT};
pub use protocol::PROTOCOL_VERSION;
pub use runner::{render_report, render_summary, run_batch, run_episode, run_episode_with, BatchReport, EpisodeRun};
pub use server::{Decider, HoldDecider, PolicyServer, ScriptedDecider};
pub use trace::{export_trace, render_trace, EpisodeTrace, TraceTable, TRACE_HEADER};
