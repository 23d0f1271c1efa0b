//! Simulation core for swarm network bridging.
//!
//! A handful of range-limited agents try to keep a multi-hop link alive
//! between two randomly moving targets on the unit map. This crate holds the
//! range graph, the stepped world with its shared reward and one-hop
//! observations, the seeded scenario machinery and the centralized
//! line-formation baseline.
//!
//! The math is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix
//! it to `f64`, which is what the harness and the CLI use.

pub mod env;
pub mod geometry;
pub mod graph;
pub mod heuristic;
pub mod scalar;
pub mod scenario;

pub use env::{Action, EnvError, NodeType, StepOutcome, PATH_BONUS};
pub use geometry::NodeId;
pub use graph::{GraphError, Subgraph};
pub use heuristic::HeuristicError;
pub use scalar::Scalar;
pub use scenario::{Prng, ScenarioConfig, ScenarioError};

pub type Position = geometry::Position<f64>;
pub type RangeGraph = graph::RangeGraph<f64>;
pub type World = env::World<f64>;
pub type AgentState = env::AgentState<f64>;
pub type TargetState = env::TargetState<f64>;
pub type RewardBreakdown = env::RewardBreakdown<f64>;
pub type Observation = env::Observation<f64>;
pub type ObservationRow = env::ObservationRow<f64>;
pub type ObservationStack = env::ObservationStack<f64>;
pub type EndpointAssignment = heuristic::EndpointAssignment<f64>;

pub type Position32 = geometry::Position<f32>;
pub type World32 = env::World<f32>;
