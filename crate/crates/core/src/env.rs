//! The bridging world: agent and target state, simultaneous moves, the
//! shared reward and one-hop observations with temporal stacking.
//!
//! Node ids are assigned as agents `0..n`, then `T1 = n` and `T2 = n + 1`.
//! A step applies, in order: agent moves, the target update, the graph
//! rebuild, the reward on the new state, and fresh observations.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{NodeId, Position};
use crate::graph::{GraphError, RangeGraph};
use crate::scalar::Scalar;
use crate::scenario::{place_targets, sample_target_move, Prng, ScenarioConfig, ScenarioError};

/// Bonus paid on every step where the two targets are connected.
pub const PATH_BONUS: f64 = 100.0;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("joint action has {got} entries, expected {expected}")]
    ActionArity { expected: usize, got: usize },
    #[error("episode already reached its horizon of {0} steps")]
    HorizonReached(usize),
    #[error("unknown agent {0}")]
    UnknownAgent(NodeId),
    #[error("action code {0} is outside 0..=8")]
    InvalidActionCode(i64),
    #[error("observation for step {got} does not follow step {last}")]
    StaleObservation { last: usize, got: usize },
}

/// Move along each axis: -1 backward, 0 hold, +1 forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Action {
    dx: i8,
    dy: i8,
}

impl Action {
    pub const HOLD: Action = Action { dx: 0, dy: 0 };

    /// All nine actions in flat-code order.
    pub const ALL: [Action; 9] = [
        Action { dx: -1, dy: -1 },
        Action { dx: -1, dy: 0 },
        Action { dx: -1, dy: 1 },
        Action { dx: 0, dy: -1 },
        Action { dx: 0, dy: 0 },
        Action { dx: 0, dy: 1 },
        Action { dx: 1, dy: -1 },
        Action { dx: 1, dy: 0 },
        Action { dx: 1, dy: 1 },
    ];

    pub fn new(dx: i8, dy: i8) -> Option<Action> {
        ((-1..=1).contains(&dx) && (-1..=1).contains(&dy)).then_some(Action { dx, dy })
    }

    /// Decodes `flat = 3 (dx + 1) + (dy + 1)`.
    pub fn from_flat(code: i64) -> Result<Action, EnvError> {
        usize::try_from(code).ok().and_then(|i| Self::ALL.get(i).copied()).ok_or(EnvError::InvalidActionCode(code))
    }

    pub(crate) fn from_index(index: u8) -> Action {
        Self::ALL[index as usize]
    }

    pub fn flat(self) -> u8 {
        (3 * (self.dx + 1) + (self.dy + 1)) as u8
    }

    pub fn dx(self) -> i8 {
        self.dx
    }

    pub fn dy(self) -> i8 {
        self.dy
    }

    pub fn is_hold(self) -> bool {
        self == Self::HOLD
    }
}

/// Moves `p` by `step_size` per axis and clamps to the unit map.
pub fn apply_action<T: Scalar>(p: Position<T>, action: Action, step_size: T) -> Position<T> {
    let dx = T::from_i8(action.dx).unwrap_or_else(T::zero);
    let dy = T::from_i8(action.dy).unwrap_or_else(T::zero);
    Position::new(p.x + step_size * dx, p.y + step_size * dy).clamp_unit()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeType {
    #[serde(rename = "A")]
    Agent,
    #[serde(rename = "T")]
    Target,
}

impl NodeType {
    pub fn code(self) -> &'static str {
        match self {
            NodeType::Agent => "A",
            NodeType::Target => "T",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState<T> {
    pub id: NodeId,
    pub position: Position<T>,
    pub last_action: Action,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetState<T> {
    pub id: NodeId,
    pub position: Position<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown<T> {
    pub base: T,
    pub centroid_penalty: T,
    pub path_bonus: T,
    pub total: T,
}

/// One feature row: type, id, coordinates, last action and both targets'
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRow<T> {
    pub node_type: NodeType,
    pub id: NodeId,
    pub coord: Position<T>,
    /// Flat action code; always 0 on target rows.
    pub action: u8,
    pub t1_coord: Position<T>,
    pub t2_coord: Position<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation<T> {
    pub ego: NodeId,
    pub step_index: usize,
    /// Ego row first, then neighbors by ascending id.
    pub rows: Vec<ObservationRow<T>>,
    pub local_edges: Vec<(NodeId, NodeId)>,
}

/// The `depth` most recent observations of one agent, oldest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationStack<T> {
    depth: usize,
    frames: VecDeque<Observation<T>>,
}

impl<T> ObservationStack<T> {
    pub fn new(depth: usize) -> Self {
        assert!(depth > 0, "observation stack depth must be positive");
        ObservationStack { depth, frames: VecDeque::with_capacity(depth) }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> impl Iterator<Item = &Observation<T>> {
        self.frames.iter()
    }

    pub fn latest(&self) -> Option<&Observation<T>> {
        self.frames.back()
    }

    /// Appends a frame, evicting the oldest beyond `depth`.
    pub fn push(&mut self, obs: Observation<T>) -> Result<(), EnvError> {
        if let Some(last) = self.frames.back() {
            if obs.step_index <= last.step_index {
                return Err(EnvError::StaleObservation { last: last.step_index, got: obs.step_index });
            }
        }
        self.frames.push_back(obs);
        while self.frames.len() > self.depth {
            self.frames.pop_front();
        }
        Ok(())
    }
}

/// Shared reward for a graph with known target ids.
///
/// Connected targets earn exactly [`PATH_BONUS`]; otherwise the reward is the
/// largest-component fraction minus the agent/target centroid distance.
pub fn compute_reward<T: Scalar>(
    graph: &RangeGraph<T>,
    agents: &[Position<T>],
    targets: (NodeId, NodeId),
) -> Result<RewardBreakdown<T>, GraphError> {
    let largest = graph.largest_component_size()?;
    let base = T::from_usize(largest).unwrap() / T::from_usize(graph.len()).unwrap();
    let t1 = graph.position(targets.0)?;
    let t2 = graph.position(targets.1)?;
    let agent_centroid = Position::centroid(agents).unwrap_or_default();
    let target_centroid = Position::centroid(&[t1, t2]).unwrap();
    let centroid_penalty = agent_centroid.distance(&target_centroid);
    let connected = graph.path_exists(targets.0, targets.1)?;
    let (path_bonus, total) =
        if connected { (T::lit(PATH_BONUS), T::lit(PATH_BONUS)) } else { (T::zero(), base - centroid_penalty) };
    Ok(RewardBreakdown { base, centroid_penalty, path_bonus, total })
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<T> {
    pub reward: RewardBreakdown<T>,
    /// One observation per agent, in agent order.
    pub observations: Vec<Observation<T>>,
    pub path_exists: bool,
}

/// Complete world state.
#[derive(Debug, Clone, PartialEq)]
pub struct World<T> {
    config: ScenarioConfig,
    agents: Vec<AgentState<T>>,
    targets: [TargetState<T>; 2],
    step_index: usize,
    graph: RangeGraph<T>,
    rng: Prng,
    stacks: Vec<ObservationStack<T>>,
}

impl<T: Scalar> World<T> {
    /// Starts an episode: agents at their configured starts, targets placed
    /// from the scenario seed.
    pub fn reset(config: &ScenarioConfig) -> Result<Self, EnvError> {
        config.validate()?;
        let mut rng = Prng::new(config.seed);
        let (t1, t2) = place_targets::<T>(&mut rng, config)?;
        let agents = config.agent_starts.iter().map(|p| Position::from_f64(p.x, p.y)).collect();
        Self::assemble(config, agents, (t1, t2), rng)
    }

    /// Builds a world with explicit node positions. The target update stream
    /// is still seeded from `config.seed`, but no placement draws are made.
    pub fn with_positions(
        config: &ScenarioConfig,
        agents: Vec<Position<T>>,
        targets: (Position<T>, Position<T>),
    ) -> Result<Self, EnvError> {
        let config = ScenarioConfig {
            n_agents: agents.len(),
            agent_starts: agents.iter().map(|p| p.to_f64()).collect(),
            ..config.clone()
        };
        config.validate()?;
        let rng = Prng::new(config.seed);
        Self::assemble(&config, agents, targets, rng)
    }

    fn assemble(
        config: &ScenarioConfig,
        agents: Vec<Position<T>>,
        targets: (Position<T>, Position<T>),
        rng: Prng,
    ) -> Result<Self, EnvError> {
        let n = agents.len() as u32;
        let agents: Vec<_> = agents
            .into_iter()
            .enumerate()
            .map(|(i, position)| AgentState { id: NodeId(i as u32), position, last_action: Action::HOLD })
            .collect();
        let targets = [
            TargetState { id: NodeId(n), position: targets.0 },
            TargetState { id: NodeId(n + 1), position: targets.1 },
        ];
        let graph = build_graph(&agents, &targets, T::lit(config.comm_range))?;
        let mut world = World {
            config: config.clone(),
            stacks: vec![ObservationStack::new(config.obs_stack_depth); agents.len()],
            agents,
            targets,
            step_index: 0,
            graph,
            rng,
        };
        for i in 0..world.agents.len() {
            let obs = world.build_observation(world.agents[i].id)?;
            world.stacks[i].push(obs)?;
        }
        Ok(world)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn agents(&self) -> &[AgentState<T>] {
        &self.agents
    }

    pub fn targets(&self) -> &[TargetState<T>; 2] {
        &self.targets
    }

    pub fn target_ids(&self) -> (NodeId, NodeId) {
        (self.targets[0].id, self.targets[1].id)
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn graph(&self) -> &RangeGraph<T> {
        &self.graph
    }

    pub fn rng(&self) -> &Prng {
        &self.rng
    }

    pub fn stacks(&self) -> &[ObservationStack<T>] {
        &self.stacks
    }

    pub fn is_done(&self) -> bool {
        self.step_index >= self.config.horizon
    }

    pub fn agent_positions(&self) -> Vec<Position<T>> {
        self.agents.iter().map(|a| a.position).collect()
    }

    pub fn targets_connected(&self) -> bool {
        let (t1, t2) = self.target_ids();
        self.graph.path_exists(t1, t2).expect("targets are graph nodes")
    }

    pub fn compute_reward(&self) -> RewardBreakdown<T> {
        compute_reward(&self.graph, &self.agent_positions(), self.target_ids()).expect("world graph holds every node")
    }

    /// Advances the world by one step under a joint action.
    pub fn step(&mut self, joint_action: &[Action]) -> Result<StepOutcome<T>, EnvError> {
        if joint_action.len() != self.agents.len() {
            return Err(EnvError::ActionArity { expected: self.agents.len(), got: joint_action.len() });
        }
        if self.is_done() {
            return Err(EnvError::HorizonReached(self.config.horizon));
        }
        let step_size = T::lit(self.config.step_size);
        for (agent, &action) in self.agents.iter_mut().zip(joint_action) {
            agent.position = apply_action(agent.position, action, step_size);
            agent.last_action = action;
        }
        let (t1, t2) =
            sample_target_move(&mut self.rng, self.targets[0].position, self.targets[1].position, &self.config);
        self.targets[0].position = t1;
        self.targets[1].position = t2;
        self.graph = build_graph(&self.agents, &self.targets, T::lit(self.config.comm_range))?;
        let reward = self.compute_reward();
        self.step_index += 1;

        let mut observations = Vec::with_capacity(self.agents.len());
        for i in 0..self.agents.len() {
            let obs = self.build_observation(self.agents[i].id)?;
            self.stacks[i].push(obs.clone())?;
            observations.push(obs);
        }
        Ok(StepOutcome { reward, observations, path_exists: self.targets_connected() })
    }

    /// One-hop observation of `agent` on the current graph.
    pub fn build_observation(&self, agent: NodeId) -> Result<Observation<T>, EnvError> {
        if !self.agents.iter().any(|a| a.id == agent) {
            return Err(EnvError::UnknownAgent(agent));
        }
        let sub = self.graph.one_hop_subgraph(agent)?;
        let t1_coord = self.targets[0].position;
        let t2_coord = self.targets[1].position;
        let rows = sub
            .nodes
            .iter()
            .map(|&id| {
                let (node_type, coord, action) = match self.agents.iter().find(|a| a.id == id) {
                    Some(a) => (NodeType::Agent, a.position, a.last_action.flat()),
                    None => (NodeType::Target, self.graph.position(id).expect("subgraph node"), 0),
                };
                ObservationRow { node_type, id, coord, action, t1_coord, t2_coord }
            })
            .collect();
        Ok(Observation { ego: agent, step_index: self.step_index, rows, local_edges: sub.edges })
    }
}

fn build_graph<T: Scalar>(
    agents: &[AgentState<T>],
    targets: &[TargetState<T>; 2],
    range: T,
) -> Result<RangeGraph<T>, GraphError> {
    let nodes = agents.iter().map(|a| (a.id, a.position)).chain(targets.iter().map(|t| (t.id, t.position))).collect();
    RangeGraph::build(nodes, range)
}
