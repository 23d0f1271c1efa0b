//! Centralized line-formation baseline.
//!
//! Agents are spread over interior points of the segment joining the two
//! targets, assigned greedily (in agent order) to the nearest free point, and
//! steered with the compass move best aligned with the bearing to that point.

use thiserror::Error;

use crate::env::{Action, World};
use crate::geometry::{NodeId, Position};
use crate::scalar::Scalar;

/// Agents closer than this to their endpoint hold position.
pub const HOLD_RADIUS: f64 = 0.1;

/// Below this `|x2 - x1|` the line is treated as vertical.
const VERTICAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    #[error("{agents} agents cannot be matched to {endpoints} endpoints")]
    CardinalityMismatch { agents: usize, endpoints: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointAssignment<T> {
    /// `(agent, endpoint)` in agent order.
    pub pairs: Vec<(NodeId, Position<T>)>,
}

/// `n` evenly spaced interior points on the line through `t1` and `t2`.
///
/// Point `k` (1-based) sits at fraction `k / (n + 1)` of the way from `t1` to
/// `t2` in x, with y from the line's slope and intercept. Near-vertical lines
/// are spaced along y instead; coincident targets put every point on `t1`.
pub fn compute_endpoints<T: Scalar>(t1: Position<T>, t2: Position<T>, n: usize) -> Vec<Position<T>> {
    if t1 == t2 {
        return vec![t1; n];
    }
    let denom = T::from_usize(n + 1).unwrap();
    let fraction = |k: usize| T::from_usize(k).unwrap() / denom;
    let dx = t2.x - t1.x;
    if dx.abs() < T::lit(VERTICAL_EPS) {
        return (1..=n).map(|k| Position::new(t1.x, t1.y + fraction(k) * (t2.y - t1.y))).collect();
    }
    let slope = (t2.y - t1.y) / dx;
    let intercept = t1.y - slope * t1.x;
    (1..=n)
        .map(|k| {
            let x = t1.x + fraction(k) * dx;
            Position::new(x, slope * x + intercept)
        })
        .collect()
}

/// Greedy nearest-endpoint matching in agent order; ties go to the lower
/// endpoint index.
pub fn assign_endpoints<T: Scalar>(
    agents: &[(NodeId, Position<T>)],
    endpoints: &[Position<T>],
) -> Result<EndpointAssignment<T>, HeuristicError> {
    if agents.len() != endpoints.len() {
        return Err(HeuristicError::CardinalityMismatch { agents: agents.len(), endpoints: endpoints.len() });
    }
    let mut free: Vec<Position<T>> = endpoints.to_vec();
    let mut pairs = Vec::with_capacity(agents.len());
    for &(id, pos) in agents {
        let mut best = 0;
        for (k, e) in free.iter().enumerate().skip(1) {
            if pos.distance(e) < pos.distance(&free[best]) {
                best = k;
            }
        }
        pairs.push((id, free.remove(best)));
    }
    Ok(EndpointAssignment { pairs })
}

/// Discretizes the bearing from `agent` to `endpoint` into a compass move.
///
/// Returns hold within [`HOLD_RADIUS`]; otherwise the non-hold action whose
/// unit direction has the largest dot product with the bearing, lowest flat
/// code on ties.
pub fn select_action<T: Scalar>(agent: Position<T>, endpoint: Position<T>) -> Action {
    let dist = agent.distance(&endpoint);
    if dist <= T::lit(HOLD_RADIUS) {
        return Action::HOLD;
    }
    let ux = (endpoint.x - agent.x) / dist;
    let uy = (endpoint.y - agent.y) / dist;
    let mut best = Action::HOLD;
    let mut best_score = T::neg_infinity();
    for action in Action::ALL.into_iter().filter(|a| !a.is_hold()) {
        let (dx, dy) = (T::from_i8(action.dx()).unwrap(), T::from_i8(action.dy()).unwrap());
        let score = (dx * ux + dy * uy) / (dx * dx + dy * dy).sqrt();
        if score > best_score {
            best = action;
            best_score = score;
        }
    }
    best
}

/// Joint action for the whole swarm on the current world state.
pub fn act<T: Scalar>(world: &World<T>) -> Vec<Action> {
    let [t1, t2] = world.targets();
    let endpoints = compute_endpoints(t1.position, t2.position, world.agents().len());
    let agents: Vec<_> = world.agents().iter().map(|a| (a.id, a.position)).collect();
    let assignment = assign_endpoints(&agents, &endpoints).expect("one endpoint per agent");
    assignment.pairs.iter().zip(&agents).map(|(&(_, endpoint), &(_, pos))| select_action(pos, endpoint)).collect()
}
