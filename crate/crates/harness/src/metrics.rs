//! Coverage and return, per episode and aggregated over a batch.

use bridgenet_core::{NodeId, NodeType, Position, RangeGraph};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::trace::{format_sig9, EpisodeTrace, TraceTable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    /// Fraction of steps with a T1-T2 path.
    pub coverage: f64,
    /// `sum_t discount^t * reward_t`, t counted from 0.
    pub total_return: f64,
    pub bridged_steps: usize,
    pub horizon: usize,
}

impl EpisodeMetrics {
    pub fn from_flags_and_rewards<I>(steps: I, discount: f64) -> Self
    where
        I: IntoIterator<Item = (bool, f64)>,
    {
        let (mut bridged_steps, mut horizon) = (0, 0);
        let mut total_return = 0.0;
        let mut weight = 1.0;
        for (path_exists, reward) in steps {
            horizon += 1;
            bridged_steps += path_exists as usize;
            total_return += weight * reward;
            weight *= discount;
        }
        let coverage = if horizon == 0 { 0.0 } else { bridged_steps as f64 / horizon as f64 };
        EpisodeMetrics { coverage, total_return, bridged_steps, horizon }
    }

    pub fn from_trace(trace: &EpisodeTrace) -> Self {
        Self::from_flags_and_rewards(
            trace.records.iter().map(|r| (r.path_exists, r.reward.total)),
            trace.scenario.discount,
        )
    }
}

/// Machine-readable batch summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub mean_coverage: f64,
    pub std_coverage: f64,
    pub mean_return: f64,
    pub std_return: f64,
    pub n_scenarios: usize,
    pub n_failures: usize,
}

impl BatchSummary {
    /// Mean and population standard deviation over the completed episodes.
    pub fn aggregate(completed: &[EpisodeMetrics], n_failures: usize) -> Self {
        let coverage: Vec<f64> = completed.iter().map(|m| m.coverage).collect();
        let returns: Vec<f64> = completed.iter().map(|m| m.total_return).collect();
        let (mean_coverage, std_coverage) = mean_std(&coverage);
        let (mean_return, std_return) = mean_std(&returns);
        BatchSummary {
            mean_coverage,
            std_coverage,
            mean_return,
            std_return,
            n_scenarios: completed.len() + n_failures,
            n_failures,
        }
    }

    /// Fields rendered at trace precision, for comparing summaries that went
    /// through a CSV round trip.
    pub fn rendered(&self) -> [String; 6] {
        [
            format_sig9(self.mean_coverage),
            format_sig9(self.std_coverage),
            format_sig9(self.mean_return),
            format_sig9(self.std_return),
            self.n_scenarios.to_string(),
            self.n_failures.to_string(),
        ]
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    // shifted by the first sample so identical inputs give exactly zero spread
    let n = values.len() as f64;
    let shift = values[0];
    let sum: f64 = values.iter().map(|v| v - shift).sum();
    let sum_sq: f64 = values.iter().map(|v| (v - shift) * (v - shift)).sum();
    let mean_offset = sum / n;
    let var = (sum_sq / n - mean_offset * mean_offset).max(0.0);
    (shift + mean_offset, var.sqrt())
}

/// Metrics recomputed from a trace file, plus the steps whose logged
/// `path_exists` disagrees with the positions in the same rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceAudit {
    pub metrics: EpisodeMetrics,
    pub mismatched_steps: Vec<usize>,
}

impl TraceAudit {
    pub fn is_consistent(&self) -> bool {
        self.mismatched_steps.is_empty()
    }
}

/// Recomputes coverage/return from the exported columns and re-derives the
/// path flag of every step from its logged positions.
pub fn audit_trace(table: &TraceTable, comm_range: f64, discount: f64) -> Result<TraceAudit, HarnessError> {
    let steps = table.steps()?;
    let mut mismatched_steps = Vec::new();
    for rows in &steps {
        let mut targets: Vec<NodeId> =
            rows.iter().filter(|r| r.node_type == NodeType::Target).map(|r| r.node_id).collect();
        targets.sort();
        if targets.len() != 2 {
            return Err(HarnessError::MalformedTrace {
                path: table.path.clone(),
                row: 0,
                column: "node_type".into(),
                reason: format!("step {} has {} target rows, expected 2", rows[0].step, targets.len()),
            });
        }
        let nodes = rows.iter().map(|r| (r.node_id, Position::new(r.x, r.y))).collect();
        let graph = RangeGraph::build(nodes, comm_range).map_err(|e| HarnessError::MalformedTrace {
            path: table.path.clone(),
            row: 0,
            column: "node_id".into(),
            reason: format!("step {}: {e}", rows[0].step),
        })?;
        let connected = graph.path_exists(targets[0], targets[1]).expect("targets are in the graph");
        if connected != rows[0].path_exists {
            mismatched_steps.push(rows[0].step);
        }
    }
    let metrics = EpisodeMetrics::from_flags_and_rewards(
        steps.iter().map(|rows| (rows[0].path_exists, rows[0].reward_total)),
        discount,
    );
    Ok(TraceAudit { metrics, mismatched_steps })
}
