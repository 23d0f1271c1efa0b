//! Per-step episode traces and their CSV form.
//!
//! One row per `(step, node)` with the columns
//! `step,node_id,node_type,x,y,action,path_exists,reward_total`. Floats carry
//! nine significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bridgenet_core::{NodeId, NodeType, RewardBreakdown, ScenarioConfig, World};

use crate::error::HarnessError;

pub const TRACE_HEADER: &str = "step,node_id,node_type,x,y,action,path_exists,reward_total";

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub node_type: NodeType,
    pub x: f64,
    pub y: f64,
    /// Flat action code; 0 for targets.
    pub action: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Step index of the state this record describes (1 for the state after
    /// the first joint action).
    pub step: usize,
    pub nodes: Vec<NodeRecord>,
    pub reward: RewardBreakdown,
    pub path_exists: bool,
}

impl StepRecord {
    pub fn capture(world: &World, reward: RewardBreakdown, path_exists: bool) -> Self {
        let agents = world.agents().iter().map(|a| NodeRecord {
            id: a.id,
            node_type: NodeType::Agent,
            x: a.position.x,
            y: a.position.y,
            action: a.last_action.flat(),
        });
        let targets = world.targets().iter().map(|t| NodeRecord {
            id: t.id,
            node_type: NodeType::Target,
            x: t.position.x,
            y: t.position.y,
            action: 0,
        });
        StepRecord { step: world.step_index(), nodes: agents.chain(targets).collect(), reward, path_exists }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub scenario: ScenarioConfig,
    pub records: Vec<StepRecord>,
}

/// `%.9g`-style formatting: nine significant digits, trailing zeros dropped,
/// scientific notation outside `1e-4 <= |v| < 1e9`.
pub fn format_sig9(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{value:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs());
    }
    let fixed = format!("{value:.*}", (8 - exp) as usize);
    trim_zeros(&fixed).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders the CSV text of a trace.
pub fn render_trace(trace: &EpisodeTrace) -> String {
    let mut out = String::with_capacity(64 * trace.records.len() * 5);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for rec in &trace.records {
        for node in &rec.nodes {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                rec.step,
                node.id,
                node.node_type.code(),
                format_sig9(node.x),
                format_sig9(node.y),
                node.action,
                rec.path_exists,
                format_sig9(rec.reward.total)
            )
            .unwrap();
        }
    }
    out
}

pub fn export_trace(trace: &EpisodeTrace, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, render_trace(trace)).map_err(|e| HarnessError::io(path, e))
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub node_id: NodeId,
    pub node_type: NodeType,
    pub x: f64,
    pub y: f64,
    pub action: u8,
    pub path_exists: bool,
    pub reward_total: f64,
}

/// A trace file read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub path: PathBuf,
    pub rows: Vec<TraceRow>,
}

impl TraceTable {
    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, HarnessError> {
        let columns: Vec<&str> = TRACE_HEADER.split(',').collect();
        let malformed = |row: usize, column: &str, reason: String| HarnessError::MalformedTrace {
            path: path.to_path_buf(),
            row,
            column: column.to_string(),
            reason,
        };
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == TRACE_HEADER => {}
            other => {
                return Err(malformed(
                    0,
                    "header",
                    format!("expected `{TRACE_HEADER}`, found `{}`", other.unwrap_or("")),
                ))
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = i + 1;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns.len() {
                return Err(malformed(row, "*", format!("expected {} fields, found {}", columns.len(), fields.len())));
            }
            fn field<T: std::str::FromStr>(s: &str) -> Result<T, String>
            where
                T::Err: std::fmt::Display,
            {
                s.parse::<T>().map_err(|e| format!("cannot parse `{s}`: {e}"))
            }
            let step = field::<usize>(fields[0]).map_err(|r| malformed(row, columns[0], r))?;
            let node_id = field::<u32>(fields[1]).map_err(|r| malformed(row, columns[1], r))?;
            let node_type = match fields[2] {
                "A" => NodeType::Agent,
                "T" => NodeType::Target,
                other => return Err(malformed(row, columns[2], format!("unknown node type `{other}`"))),
            };
            let x = field::<f64>(fields[3]).map_err(|r| malformed(row, columns[3], r))?;
            let y = field::<f64>(fields[4]).map_err(|r| malformed(row, columns[4], r))?;
            let action = field::<u8>(fields[5]).map_err(|r| malformed(row, columns[5], r))?;
            if action > 8 {
                return Err(malformed(row, columns[5], format!("action {action} outside 0..=8")));
            }
            let path_exists = field::<bool>(fields[6]).map_err(|r| malformed(row, columns[6], r))?;
            let reward_total = field::<f64>(fields[7]).map_err(|r| malformed(row, columns[7], r))?;
            rows.push(TraceRow { step, node_id: NodeId(node_id), node_type, x, y, action, path_exists, reward_total });
        }
        Ok(TraceTable { path: path.to_path_buf(), rows })
    }

    /// Rows grouped by step, in file order. Steps must be contiguous and
    /// strictly increasing, and each step must agree on its step-level
    /// columns.
    pub fn steps(&self) -> Result<Vec<&[TraceRow]>, HarnessError> {
        let mut groups: Vec<&[TraceRow]> = Vec::new();
        let mut start = 0;
        for i in 1..=self.rows.len() {
            if i == self.rows.len() || self.rows[i].step != self.rows[start].step {
                let group = &self.rows[start..i];
                if let Some(prev) = groups.last() {
                    if group[0].step <= prev[0].step {
                        return Err(self.bad(start + 1, "step", format!("step {} out of order", group[0].step)));
                    }
                }
                for (k, r) in group.iter().enumerate() {
                    if r.path_exists != group[0].path_exists {
                        return Err(self.bad(start + k + 1, "path_exists", "differs within one step".into()));
                    }
                    if r.reward_total.to_bits() != group[0].reward_total.to_bits() {
                        return Err(self.bad(start + k + 1, "reward_total", "differs within one step".into()));
                    }
                }
                groups.push(group);
                start = i;
            }
        }
        Ok(groups)
    }

    fn bad(&self, row: usize, column: &str, reason: String) -> HarnessError {
        HarnessError::MalformedTrace { path: self.path.clone(), row, column: column.to_string(), reason }
    }
}
