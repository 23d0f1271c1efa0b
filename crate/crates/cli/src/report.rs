//! The machine-readable run report and its text rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bridgenet_harness::trace::format_sig9;
use bridgenet_harness::{render_summary, BatchSummary, EpisodeMetrics};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub index: usize,
    pub seed: u64,
    /// Trace file name, relative to the trace directory; absent for failed
    /// episodes.
    pub trace: Option<String>,
    pub coverage: Option<f64>,
    pub total_return: Option<f64>,
    pub bridged_steps: Option<usize>,
    pub error: Option<String>,
}

impl ScenarioRow {
    pub fn completed(index: usize, seed: u64, trace: String, m: &EpisodeMetrics) -> Self {
        ScenarioRow {
            index,
            seed,
            trace: Some(trace),
            coverage: Some(m.coverage),
            total_return: Some(m.total_return),
            bridged_steps: Some(m.bridged_steps),
            error: None,
        }
    }

    pub fn failed(index: usize, seed: u64, error: String) -> Self {
        ScenarioRow {
            index,
            seed,
            trace: None,
            coverage: None,
            total_return: None,
            bridged_steps: None,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub summary: BatchSummary,
    pub scenarios: Vec<ScenarioRow>,
}

impl RunReport {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{:>5}  {:>20}  {:>9}  {:>14}  {:>7}", "#", "seed", "coverage", "return", "bridged").unwrap();
        for row in &self.scenarios {
            match (&row.error, row.coverage, row.total_return, row.bridged_steps) {
                (None, Some(c), Some(r), Some(b)) => writeln!(
                    out,
                    "{:>5}  {:>20}  {:>9}  {:>14}  {:>7}",
                    row.index,
                    row.seed,
                    format_sig9(c),
                    format_sig9(r),
                    b
                ),
                (err, ..) => writeln!(
                    out,
                    "{:>5}  {:>20}  FAILED: {}",
                    row.index,
                    row.seed,
                    err.as_deref().unwrap_or("incomplete row")
                ),
            }
            .unwrap();
        }
        out.push_str(&render_summary(&self.summary));
        out
    }
}
