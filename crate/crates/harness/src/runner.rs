//! Episode and batch execution.

use std::fmt::Write as _;

use bridgenet_core::{ScenarioConfig, World};
use rayon::prelude::*;

use crate::error::HarnessError;
use crate::metrics::{BatchSummary, EpisodeMetrics};
use crate::policy::{Policy, PolicyEndpoint};
use crate::trace::{format_sig9, EpisodeTrace, StepRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRun {
    pub trace: EpisodeTrace,
    pub metrics: EpisodeMetrics,
}

/// Runs one full episode against the given endpoint.
pub fn run_episode(endpoint: &PolicyEndpoint, scenario: &ScenarioConfig) -> Result<EpisodeRun, HarnessError> {
    scenario.validate()?;
    let mut policy = endpoint.open(scenario)?;
    run_episode_with(policy.as_mut(), scenario)
}

/// Runs one full episode with an already opened policy.
pub fn run_episode_with(policy: &mut dyn Policy, scenario: &ScenarioConfig) -> Result<EpisodeRun, HarnessError> {
    let mut world = World::reset(scenario)?;
    let mut records = Vec::with_capacity(scenario.horizon);
    while !world.is_done() {
        let joint = policy.decide(&world)?;
        let outcome = world.step(&joint)?;
        records.push(StepRecord::capture(&world, outcome.reward, outcome.path_exists));
    }
    policy.finish()?;
    let trace = EpisodeTrace { scenario: scenario.clone(), records };
    let metrics = EpisodeMetrics::from_trace(&trace);
    Ok(EpisodeRun { trace, metrics })
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub index: usize,
    pub seed: u64,
    pub result: Result<EpisodeRun, HarnessError>,
}

#[derive(Debug)]
pub struct BatchReport {
    /// In scenario order regardless of how the work was scheduled.
    pub outcomes: Vec<ScenarioOutcome>,
    pub summary: BatchSummary,
}

/// Runs every scenario, `parallelism` episodes at a time. A failed episode
/// is recorded and does not stop the batch.
pub fn run_batch(
    endpoint: &PolicyEndpoint,
    scenarios: &[ScenarioConfig],
    parallelism: usize,
) -> Result<BatchReport, HarnessError> {
    let run = |(index, scenario): (usize, &ScenarioConfig)| ScenarioOutcome {
        index,
        seed: scenario.seed,
        result: run_episode(endpoint, scenario),
    };
    let outcomes: Vec<ScenarioOutcome> = if parallelism <= 1 {
        scenarios.iter().enumerate().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| HarnessError::Protocol(format!("cannot start worker pool: {e}")))?;
        pool.install(|| scenarios.par_iter().enumerate().map(run).collect())
    };
    let completed: Vec<EpisodeMetrics> =
        outcomes.iter().filter_map(|o| o.result.as_ref().ok().map(|r| r.metrics)).collect();
    let summary = BatchSummary::aggregate(&completed, outcomes.len() - completed.len());
    Ok(BatchReport { outcomes, summary })
}

/// Plain-text table of per-scenario results followed by the summary.
pub fn render_report(report: &BatchReport) -> String {
    let mut out = String::new();
    writeln!(out, "{:>5}  {:>20}  {:>9}  {:>14}  {:>7}", "#", "seed", "coverage", "return", "bridged").unwrap();
    for o in &report.outcomes {
        match &o.result {
            Ok(run) => writeln!(
                out,
                "{:>5}  {:>20}  {:>9}  {:>14}  {:>7}",
                o.index,
                o.seed,
                format_sig9(run.metrics.coverage),
                format_sig9(run.metrics.total_return),
                run.metrics.bridged_steps
            )
            .unwrap(),
            Err(e) => writeln!(out, "{:>5}  {:>20}  FAILED: {e}", o.index, o.seed).unwrap(),
        }
    }
    out.push_str(&render_summary(&report.summary));
    out
}

pub fn render_summary(s: &BatchSummary) -> String {
    format!(
        "scenarios {}  failures {}\ncoverage  {} ± {}\nreturn    {} ± {}\n",
        s.n_scenarios,
        s.n_failures,
        format_sig9(s.mean_coverage),
        format_sig9(s.std_coverage),
        format_sig9(s.mean_return),
        format_sig9(s.std_return)
    )
}
