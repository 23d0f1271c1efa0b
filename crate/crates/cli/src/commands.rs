use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::time::Duration;

use bridgenet_core::scenario::{generate, read_batch, write_batch};
use bridgenet_core::{Action, NodeType, ScenarioConfig, World};
use bridgenet_harness::trace::format_sig9;
use bridgenet_harness::{
    audit_trace, export_trace, render_trace, run_batch, run_episode_with, BatchSummary, EpisodeMetrics, HarnessError,
    Policy, PolicyEndpoint, TraceTable,
};

use crate::args::{EvalArgs, GenArgs, PolicyKind, ReplayArgs, RunArgs};
use crate::error::CliError;
use crate::report::{RunReport, ScenarioRow, REPORT_FILE};

pub fn gen(args: &GenArgs) -> Result<(), CliError> {
    let base = args.config.apply(ScenarioConfig::default());
    base.validate()?;
    let scenarios = generate(args.seed, args.count as usize, &base);
    // place the targets of every scenario once so an unsatisfiable distance
    // band is reported here rather than at run time
    for s in &scenarios {
        World::reset(s).map_err(|e| CliError::Usage(format!("scenario seed {}: {e}", s.seed)))?;
    }
    write_batch(&args.out, &scenarios)?;
    println!("wrote {} scenarios to {}", scenarios.len(), args.out.display());
    Ok(())
}

pub fn trace_file_name(index: usize) -> String {
    format!("trace_{index:04}.csv")
}

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    let scenarios = read_batch(&args.scenarios)?;
    if scenarios.is_empty() {
        return Err(CliError::Usage(format!("{} holds no scenarios", args.scenarios.display())));
    }
    let endpoint = match args.policy {
        PolicyKind::Heuristic => PolicyEndpoint::Heuristic,
        PolicyKind::Remote => PolicyEndpoint::Remote {
            address: args.policy_addr.clone().ok_or_else(|| CliError::Usage("--policy-addr is required".into()))?,
            timeout: Duration::from_millis(args.timeout_ms),
        },
    };
    fs::create_dir_all(&args.traces).map_err(|e| CliError::io(&args.traces, e))?;

    let batch = run_batch(&endpoint, &scenarios, args.parallel as usize)?;
    let mut rows = Vec::with_capacity(batch.outcomes.len());
    let mut completed = Vec::new();
    let mut policy_failures = 0;
    for outcome in &batch.outcomes {
        match &outcome.result {
            Ok(run) => {
                let name = trace_file_name(outcome.index);
                let path = args.traces.join(&name);
                export_trace(&run.trace, &path)?;
                // the report is derived from the file just written so that
                // `eval` reproduces it exactly
                let scenario = &scenarios[outcome.index];
                let audit = audit_trace(&TraceTable::read(&path)?, scenario.comm_range, scenario.discount)?;
                if !audit.is_consistent() {
                    return Err(CliError::Mismatch(format!(
                        "{}: logged path flags disagree with logged positions at steps {:?}",
                        path.display(),
                        audit.mismatched_steps
                    )));
                }
                rows.push(ScenarioRow::completed(outcome.index, outcome.seed, name, &audit.metrics));
                completed.push(audit.metrics);
            }
            Err(e) => {
                policy_failures += e.is_policy_error() as usize;
                rows.push(ScenarioRow::failed(outcome.index, outcome.seed, e.to_string()));
            }
        }
    }
    let failures = rows.len() - completed.len();
    let report = RunReport { summary: BatchSummary::aggregate(&completed, failures), scenarios: rows };
    report.write(&args.traces.join(REPORT_FILE))?;
    if let Some(extra) = &args.report {
        report.write(extra)?;
    }
    print!("{}", report.render());

    match (failures, policy_failures) {
        (0, _) => Ok(()),
        (n, p) if p > 0 => Err(CliError::Policy(format!("{n} of {} episodes failed", scenarios.len()))),
        (n, _) => Err(CliError::Episodes(format!("{n} of {} episodes failed", scenarios.len()))),
    }
}

struct EvalEntry {
    name: String,
    metrics: EpisodeMetrics,
    flagged: Vec<usize>,
}

fn csv_files(dir: &Path) -> Result<Vec<String>, CliError> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".csv") && entry.path().is_file() {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}

fn trace_index(name: &str) -> Option<usize> {
    name.strip_prefix("trace_")?.strip_suffix(".csv")?.parse().ok()
}

pub fn eval(args: &EvalArgs) -> Result<(), CliError> {
    let report_path = args.report.clone().or_else(|| {
        let default = args.traces.join(REPORT_FILE);
        default.is_file().then_some(default)
    });
    let report = report_path.as_deref().map(RunReport::read).transpose()?;
    let scenarios = args.scenarios.as_deref().map(read_batch).transpose()?;

    let on_disk = csv_files(&args.traces)?;
    if on_disk.is_empty() {
        return Err(CliError::Usage(format!("no trace files in {}", args.traces.display())));
    }
    let mut problems = Vec::new();
    // with a report, evaluate in report order so aggregates are summed in the
    // same order as at run time
    let names: Vec<String> = match &report {
        Some(r) => {
            let listed: Vec<String> = r.scenarios.iter().filter_map(|row| row.trace.clone()).collect();
            let listed_set: BTreeSet<&String> = listed.iter().collect();
            for name in &on_disk {
                if !listed_set.contains(name) {
                    problems.push(format!("{name}: not listed in the report"));
                }
            }
            for name in &listed {
                if !on_disk.contains(name) {
                    problems.push(format!("{name}: listed in the report but missing"));
                }
            }
            listed.into_iter().filter(|n| on_disk.contains(n)).collect()
        }
        None => on_disk,
    };

    let mut entries = Vec::with_capacity(names.len());
    for name in names {
        let (comm_range, discount) = match &scenarios {
            Some(batch) => {
                let config = trace_index(&name)
                    .and_then(|i| batch.get(i))
                    .ok_or_else(|| CliError::Usage(format!("{name}: no matching scenario in the batch file")))?;
                (config.comm_range, config.discount)
            }
            None => (args.comm_range, args.discount),
        };
        let table = TraceTable::read(&args.traces.join(&name))?;
        let audit = audit_trace(&table, comm_range, discount)?;
        for step in &audit.mismatched_steps {
            problems.push(format!("{name}: step {step}: path_exists does not match the logged positions"));
        }
        entries.push(EvalEntry { name, metrics: audit.metrics, flagged: audit.mismatched_steps });
    }

    let failures = report.as_ref().map_or(0, |r| r.summary.n_failures);
    let completed: Vec<EpisodeMetrics> = entries.iter().map(|e| e.metrics).collect();
    let summary = BatchSummary::aggregate(&completed, failures);

    println!("{:<20}  {:>9}  {:>14}  {:>7}  {:>7}", "trace", "coverage", "return", "bridged", "flagged");
    for e in &entries {
        println!(
            "{:<20}  {:>9}  {:>14}  {:>7}  {:>7}",
            e.name,
            format_sig9(e.metrics.coverage),
            format_sig9(e.metrics.total_return),
            e.metrics.bridged_steps,
            e.flagged.len()
        );
    }
    print!("{}", bridgenet_harness::render_summary(&summary));

    if let Some(report) = &report {
        for e in &entries {
            let Some(row) = report.scenarios.iter().find(|r| r.trace.as_deref() == Some(e.name.as_str())) else {
                continue;
            };
            let same = row.coverage == Some(e.metrics.coverage)
                && row.total_return == Some(e.metrics.total_return)
                && row.bridged_steps == Some(e.metrics.bridged_steps);
            if !same {
                problems.push(format!(
                    "{}: recomputed coverage {} / return {} / bridged {} differ from the report",
                    e.name, e.metrics.coverage, e.metrics.total_return, e.metrics.bridged_steps
                ));
            }
        }
        if report.summary != summary {
            problems.push("batch summary differs from the report".into());
        }
        println!("compared against {}", report_path.as_deref().unwrap_or(Path::new("")).display());
    }

    if problems.is_empty() {
        println!("ok");
        Ok(())
    } else {
        for p in &problems {
            eprintln!("mismatch: {p}");
        }
        Err(CliError::Mismatch(format!("{} verification problem(s)", problems.len())))
    }
}

/// Replays a fixed list of joint actions, indexed by the world's step.
struct LoggedActions(Vec<Vec<Action>>);

impl Policy for LoggedActions {
    fn decide(&mut self, world: &World) -> Result<Vec<Action>, HarnessError> {
        Ok(self.0[world.step_index()].clone())
    }
}

fn logged_actions(table: &TraceTable, scenario: &ScenarioConfig) -> Result<Vec<Vec<Action>>, CliError> {
    let steps = table.steps()?;
    if steps.len() != scenario.horizon {
        return Err(CliError::Mismatch(format!(
            "{}: {} steps logged, scenario horizon is {}",
            table.path.display(),
            steps.len(),
            scenario.horizon
        )));
    }
    steps
        .iter()
        .map(|rows| {
            let mut agents: Vec<_> = rows.iter().filter(|r| r.node_type == NodeType::Agent).collect();
            agents.sort_by_key(|r| r.node_id);
            if agents.len() != scenario.n_agents {
                return Err(CliError::Mismatch(format!(
                    "{}: step {} logs {} agents, scenario has {}",
                    table.path.display(),
                    rows[0].step,
                    agents.len(),
                    scenario.n_agents
                )));
            }
            agents.iter().map(|r| Action::from_flat(r.action as i64).map_err(|e| CliError::Harness(e.into()))).collect()
        })
        .collect()
}

pub fn replay(args: &ReplayArgs) -> Result<(), CliError> {
    let scenarios = read_batch(&args.scenarios)?;
    let scenario = scenarios.get(args.index).ok_or_else(|| {
        CliError::Usage(format!("--index {} out of range: batch holds {} scenarios", args.index, scenarios.len()))
    })?;
    let logged = fs::read_to_string(&args.trace).map_err(|e| CliError::io(&args.trace, e))?;
    let table = TraceTable::parse(&args.trace, &logged)?;
    let mut policy = LoggedActions(logged_actions(&table, scenario)?);
    let replayed = render_trace(&run_episode_with(&mut policy, scenario)?.trace);

    if replayed == logged {
        println!("{}: identical ({} steps, seed {})", args.trace.display(), scenario.horizon, scenario.seed);
        return Ok(());
    }
    let first = replayed.lines().zip(logged.lines()).position(|(a, b)| a != b);
    let detail = match first {
        Some(i) => format!(
            "first difference at line {}:\n  logged:   {}\n  replayed: {}",
            i + 1,
            logged.lines().nth(i).unwrap_or(""),
            replayed.lines().nth(i).unwrap_or("")
        ),
        None => "files differ in length or line endings".to_string(),
    };
    Err(CliError::Mismatch(format!("{}: replay differs; {detail}", args.trace.display())))
}
