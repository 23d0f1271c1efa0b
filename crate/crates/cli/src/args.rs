use std::path::PathBuf;

use bridgenet_core::{Position, ScenarioConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Simulator, baseline and evaluation harness for multi-agent network
/// bridging between two moving targets.
///
/// Every flag with a default can also be set through the environment
/// variable shown next to it (prefix BRIDGENET_).
#[derive(Debug, Parser)]
#[command(name = "bridgenet", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a scenario batch file.
    Gen(GenArgs),
    /// Run a policy over a scenario batch, writing one trace per scenario
    /// and an aggregate report.
    Run(RunArgs),
    /// Recompute metrics from trace files alone and check them against the
    /// positions they log and the report written by `run`.
    Eval(EvalArgs),
    /// Re-simulate one scenario from the actions logged in its trace and
    /// compare the result byte for byte.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Batch seed; per-scenario seeds are derived from it.
    #[arg(long, env = "BRIDGENET_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Number of scenarios.
    #[arg(long, env = "BRIDGENET_COUNT", default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Output file (one JSON record per line).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigOverrides,
}

/// Overrides applied on top of the default scenario parameters.
#[derive(Debug, Args)]
pub struct ConfigOverrides {
    #[arg(long, env = "BRIDGENET_N_AGENTS", help_heading = "Scenario parameters")]
    pub n_agents: Option<usize>,
    #[arg(long, env = "BRIDGENET_COMM_RANGE", allow_negative_numbers = true, help_heading = "Scenario parameters")]
    pub comm_range: Option<f64>,
    #[arg(long, env = "BRIDGENET_STEP_SIZE", allow_negative_numbers = true, help_heading = "Scenario parameters")]
    pub step_size: Option<f64>,
    #[arg(long, env = "BRIDGENET_HORIZON", help_heading = "Scenario parameters")]
    pub horizon: Option<usize>,
    #[arg(
        long,
        env = "BRIDGENET_TARGET_DIST_MIN",
        allow_negative_numbers = true,
        help_heading = "Scenario parameters"
    )]
    pub target_dist_min: Option<f64>,
    #[arg(
        long,
        env = "BRIDGENET_TARGET_DIST_MAX",
        allow_negative_numbers = true,
        help_heading = "Scenario parameters"
    )]
    pub target_dist_max: Option<f64>,
    /// Start positions as `x,y` pairs separated by `;`, one per agent.
    #[arg(
        long,
        env = "BRIDGENET_AGENT_STARTS",
        value_delimiter = ';',
        value_parser = parse_position,
        help_heading = "Scenario parameters"
    )]
    pub agent_starts: Option<Vec<Position>>,
    #[arg(long, env = "BRIDGENET_OBS_STACK_DEPTH", help_heading = "Scenario parameters")]
    pub obs_stack_depth: Option<usize>,
    #[arg(long, env = "BRIDGENET_DISCOUNT", allow_negative_numbers = true, help_heading = "Scenario parameters")]
    pub discount: Option<f64>,
}

impl ConfigOverrides {
    pub fn apply(&self, mut config: ScenarioConfig) -> ScenarioConfig {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    config.$field = v.clone();
                }
            )*};
        }
        set!(
            n_agents,
            comm_range,
            step_size,
            horizon,
            target_dist_min,
            target_dist_max,
            agent_starts,
            obs_stack_depth,
            discount
        );
        config
    }
}

fn parse_position(s: &str) -> Result<Position, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let coord = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad coordinate `{v}`: {e}"));
    Ok(Position::new(coord(x)?, coord(y)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyKind {
    Heuristic,
    Remote,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, env = "BRIDGENET_POLICY", value_enum, default_value_t = PolicyKind::Heuristic)]
    pub policy: PolicyKind,
    /// Address of the remote policy (HOST:PORT); required with `--policy remote`.
    #[arg(long, env = "BRIDGENET_POLICY_ADDR", required_if_eq("policy", "remote"))]
    pub policy_addr: Option<String>,
    /// Per-message timeout for the remote policy.
    #[arg(long, env = "BRIDGENET_TIMEOUT_MS", default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout_ms: u64,
    /// Scenario batch file written by `gen`.
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Output directory for traces and `report.json`; created if missing.
    #[arg(long)]
    pub traces: PathBuf,
    /// Episodes run concurrently.
    #[arg(long, env = "BRIDGENET_PARALLEL", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub parallel: u64,
    /// Extra copy of the machine-readable report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory holding the trace files (`*.csv`).
    #[arg(long)]
    pub traces: PathBuf,
    /// Report to compare against; defaults to `report.json` inside the
    /// trace directory when present.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Take range and discount per trace from this batch file instead of
    /// the flags below. Trace files must then be named `trace_NNNN.csv`.
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    #[arg(long, env = "BRIDGENET_COMM_RANGE", allow_negative_numbers = true, default_value_t = 0.25)]
    pub comm_range: f64,
    #[arg(long, env = "BRIDGENET_DISCOUNT", allow_negative_numbers = true, default_value_t = 1.0)]
    pub discount: f64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Zero-based position of the scenario in the batch file.
    #[arg(long)]
    pub index: usize,
    #[arg(long)]
    pub trace: PathBuf,
}
