//! Reproducible scenarios: the splitmix64 stream, target placement, the
//! target update rule and seeded scenario batches.
//!
//! Draw order is part of the reproducibility contract:
//! * placement consumes `x1, y1, x2, y2` per attempt;
//! * a target move consumes one draw for T1 then one for T2 per attempt;
//! * unit floats are `next_u64() as f64 / 2^64`;
//! * a move index in `0..9` is the high word of `next_u64() * 9`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{apply_action, Action};
use crate::geometry::Position;
use crate::scalar::Scalar;

/// Rejection budget for initial target placement.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 1_000_000;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario config: {field} {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("no target placement satisfied the distance constraint after {0} attempts")]
    Unsatisfiable(usize),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },
}

/// splitmix64 generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prng {
    state: u64,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform float in `[0, 1]`. The upper end is reachable only through
    /// rounding of values within 2^-54 of 2^64.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        self.next_u64() as f64 / TWO_POW_64
    }

    /// Integer in `0..bound` by multiply-high.
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// Everything needed to reproduce one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_agents: usize,
    pub comm_range: f64,
    pub step_size: f64,
    pub horizon: usize,
    pub target_dist_min: f64,
    pub target_dist_max: f64,
    pub agent_starts: Vec<Position<f64>>,
    pub obs_stack_depth: usize,
    pub discount: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 0,
            n_agents: 3,
            comm_range: 0.25,
            step_size: 0.05,
            horizon: 100,
            target_dist_min: 0.5,
            target_dist_max: 0.7,
            agent_starts: default_agent_starts(),
            obs_stack_depth: 3,
            discount: 1.0,
        }
    }
}

/// The three base-station start positions.
pub fn default_agent_starts() -> Vec<Position<f64>> {
    vec![Position::new(0.1, 0.42), Position::new(0.1, 0.52), Position::new(0.1, 0.62)]
}

impl ScenarioConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        ScenarioConfig { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        fn invalid(field: &'static str, reason: impl Into<String>) -> Result<(), ScenarioError> {
            Err(ScenarioError::InvalidConfig { field, reason: reason.into() })
        }
        if self.n_agents == 0 || self.n_agents > (u32::MAX - 2) as usize {
            return invalid("n_agents", format!("must be positive, got {}", self.n_agents));
        }
        if !(self.comm_range > 0.0 && self.comm_range.is_finite()) {
            return invalid("comm_range", format!("must be positive, got {}", self.comm_range));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return invalid("step_size", format!("must be positive, got {}", self.step_size));
        }
        if self.horizon == 0 {
            return invalid("horizon", "must be positive");
        }
        if self.target_dist_min.is_nan() || self.target_dist_min <= 0.0 {
            return invalid("target_dist_min", format!("must be positive, got {}", self.target_dist_min));
        }
        if !(self.target_dist_max >= self.target_dist_min && self.target_dist_max <= std::f64::consts::SQRT_2) {
            return invalid(
                "target_dist_max",
                format!("must lie in [target_dist_min, sqrt(2)], got {}", self.target_dist_max),
            );
        }
        if self.agent_starts.len() != self.n_agents {
            return invalid(
                "agent_starts",
                format!("has {} entries but n_agents is {}", self.agent_starts.len(), self.n_agents),
            );
        }
        if let Some(p) = self.agent_starts.iter().find(|p| !p.in_unit_square()) {
            return invalid("agent_starts", format!("position ({}, {}) is outside the unit map", p.x, p.y));
        }
        if self.obs_stack_depth == 0 {
            return invalid("obs_stack_depth", "must be positive");
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return invalid("discount", format!("must lie in [0, 1], got {}", self.discount));
        }
        Ok(())
    }

    fn distance_ok<T: Scalar>(&self, d: T) -> bool {
        d >= T::lit(self.target_dist_min) && d <= T::lit(self.target_dist_max)
    }
}

/// Places both targets uniformly at random, rejecting pairs whose distance
/// falls outside `[target_dist_min, target_dist_max]`.
pub fn place_targets<T: Scalar>(
    rng: &mut Prng,
    config: &ScenarioConfig,
) -> Result<(Position<T>, Position<T>), ScenarioError> {
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let x1 = rng.next_unit();
        let y1 = rng.next_unit();
        let x2 = rng.next_unit();
        let y2 = rng.next_unit();
        let t1 = Position::<T>::from_f64(x1, y1);
        let t2 = Position::<T>::from_f64(x2, y2);
        if config.distance_ok(t1.distance(&t2)) {
            return Ok((t1, t2));
        }
    }
    Err(ScenarioError::Unsatisfiable(MAX_PLACEMENT_ATTEMPTS))
}

/// One step of the target update rule.
///
/// Each target draws one of the nine grid moves; the joint move is resampled
/// until the moved pair still satisfies the distance constraint. Hold/hold is
/// always admissible when the current pair is, so the loop terminates with
/// probability one.
pub fn sample_target_move<T: Scalar>(
    rng: &mut Prng,
    t1: Position<T>,
    t2: Position<T>,
    config: &ScenarioConfig,
) -> (Position<T>, Position<T>) {
    let step = T::lit(config.step_size);
    loop {
        let a1 = Action::from_index(rng.next_below(9) as u8);
        let a2 = Action::from_index(rng.next_below(9) as u8);
        let n1 = apply_action(t1, a1, step);
        let n2 = apply_action(t2, a2, step);
        if config.distance_ok(n1.distance(&n2)) {
            return (n1, n2);
        }
    }
}

/// Per-scenario seed for entry `index` of a batch.
pub fn derive_seed(batch_seed: u64, index: u64) -> u64 {
    Prng::new(batch_seed ^ index).next_u64()
}

/// `count` copies of `base`, each with its own derived seed.
pub fn generate(seed: u64, count: usize, base: &ScenarioConfig) -> Vec<ScenarioConfig> {
    (0..count as u64).map(|i| base.with_seed(derive_seed(seed, i))).collect()
}

/// Writes a scenario batch as one JSON object per line.
pub fn write_batch(path: &Path, scenarios: &[ScenarioConfig]) -> Result<(), ScenarioError> {
    let io_err = |source| ScenarioError::Io { path: path.to_path_buf(), source };
    let mut out = Vec::new();
    for s in scenarios {
        serde_json::to_writer(&mut out, s).expect("scenario config serializes");
        out.push(b'\n');
    }
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(&out).map_err(io_err)
}

/// Reads a scenario batch. Blank lines are skipped; every record is validated.
pub fn read_batch(path: &Path) -> Result<Vec<ScenarioConfig>, ScenarioError> {
    let io_err = |source| ScenarioError::Io { path: path.to_path_buf(), source };
    let file = fs::File::open(path).map_err(io_err)?;
    let mut scenarios = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |reason: String| ScenarioError::Parse { path: path.to_path_buf(), line: i + 1, reason };
        let config: ScenarioConfig = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        config.validate().map_err(|e| parse_err(e.to_string()))?;
        scenarios.push(config);
    }
    Ok(scenarios)
}
