//! The learner comparison sweep.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use condrisk::learners::DEFAULT_RIDGE;
use condrisk::processes::{
    forward_posterior, forward_posterior_from, mix, per_state_risks, random_chain, simulate,
    stationary_distribution, OracleConfig, StatePosterior,
};
use condrisk::{
    ecrm_fit, erm_fit, par, sliding_window_fit, Fallback, HiddenMarkovSpec, Hypothesis, KernelName,
    SampleSequence, TrainConfig,
};

use crate::{load_spec, weighting_for, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Learner {
    Ecrm,
    Erm,
    SlidingWindow,
}

impl Learner {
    pub fn as_str(self) -> &'static str {
        match self {
            Learner::Ecrm => "ecrm",
            Learner::Erm => "erm",
            Learner::SlidingWindow => "sliding-window",
        }
    }
}

/// Which history the oracle conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluation {
    /// The whole training sequence, filtered from the process' initial law.
    #[default]
    Full,
    /// Only the last `d` samples, filtered from the stationary law.
    Window,
}

fn default_kernel() -> KernelName {
    KernelName::StratifiedSet
}

fn default_learners() -> Vec<Learner> {
    vec![Learner::Ecrm, Learner::Erm, Learner::SlidingWindow]
}

fn default_resolution() -> usize {
    OracleConfig::default().resolution
}

fn default_ridge() -> f64 {
    DEFAULT_RIDGE
}

/// One comparison run.
///
/// With `spec_path` every entry of `seeds` is a replicate simulation of
/// that process; otherwise each seed generates its own random chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_path: Option<PathBuf>,
    pub seeds: Vec<u64>,
    pub n_train: usize,
    pub d: Vec<usize>,
    pub bandwidths: Vec<f64>,
    #[serde(default = "default_kernel")]
    pub kernel: KernelName,
    #[serde(default = "default_learners")]
    pub learners: Vec<Learner>,
    #[serde(default = "default_resolution")]
    pub oracle_resolution: usize,
    #[serde(default)]
    pub evaluation: Evaluation,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_ridge")]
    pub ridge: f64,
    #[serde(default)]
    pub fallback: Fallback,
    /// Fill `wall_time_ms`; off by default so output files are reproducible.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let fail = |msg: &str| Err(CliError::Config(msg.into()));
        if self.seeds.is_empty() {
            return fail("seed list is empty");
        }
        if self.learners.is_empty() {
            return fail("learner list is empty");
        }
        if self.d.is_empty() || self.bandwidths.is_empty() {
            return fail("d and bandwidth lists must be non-empty");
        }
        if self.d.contains(&0) {
            return fail("history lengths must be positive");
        }
        if self.bandwidths.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return fail("bandwidths must be positive");
        }
        let d_max = *self.d.iter().max().unwrap_or(&1);
        if self.n_train < d_max + 2 {
            return fail("n_train must exceed every history length by at least 2");
        }
        if self.oracle_resolution == 0 {
            return fail("oracle_resolution must be positive");
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return fail("ridge must be non-negative");
        }
        Ok(())
    }
}

/// One output row; risk columns are empty when `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub seed: u64,
    pub d: usize,
    pub bandwidth: f64,
    pub learner: Learner,
    pub conditional_risk: Option<f64>,
    pub marginal_risk: Option<f64>,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

/// Seed for the simulation of chain `seed`, one ChaCha stream per chain.
pub fn simulation_seed(master_seed: u64, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(seed);
    rng.next_u64()
}

struct Cell {
    d: usize,
    bandwidth: f64,
    learner: Learner,
}

struct Chain {
    spec: HiddenMarkovSpec,
    seq: SampleSequence,
    full: StatePosterior,
    stationary: StatePosterior,
}

fn prepare(cfg: &ExperimentConfig, shared: Option<&HiddenMarkovSpec>, seed: u64) -> condrisk::Result<Chain> {
    let spec = match shared {
        Some(s) => s.clone(),
        None => random_chain(seed),
    };
    let seq = simulate(&spec, cfg.n_train, simulation_seed(cfg.master_seed, seed))?;
    let full = forward_posterior(&spec, &seq)?;
    let stationary = StatePosterior::new(stationary_distribution(&spec.transition)?)?;
    Ok(Chain { spec, seq, full, stationary })
}

fn fit(cfg: &ExperimentConfig, chain: &Chain, cell: &Cell) -> condrisk::Result<Hypothesis> {
    match cell.learner {
        Learner::Erm => erm_fit(&chain.seq, cfg.ridge),
        Learner::SlidingWindow => sliding_window_fit(&chain.seq, cell.d, cfg.ridge),
        Learner::Ecrm => {
            let weighting = weighting_for(cfg.kernel, chain.seq.k(), cell.d, cell.bandwidth)?;
            let tc = TrainConfig { ridge: cfg.ridge, fallback: cfg.fallback, ..TrainConfig::new(cell.d, weighting) };
            ecrm_fit(&chain.seq, chain.seq.last_history(cell.d)?, &tc)
        }
    }
}

fn score(cfg: &ExperimentConfig, chain: &Chain, cell: &Cell, h: &Hypothesis) -> condrisk::Result<(f64, f64)> {
    let risks = per_state_risks(&chain.spec, h, &OracleConfig { resolution: cfg.oracle_resolution })?;
    let conditional = match cfg.evaluation {
        Evaluation::Full => mix(&chain.full.probs, &risks),
        Evaluation::Window => {
            let window = chain.seq.suffix(chain.seq.len() - cell.d);
            mix(&forward_posterior_from(&chain.spec, &chain.stationary.probs, &window)?.probs, &risks)
        }
    };
    Ok((conditional, mix(&chain.stationary.probs, &risks)))
}

fn run_chain(cfg: &ExperimentConfig, shared: Option<&HiddenMarkovSpec>, seed: u64, cells: &[Cell]) -> Vec<ResultRow> {
    let chain = prepare(cfg, shared, seed);
    cells
        .iter()
        .map(|cell| {
            let start = Instant::now();
            let outcome = chain.as_ref().map_err(Clone::clone).and_then(|c| score(cfg, c, cell, &fit(cfg, c, cell)?));
            let wall_time_ms = if cfg.record_timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            let (conditional_risk, marginal_risk, error) = match outcome {
                Ok((c, m)) => (Some(c), Some(m), None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            ResultRow {
                seed,
                d: cell.d,
                bandwidth: cell.bandwidth,
                learner: cell.learner,
                conditional_risk,
                marginal_risk,
                wall_time_ms,
                error,
            }
        })
        .collect()
}

/// Runs every (seed, d, bandwidth, learner) combination.
///
/// Chains run in parallel; rows come back sorted by seed, d, bandwidth and
/// learner, so the table does not depend on scheduling. Fitting and
/// evaluation errors become rows with the `error` column set.
pub fn run_comparison(cfg: &ExperimentConfig) -> CliResult<Vec<ResultRow>> {
    cfg.validate()?;
    let shared = cfg.spec_path.as_deref().map(load_spec).transpose()?;
    let mut cells = Vec::new();
    for &d in &cfg.d {
        for &bandwidth in &cfg.bandwidths {
            for &learner in &cfg.learners {
                cells.push(Cell { d, bandwidth, learner });
            }
        }
    }
    let mut rows: Vec<ResultRow> =
        par::map_slice(&cfg.seeds, |&seed| run_chain(cfg, shared.as_ref(), seed, &cells)).into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.seed
            .cmp(&b.seed)
            .then(a.d.cmp(&b.d))
            .then(a.bandwidth.total_cmp(&b.bandwidth))
            .then(a.learner.cmp(&b.learner))
    });
    Ok(rows)
}

/// Writes rows as CSV with a header line.
pub fn write_results<W: Write>(rows: &[ResultRow], out: W) -> CliResult<()> {
    crate::write_csv(rows, out)
}
