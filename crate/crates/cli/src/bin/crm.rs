use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use condrisk::bounds::{scaling_check, theorem2_bound, BoundConfig, BoundTerms};
use condrisk::processes::{
    conditional_risk_oracle, forward_posterior, forward_posterior_from, random_chain, simulate,
    stationary_distribution, OracleConfig, StatePosterior,
};
use condrisk::{
    conditional_risk_estimate, ecrm_fit, empirical_marginal_risk, erm_fit, sliding_window_fit, Fallback,
    Hypothesis, KernelName, SampleSequence, TrainConfig,
};
use crm::{
    emit_distribution_grid, emit_weight_trace, load_spec, read_file, run_comparison, weighting_for, write_csv,
    write_file, write_results, CliError, CliResult, ExperimentConfig, Learner,
};

#[derive(Parser)]
#[command(name = "crm", version, about = "Empirical conditional risk minimization experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Random seed for simulation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON configuration file (used by `compare`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Hidden Markov process specification (JSON).
    #[arg(long, global = true)]
    process_spec: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample sequence from a process.
    Simulate {
        #[arg(short = 'n', long)]
        n_samples: usize,
        /// Generate a random four-state chain instead of reading --process-spec.
        #[arg(long)]
        chain_seed: Option<u64>,
        /// Also write the process specification here.
        #[arg(long)]
        spec_out: Option<PathBuf>,
    },
    /// Fit a predictor on a sequence and print it as JSON.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_parser = parse_learner, default_value = "ecrm")]
        learner: Learner,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = condrisk::learners::DEFAULT_RIDGE)]
        ridge: f64,
        /// Train with equal weights when all history weights vanish.
        #[arg(long)]
        uniform_fallback: bool,
    },
    /// Score a predictor against the exact oracle of a process.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        hypothesis: PathBuf,
        #[arg(long, default_value_t = OracleConfig::default().resolution)]
        resolution: usize,
        /// Condition only on the last `d` samples instead of the whole sequence.
        #[arg(long)]
        window: Option<usize>,
        /// Also report the kernel estimate of the conditional risk.
        #[arg(long)]
        estimate: bool,
        #[command(flatten)]
        kernel: KernelArgs,
    },
    /// Run the learner comparison described by --config.
    Compare,
    /// Evaluate the deviation bound for a parameter file.
    Bounds {
        #[arg(long)]
        params: PathBuf,
        /// Comma-separated sample sizes for the bandwidth/block scaling schedule.
        #[arg(long, value_delimiter = ',')]
        scaling_grid: Option<Vec<usize>>,
    },
    /// Write the E[y | x, history] grid of a process.
    Grid {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 100)]
        resolution: usize,
        /// Condition only on the last `d` samples.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Write per-sample history weights toward the final history.
    Weights {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
    },
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 0.2)]
    bandwidth: f64,
    #[arg(long, value_parser = parse_kernel, default_value = "stratified-set")]
    kernel: KernelName,
}

fn parse_kernel(s: &str) -> Result<KernelName, String> {
    s.parse().map_err(|e: condrisk::Error| e.to_string())
}

fn parse_learner(s: &str) -> Result<Learner, String> {
    match s {
        "ecrm" => Ok(Learner::Ecrm),
        "erm" => Ok(Learner::Erm),
        "sliding-window" => Ok(Learner::SlidingWindow),
        other => Err(format!("unknown learner '{other}'")),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, bytes),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a Path> {
    path.as_deref().ok_or_else(|| CliError::Config(format!("{flag} is required")))
}

fn load_sequence(path: &Path) -> CliResult<SampleSequence> {
    Ok(SampleSequence::from_text(&read_file(path)?)?)
}

fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value)?;
    s.push(b'\n');
    Ok(s)
}

#[derive(Serialize)]
struct Evaluation {
    conditional_risk: f64,
    marginal_risk: f64,
    empirical_marginal_risk: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimated_conditional_risk: Option<f64>,
}

#[derive(Serialize)]
struct BoundRow {
    #[serde(rename = "N")]
    n_samples: usize,
    b: f64,
    mu: usize,
    a: usize,
    t1: Option<f64>,
    t2: Option<f64>,
    t3: Option<f64>,
    covering: Option<f64>,
    term1: Option<f64>,
    term2: Option<f64>,
    total: Option<f64>,
    log_total: Option<f64>,
    error: Option<String>,
}

impl BoundRow {
    fn new(n_samples: usize, b: f64, mu: usize, a: usize, r: &condrisk::Result<BoundTerms>) -> Self {
        let ok = r.as_ref().ok();
        BoundRow {
            n_samples,
            b,
            mu,
            a,
            t1: ok.map(|t| t.thresholds.t1),
            t2: ok.map(|t| t.thresholds.t2),
            t3: ok.map(|t| t.thresholds.t3),
            covering: ok.map(|t| t.covering),
            term1: ok.map(|t| t.term1),
            term2: ok.map(|t| t.term2),
            total: ok.map(|t| t.total),
            log_total: ok.map(|t| t.log_total),
            error: r.as_ref().err().map(ToString::to_string),
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    let out = g.out.as_deref();
    match cli.command {
        Command::Simulate { n_samples, chain_seed, spec_out } => {
            let spec = match (chain_seed, &g.process_spec) {
                (Some(s), None) => random_chain(s),
                (None, Some(path)) => load_spec(path)?,
                _ => return Err(CliError::Config("give exactly one of --chain-seed and --process-spec".into())),
            };
            let seq = simulate(&spec, n_samples, g.seed)?;
            if let Some(path) = spec_out {
                write_file(&path, spec.to_json().as_bytes())?;
            }
            emit(out, seq.to_text().as_bytes())
        }
        Command::Train { data, learner, kernel, ridge, uniform_fallback } => {
            let seq = load_sequence(&data)?;
            let h = match learner {
                Learner::Erm => erm_fit(&seq, ridge)?,
                Learner::SlidingWindow => sliding_window_fit(&seq, kernel.d, ridge)?,
                Learner::Ecrm => {
                    let weighting = weighting_for(kernel.kernel, seq.k(), kernel.d, kernel.bandwidth)?;
                    let fallback = if uniform_fallback { Fallback::UniformWeights } else { Fallback::Error };
                    let cfg = TrainConfig { ridge, fallback, ..TrainConfig::new(kernel.d, weighting) };
                    ecrm_fit(&seq, seq.last_history(kernel.d)?, &cfg)?
                }
            };
            emit(out, &to_json(&h)?)
        }
        Command::Evaluate { data, hypothesis, resolution, window, estimate, kernel } => {
            let spec = load_spec(require(&g.process_spec, "--process-spec")?)?;
            let seq = load_sequence(&data)?;
            let h: Hypothesis = serde_json::from_str(&read_file(&hypothesis)?)?;
            let stationary = StatePosterior::new(stationary_distribution(&spec.transition)?)?;
            let posterior = match window {
                None => forward_posterior(&spec, &seq)?,
                Some(d) => {
                    if d == 0 || d > seq.len() {
                        return Err(CliError::Config(format!("window {d} does not fit a sequence of {}", seq.len())));
                    }
                    forward_posterior_from(&spec, &stationary.probs, &seq.suffix(seq.len() - d))?
                }
            };
            let cfg = OracleConfig { resolution };
            let estimated_conditional_risk = if estimate {
                let weighting = weighting_for(kernel.kernel, seq.k(), kernel.d, kernel.bandwidth)?;
                Some(conditional_risk_estimate(&seq, kernel.d, &weighting, seq.last_history(kernel.d)?, &h)?)
            } else {
                None
            };
            let report = Evaluation {
                conditional_risk: conditional_risk_oracle(&spec, &posterior, &h, &cfg)?,
                marginal_risk: conditional_risk_oracle(&spec, &stationary, &h, &cfg)?,
                empirical_marginal_risk: empirical_marginal_risk(&seq, &h)?,
                estimated_conditional_risk,
            };
            emit(out, &to_json(&report)?)
        }
        Command::Compare => {
            let cfg = ExperimentConfig::from_json(&read_file(require(&g.config, "--config")?)?)?;
            let rows = run_comparison(&cfg)?;
            let mut buf = Vec::new();
            write_results(&rows, &mut buf)?;
            if let Some(path) = out {
                let mut sidecar = path.as_os_str().to_owned();
                sidecar.push(".config.json");
                write_file(Path::new(&sidecar), &to_json(&cfg)?)?;
            }
            emit(out, &buf)
        }
        Command::Bounds { params, scaling_grid } => {
            let cfg: BoundConfig = serde_json::from_str(&read_file(&params)?)?;
            let p = cfg.to_params()?;
            let rows: Vec<BoundRow> = match scaling_grid {
                None => vec![BoundRow::new(p.n_samples, p.b, p.mu, p.a, &theorem2_bound(&p))],
                Some(grid) => scaling_check(&p, &grid)
                    .iter()
                    .map(|r| BoundRow::new(r.n_samples, r.b, r.mu, r.a, &r.result))
                    .collect(),
            };
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            emit(out, &buf)
        }
        Command::Grid { data, resolution, window } => {
            let spec = load_spec(require(&g.process_spec, "--process-spec")?)?;
            let cells = emit_distribution_grid(&spec, &load_sequence(&data)?, window, resolution)?;
            let mut buf = Vec::new();
            write_csv(&cells, &mut buf)?;
            emit(out, &buf)
        }
        Command::Weights { data, kernel } => {
            let seq = load_sequence(&data)?;
            let weighting = weighting_for(kernel.kernel, seq.k(), kernel.d, kernel.bandwidth)?;
            let rows = emit_weight_trace(&seq, kernel.d, &weighting)?;
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            emit(out, &buf)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
