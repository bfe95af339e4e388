//! Experiment harness behind the `crm` binary.
//!
//! [`run_comparison`] reproduces the ECRM / ERM / sliding-window comparison on
//! simulated hidden Markov data and scores every fit with the exact
//! conditional risk oracle. [`emit_distribution_grid`] and
//! [`emit_weight_trace`] write the CSV files used for plotting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use condrisk::processes::HiddenMarkovSpec;
use condrisk::{KernelName, KernelSpec, Weighting};

pub mod experiment;
pub mod plots;

pub use experiment::{run_comparison, write_results, ExperimentConfig, Evaluation, Learner, ResultRow};
pub use plots::{emit_distribution_grid, emit_weight_trace, write_csv, GridCell, WeightRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] condrisk::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 3 for numeric failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }
}

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    let mut f = fs::File::create(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    f.write_all(contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn load_spec(path: &Path) -> CliResult<HiddenMarkovSpec> {
    Ok(HiddenMarkovSpec::from_json(&read_file(path)?)?)
}

/// History weighting for `kernel` on sequences of sample dimension `k`.
///
/// `bandwidth` is the smoothing bandwidth for the product kernels and the
/// base kernel width for the stratified set kernel.
pub fn weighting_for(kernel: KernelName, k: usize, d: usize, bandwidth: f64) -> condrisk::Result<Weighting> {
    Ok(match kernel {
        KernelName::SqExp => Weighting::Smoothing(KernelSpec::sqexp(k * d, bandwidth)?),
        KernelName::Epanechnikov => Weighting::Smoothing(KernelSpec::epanechnikov(k * d, bandwidth)?),
        KernelName::StratifiedSet => {
            if !(bandwidth > 0.0 && bandwidth.is_finite()) {
                return Err(condrisk::Error::InvalidArgument(format!(
                    "base kernel width must be positive, got {bandwidth}"
                )));
            }
            Weighting::StratifiedSet { base_width: bandwidth }
        }
    })
}
