//! CSV exports for external plotting.

use std::io::Write;

use serde::Serialize;

use condrisk::processes::{forward_posterior, forward_posterior_from, label_mean, stationary_distribution};
use condrisk::{history_weights, HiddenMarkovSpec, SampleSequence, Weighting};

use crate::{CliError, CliResult};

/// One cell of the `E[y | x, history]` grid, in box coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub x1: f64,
    pub x2: f64,
    pub mean: f64,
}

/// `E[y | x, history]` at the cell midpoints of a `resolution` square grid
/// over the emission box, rows ordered by `x2` then `x1`.
///
/// With `d = None` the posterior conditions on all of `history`; with
/// `Some(d)` only on its last `d` samples, filtered from the stationary law.
pub fn emit_distribution_grid(
    spec: &HiddenMarkovSpec,
    history: &SampleSequence,
    d: Option<usize>,
    resolution: usize,
) -> condrisk::Result<Vec<GridCell>> {
    spec.validate()?;
    if resolution == 0 {
        return Err(condrisk::Error::InvalidArgument("grid resolution must be positive".into()));
    }
    let posterior = match d {
        None => forward_posterior(spec, history)?,
        Some(d) => {
            if d == 0 || d > history.len() {
                return Err(condrisk::Error::SequenceTooShort { needed: d.max(1), have: history.len() });
            }
            let prior = stationary_distribution(&spec.transition)?;
            forward_posterior_from(spec, &prior, &history.suffix(history.len() - d))?
        }
    };
    let step = 1.0 / resolution as f64;
    let mut cells = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        for i in 0..resolution {
            let u = [(i as f64 + 0.5) * step, (j as f64 + 0.5) * step];
            let x = spec.emission_box.from_unit(u);
            cells.push(GridCell { x1: x[0], x2: x[1], mean: label_mean(spec, &posterior, u) });
        }
    }
    Ok(cells)
}

/// Weight of one past sample toward the estimate at the final history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightRow {
    /// 0-based position of the sample in the sequence.
    pub index: usize,
    pub x1: f64,
    pub x2: f64,
    pub y: i8,
    pub weight: f64,
}

/// One row per successor sample `z_{j+d}`, weighted by the similarity of
/// its preceding window to the last `d` samples.
pub fn emit_weight_trace(seq: &SampleSequence, d: usize, weighting: &Weighting) -> condrisk::Result<Vec<WeightRow>> {
    if seq.k() != 3 {
        return Err(condrisk::Error::DimensionMismatch { expected: 3, actual: seq.k() });
    }
    let target = seq.last_history(d)?.to_vec();
    let w = history_weights(seq, d, weighting, &target)?;
    Ok(w.raw_weights()
        .iter()
        .enumerate()
        .map(|(j, &weight)| {
            let i = j + d;
            let x = seq.features(i);
            WeightRow { index: i, x1: x[0], x2: x[1], y: seq.label(i), weight }
        })
        .collect())
}

/// Writes serializable records as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(records: &[T], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))
}
