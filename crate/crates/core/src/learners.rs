//! Predictor fitting: conditional risk minimization and its baselines.
//!
//! All three learners minimize a (weighted) squared surrogate of the 0/1
//! loss over linear predictors, solved in closed form through the normal
//! equations:
//!
//! ```text
//! min_{w, bias}  Σ_i ω_i (w·x_i + bias - y_i)^2 + ridge ‖w‖^2
//! ```
//!
//! Weights are rescaled to mean one before solving, so the fit depends only
//! on their ratios and `ridge` acts on the same scale for every learner.
//! The bias is not regularized.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{history_weights, WeightVector, Weighting};
use crate::hypothesis::{Hypothesis, LossKind};
use crate::sequence::SampleSequence;

pub use crate::hypothesis::loss;

pub const DEFAULT_RIDGE: f64 = 1e-8;

/// What ECRM does when the history weights carry no mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fallback {
    #[default]
    Error,
    /// Train with equal weights instead, which reduces ECRM to ERM on the index set.
    UniformWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub d: usize,
    pub weighting: Weighting,
    pub ridge: f64,
    pub fallback: Fallback,
    /// Loss attached to the fitted hypothesis.
    pub loss_kind: LossKind,
}

impl TrainConfig {
    pub fn new(d: usize, weighting: Weighting) -> Self {
        Self { d, weighting, ridge: DEFAULT_RIDGE, fallback: Fallback::Error, loss_kind: LossKind::ZeroOne }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::invalid("history length d must be at least 1"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::invalid("ridge must be a non-negative number"));
        }
        Ok(())
    }
}

/// A weighted least squares problem on `(x_i, y_i)` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct WlsProblem {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
    weights: Vec<f64>,
    ridge: f64,
}

impl WlsProblem {
    /// Rows with arbitrary non-negative weights; they are rescaled to mean one.
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<f64>, weights: Vec<f64>, ridge: f64) -> Result<Self> {
        let n = features.len();
        if labels.len() != n || weights.len() != n {
            return Err(Error::invalid("features, labels and weights differ in length"));
        }
        if n == 0 {
            return Err(Error::invalid("least squares with no rows"));
        }
        let p = features[0].len();
        if features.iter().any(|f| f.len() != p) {
            return Err(Error::invalid("ragged feature rows"));
        }
        if !(ridge >= 0.0 && ridge.is_finite()) {
            return Err(Error::invalid("ridge must be a non-negative number"));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::NoEffectiveSamples);
        }
        let mean = total / n as f64;
        let weights = weights.into_iter().map(|w| w / mean).collect();
        Ok(Self { features, labels, weights, ridge })
    }

    /// Equal weights on every row of `seq` in `from..to`.
    fn from_sequence(seq: &SampleSequence, from: usize, to: usize, ridge: f64) -> Result<Self> {
        let features = (from..to).map(|i| seq.features(i).to_vec()).collect();
        let labels = (from..to).map(|i| f64::from(seq.label(i))).collect();
        Self::new(features, labels, vec![1.0; to - from], ridge)
    }

    pub fn normalized_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted surrogate objective at `h` (using the normalized weights).
    pub fn objective(&self, h: &Hypothesis) -> f64 {
        let data: f64 = self
            .features
            .iter()
            .zip(&self.labels)
            .zip(&self.weights)
            .map(|((x, y), w)| {
                let r = h.score(x) - y;
                w * r * r
            })
            .sum();
        data + self.ridge * h.weights.iter().map(|v| v * v).sum::<f64>()
    }

    /// Solves the normal equations.
    pub fn solve(&self, loss_kind: LossKind) -> Result<Hypothesis> {
        let p = self.features[0].len();
        let dim = p + 1;
        let mut gram = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = DVector::<f64>::zeros(dim);
        let mut phi = vec![1.0; dim];
        for ((x, y), w) in self.features.iter().zip(&self.labels).zip(&self.weights) {
            phi[..p].copy_from_slice(x);
            for a in 0..dim {
                rhs[a] += w * phi[a] * y;
                for b in 0..=a {
                    gram[(a, b)] += w * phi[a] * phi[b];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                gram[(b, a)] = gram[(a, b)];
            }
        }
        for a in 0..p {
            gram[(a, a)] += self.ridge;
        }
        let max_diag = (0..dim).map(|a| gram[(a, a)]).fold(0.0, f64::max);
        let chol = gram.clone().cholesky().ok_or(Error::DegenerateDesign)?;
        if self.ridge == 0.0 {
            let min_pivot = (0..dim).map(|a| chol.l_dirty()[(a, a)].powi(2)).fold(f64::INFINITY, f64::min);
            if min_pivot <= 1e-12 * max_diag {
                return Err(Error::DegenerateDesign);
            }
        }
        let beta = chol.solve(&rhs);
        if beta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("least squares solution".into()));
        }
        Ok(Hypothesis::new(beta.as_slice()[..p].to_vec(), beta[p], loss_kind))
    }
}

/// Fits on the successors of the index set with the given history weights.
pub fn ecrm_fit_weighted(
    seq: &SampleSequence,
    weights: &WeightVector,
    ridge: f64,
    loss_kind: LossKind,
) -> Result<Hypothesis> {
    let d = weights.history_len();
    if seq.len() != d + weights.n() {
        return Err(Error::invalid("weight vector does not match the sequence"));
    }
    let rows = d..seq.len();
    let features = rows.clone().map(|i| seq.features(i).to_vec()).collect();
    let labels = rows.map(|i| f64::from(seq.label(i))).collect();
    WlsProblem::new(features, labels, weights.raw_weights().to_vec(), ridge)?.solve(loss_kind)
}

/// Empirical conditional risk minimization for the history `target`.
pub fn ecrm_fit(seq: &SampleSequence, target: &[f64], cfg: &TrainConfig) -> Result<Hypothesis> {
    cfg.validate()?;
    let weights = history_weights(seq, cfg.d, &cfg.weighting, target)?;
    let weights = if weights.total() > 0.0 {
        weights
    } else {
        match cfg.fallback {
            Fallback::Error => return Err(Error::NoEffectiveSamples),
            Fallback::UniformWeights => WeightVector::uniform(cfg.d, seq.len()),
        }
    };
    ecrm_fit_weighted(seq, &weights, cfg.ridge, cfg.loss_kind)
}

/// Unweighted least squares over the whole sequence.
pub fn erm_fit(seq: &SampleSequence, ridge: f64) -> Result<Hypothesis> {
    if seq.len() < 2 {
        return Err(Error::SequenceTooShort { needed: 2, have: seq.len() });
    }
    WlsProblem::from_sequence(seq, 0, seq.len(), ridge)?.solve(LossKind::ZeroOne)
}

/// Unweighted least squares over the last `d` samples only.
pub fn sliding_window_fit(seq: &SampleSequence, d: usize, ridge: f64) -> Result<Hypothesis> {
    if d < 2 {
        return Err(Error::invalid(format!("sliding window needs at least 2 samples, got d = {d}")));
    }
    if d > seq.len() {
        return Err(Error::SequenceTooShort { needed: d, have: seq.len() });
    }
    WlsProblem::from_sequence(seq, seq.len() - d, seq.len(), ridge)?.solve(LossKind::ZeroOne)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hand_solved_weighted_fit() {
        // x = (0, 1, 2), y = (-1, 1, 1), weights (1, 2, 0): the zero-weight
        // row drops out and the line through the two others is y = 2x - 1.
        let p = WlsProblem::new(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![-1.0, 1.0, 1.0],
            vec![1.0, 2.0, 0.0],
            0.0,
        )
        .unwrap();
        let h = p.solve(LossKind::ZeroOne).unwrap();
        assert_abs_diff_eq!(h.weights[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.bias, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn collinear_design_without_ridge_is_degenerate() {
        let p = WlsProblem::new(
            vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![1.0, -1.0, 1.0],
            vec![1.0; 3],
            0.0,
        )
        .unwrap();
        assert_eq!(p.solve(LossKind::ZeroOne), Err(Error::DegenerateDesign));
        let regularized = WlsProblem { ridge: 1e-6, ..p };
        assert!(regularized.solve(LossKind::ZeroOne).is_ok());
    }

    #[test]
    fn zero_mass_is_no_effective_samples() {
        let r = WlsProblem::new(vec![vec![0.0]], vec![1.0], vec![0.0], 0.0);
        assert_eq!(r, Err(Error::NoEffectiveSamples));
    }

    #[test]
    fn window_errors() {
        let seq = SampleSequence::new(2, vec![0.1, 1.0, 0.2, 0.0, 0.3, 1.0]).unwrap();
        assert!(sliding_window_fit(&seq, 1, 0.0).is_err());
        assert!(matches!(sliding_window_fit(&seq, 4, 0.0), Err(Error::SequenceTooShort { .. })));
        assert!(erm_fit(&seq.prefix(1), 0.0).is_err());
    }

    #[test]
    fn bad_config() {
        let w = Weighting::StratifiedSet { base_width: 0.1 };
        assert!(TrainConfig { ridge: -1.0, ..TrainConfig::new(1, w) }.validate().is_err());
        assert!(TrainConfig::new(0, w).validate().is_err());
    }
}
