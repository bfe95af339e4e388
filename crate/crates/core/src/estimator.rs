//! The kernel-weighted conditional risk estimator.
//!
//! For a target history `z̄` of length `d`, every index `i` in
//! `I = {d, ..., N-1}` (1-based) contributes the sample `z_{i+1}` with weight
//! `w_i = K((z̄ - z_{i-d+1..=i}) / b)`. Then
//!
//! ```text
//! p̂ = 1/(n b^d) Σ w_i,   q̂ = 1/(n b^d) Σ ℓ(h, z_{i+1}) w_i,   R̂ = q̂ / p̂
//! ```
//!
//! with `n = |I| = N - d`. The stratified set similarity replaces `K` on a
//! separate path that skips the `b^d` normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::kernels::{stratified_set_weight, KernelSpec, LabeledHistory, LabeledPoint};
use crate::par;
use crate::sequence::SampleSequence;

/// How history similarity is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// A smoothing kernel on `R^{k d}` applied at its bandwidth.
    Smoothing(KernelSpec),
    /// Stratified set similarity with an unnormalized Gaussian base kernel.
    StratifiedSet { base_width: f64 },
}

impl Weighting {
    /// The `b^d` factor of the estimator (1 on the stratified path).
    pub fn normalizer(&self, d: usize) -> f64 {
        match self {
            Weighting::Smoothing(spec) => spec.bandwidth().powi(d as i32),
            Weighting::StratifiedSet { .. } => 1.0,
        }
    }

    /// The bandwidth-like parameter: `b` or the base kernel width.
    pub fn scale_parameter(&self) -> f64 {
        match self {
            Weighting::Smoothing(spec) => spec.bandwidth(),
            Weighting::StratifiedSet { base_width } => *base_width,
        }
    }
}

/// Per-index history weights for one target history.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    d: usize,
    weights: Vec<f64>,
    normalizer: f64,
}

impl WeightVector {
    /// Builds a weight vector directly; `weights[j]` belongs to the window
    /// starting at sample `j` (0-based), whose successor is sample `j + d`.
    pub fn from_raw(d: usize, weights: Vec<f64>, normalizer: f64) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid(format!("weights must be finite and non-negative, got {w}")));
        }
        if !(normalizer > 0.0) {
            return Err(Error::invalid("normalizer must be positive"));
        }
        Ok(Self { d, weights, normalizer })
    }

    /// All-ones weights over the index set of a length-`len` sequence.
    pub fn uniform(d: usize, len: usize) -> Self {
        Self { d, weights: vec![1.0; len.saturating_sub(d)], normalizer: 1.0 }
    }

    pub fn history_len(&self) -> usize {
        self.d
    }

    /// `n = |I|`.
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// 1-based indices `d..=N-1` of the index set.
    pub fn index_set(&self) -> std::ops::RangeInclusive<usize> {
        self.d..=self.d + self.weights.len() - 1
    }

    pub fn raw_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn total(&self) -> f64 {
        par::ordered_sum(&self.weights)
    }

    /// Every raw weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            d: self.d,
            weights: self.weights.iter().map(|w| w * c).collect(),
            normalizer: self.normalizer,
        }
    }

    pub fn p_hat(&self) -> f64 {
        self.total() / (self.n() as f64 * self.normalizer)
    }

    pub fn q_hat(&self, seq: &SampleSequence, h: &Hypothesis) -> Result<f64> {
        self.q_hat_from_losses(&self.successor_losses(seq, h)?)
    }

    /// `q̂` for explicit successor losses, `losses[j]` belonging to `raw_weights()[j]`.
    pub fn q_hat_from_losses(&self, losses: &[f64]) -> Result<f64> {
        if losses.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), actual: losses.len() });
        }
        let mut acc = 0.0;
        for (l, w) in losses.iter().zip(&self.weights) {
            acc += l * w;
        }
        Ok(acc / (self.n() as f64 * self.normalizer))
    }

    /// `q̂ / p̂`, or [`Error::NoEffectiveSamples`] when `p̂ = 0`.
    pub fn risk(&self, seq: &SampleSequence, h: &Hypothesis) -> Result<f64> {
        self.risk_from_losses(&self.successor_losses(seq, h)?)
    }

    pub fn risk_from_losses(&self, losses: &[f64]) -> Result<f64> {
        let p = self.p_hat();
        if p <= 0.0 {
            return Err(Error::NoEffectiveSamples);
        }
        Ok(self.q_hat_from_losses(losses)? / p)
    }

    /// `ℓ(h, z_{i+1})` for every `i` in the index set.
    pub fn successor_losses(&self, seq: &SampleSequence, h: &Hypothesis) -> Result<Vec<f64>> {
        self.check_sequence(seq)?;
        h.check_sample_dim(seq.k())?;
        Ok((0..self.n()).map(|j| h.loss_unchecked(seq.sample(j + self.d))).collect())
    }

    fn check_sequence(&self, seq: &SampleSequence) -> Result<()> {
        if seq.len() != self.d + self.n() {
            return Err(Error::invalid(format!(
                "weight vector covers {} samples, sequence has {}",
                self.d + self.n(),
                seq.len()
            )));
        }
        Ok(())
    }
}

fn labeled_history(flat: &[f64], k: usize) -> LabeledHistory {
    let points = flat
        .chunks_exact(k)
        .map(|z| LabeledPoint {
            x: z[..k - 1].to_vec(),
            y: crate::sequence::decode_label(z[k - 1]),
        })
        .collect();
    // labels produced by decode_label are always valid
    LabeledHistory::new(points).expect("decoded labels are +-1")
}

/// Computes `w_i` for every `i` in the index set.
pub fn history_weights(
    seq: &SampleSequence,
    d: usize,
    weighting: &Weighting,
    target: &[f64],
) -> Result<WeightVector> {
    let k = seq.k();
    let big_n = seq.len();
    if d == 0 {
        return Err(Error::invalid("history length d must be at least 1"));
    }
    if big_n < d + 2 {
        return Err(Error::SequenceTooShort { needed: d + 2, have: big_n });
    }
    if target.len() != k * d {
        return Err(Error::DimensionMismatch { expected: k * d, actual: target.len() });
    }
    if target.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::invalid("target history coordinates must lie in [0, 1]"));
    }
    let n = big_n - d;
    let weights = match weighting {
        Weighting::Smoothing(spec) => {
            if spec.dim() != k * d {
                return Err(Error::DimensionMismatch { expected: k * d, actual: spec.dim() });
            }
            let b = spec.bandwidth();
            par::map_indexed(n, |j| {
                let u: Vec<f64> =
                    target.iter().zip(seq.window(j, d)).map(|(t, z)| (t - z) / b).collect();
                spec.value_unchecked(&u)
            })
        }
        Weighting::StratifiedSet { base_width } => {
            let reference = labeled_history(target, k);
            let weights = par::map_indexed(n, |j| {
                stratified_set_weight(&labeled_history(seq.window(j, d), k), &reference, *base_width)
            });
            weights.into_iter().collect::<Result<Vec<_>>>()?
        }
    };
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("history weights".into()));
    }
    Ok(WeightVector { d, weights, normalizer: weighting.normalizer(d) })
}

/// `p̂(z̄)`.
pub fn estimate_p(
    seq: &SampleSequence,
    d: usize,
    weighting: &Weighting,
    target: &[f64],
) -> Result<f64> {
    Ok(history_weights(seq, d, weighting, target)?.p_hat())
}

/// `q̂(h, z̄)`.
pub fn estimate_q(
    seq: &SampleSequence,
    d: usize,
    weighting: &Weighting,
    target: &[f64],
    h: &Hypothesis,
) -> Result<f64> {
    history_weights(seq, d, weighting, target)?.q_hat(seq, h)
}

/// `R̂(h, z̄) = q̂ / p̂`, in `[0, 1]`.
pub fn conditional_risk_estimate(
    seq: &SampleSequence,
    d: usize,
    weighting: &Weighting,
    target: &[f64],
    h: &Hypothesis,
) -> Result<f64> {
    h.check_sample_dim(seq.k())?;
    history_weights(seq, d, weighting, target)?.risk(seq, h)
}

/// Plain average loss over the whole sequence.
pub fn empirical_marginal_risk(seq: &SampleSequence, h: &Hypothesis) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::invalid("empirical risk of an empty sequence"));
    }
    h.check_sample_dim(seq.k())?;
    let mut acc = 0.0;
    for i in 0..seq.len() {
        acc += h.loss_unchecked(seq.sample(i));
    }
    Ok(acc / seq.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::LossKind;
    use approx::assert_abs_diff_eq;

    fn constant_seq(n: usize) -> SampleSequence {
        SampleSequence::new(1, vec![0.5; n]).unwrap()
    }

    #[test]
    fn constant_sequence_has_equal_weights() {
        let spec = KernelSpec::sqexp(1, 0.3).unwrap();
        let w = history_weights(&constant_seq(10), 1, &Weighting::Smoothing(spec), &[0.5]).unwrap();
        let k0 = spec.value_unchecked(&[0.0]);
        assert_eq!(w.n(), 9);
        assert!(w.raw_weights().iter().all(|v| *v == k0));
        assert_eq!(w.index_set(), 1..=9);
        // p̂ = c / b^d
        assert_abs_diff_eq!(w.p_hat(), k0 / 0.3, epsilon = 1e-14);
    }

    #[test]
    fn distant_target_has_vanishing_weights() {
        let seq = SampleSequence::new(1, vec![0.0; 12]).unwrap();
        let spec = KernelSpec::sqexp(2, 0.05).unwrap();
        let w = history_weights(&seq, 2, &Weighting::Smoothing(spec), &[1.0, 1.0]).unwrap();
        assert!(w.raw_weights().iter().all(|v| *v < 1e-10));
    }

    #[test]
    fn compact_kernel_far_target_is_an_error() {
        let seq = SampleSequence::new(1, vec![0.0; 12]).unwrap();
        let spec = KernelSpec::epanechnikov(1, 0.1).unwrap();
        let h = Hypothesis::constant(0, 1.0, LossKind::ZeroOne);
        let r = conditional_risk_estimate(&seq, 1, &Weighting::Smoothing(spec), &[1.0], &h);
        assert_eq!(r, Err(Error::NoEffectiveSamples));
    }

    #[test]
    fn stratified_identical_histories_give_unit_p() {
        // alternating labels at one location: both strata always populated
        let seq = SampleSequence::new(3, [0.2, 0.4, 1.0, 0.2, 0.4, 0.0].repeat(5)).unwrap();
        let wt = Weighting::StratifiedSet { base_width: 0.1 };
        let p = estimate_p(&seq, 3, &wt, seq.last_history(3).unwrap()).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn argument_errors() {
        let seq = constant_seq(5);
        let spec = KernelSpec::sqexp(1, 0.3).unwrap();
        let wt = Weighting::Smoothing(spec);
        assert!(matches!(
            history_weights(&seq, 2, &wt, &[0.5, 0.5]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(history_weights(&seq, 4, &wt, &[0.5; 4]), Err(Error::SequenceTooShort { .. })));
        assert!(history_weights(&seq, 1, &wt, &[1.5]).is_err());
        assert!(history_weights(&seq, 0, &wt, &[]).is_err());
    }

    #[test]
    fn constant_loss_factors_out() {
        let seq = SampleSequence::new(1, vec![0.1, 0.7, 0.3, 0.9, 0.2, 0.6]).unwrap();
        let wt = Weighting::Smoothing(KernelSpec::sqexp(1, 0.4).unwrap());
        // k = 1: the only coordinate is the label code
        let always_wrong = Hypothesis::constant(0, 3.0, LossKind::ClippedSquared);
        let w = history_weights(&seq, 1, &wt, &[0.4]).unwrap();
        assert_abs_diff_eq!(w.q_hat(&seq, &always_wrong).unwrap(), w.p_hat(), epsilon = 1e-15);
        assert_eq!(w.risk(&seq, &always_wrong).unwrap(), 1.0);
        let zero = Hypothesis::constant(0, 0.0, LossKind::ClippedSquared);
        assert_abs_diff_eq!(w.q_hat(&seq, &zero).unwrap(), 0.25 * w.p_hat(), epsilon = 1e-15);
    }

    #[test]
    fn marginal_risk() {
        let h = Hypothesis::constant(0, 1.0, LossKind::ZeroOne);
        let seq = SampleSequence::new(1, vec![1.0, 0.0]).unwrap();
        assert_eq!(empirical_marginal_risk(&seq, &h).unwrap(), 0.5);
        let half = Hypothesis::constant(0, 0.0, LossKind::ClippedSquared);
        let seq = SampleSequence::new(1, vec![0.0, 1.0, 0.0]).unwrap();
        // (0 - y)^2 / 4 = 1/4 for either label
        assert_eq!(empirical_marginal_risk(&seq, &half).unwrap(), 0.25);
        let empty = SampleSequence::new(1, vec![]).unwrap();
        assert!(empirical_marginal_risk(&empty, &h).is_err());
    }
}
