//! Linear predictors and the losses they are scored with.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::decode_label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    /// `1[sign(w.x + bias) != y]` with `sign(0) = +1`.
    ZeroOne,
    /// `min(1, (w.x + bias - y)^2 / 4)`.
    ClippedSquared,
}

/// A linear predictor `x -> sign(w.x + bias)` and the loss it is judged by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub loss_kind: LossKind,
}

/// `sign` with `sign(0) = +1`.
#[inline]
pub fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

impl Hypothesis {
    pub fn new(weights: Vec<f64>, bias: f64, loss_kind: LossKind) -> Self {
        Self { weights, bias, loss_kind }
    }

    /// The constant predictor `sign(bias)` on `input_dim` features.
    pub fn constant(input_dim: usize, bias: f64, loss_kind: LossKind) -> Self {
        Self::new(vec![0.0; input_dim], bias, loss_kind)
    }

    pub fn input_dim(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn score(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    #[inline]
    pub fn predict(&self, x: &[f64]) -> i8 {
        sign(self.score(x))
    }

    /// Loss on features `x` with label `y` in {-1, +1}.
    #[inline]
    pub fn loss_xy(&self, x: &[f64], y: i8) -> f64 {
        let s = self.score(x);
        match self.loss_kind {
            LossKind::ZeroOne => {
                if sign(s) == y {
                    0.0
                } else {
                    1.0
                }
            }
            LossKind::ClippedSquared => {
                let r = s - f64::from(y);
                (r * r / 4.0).min(1.0)
            }
        }
    }

    /// Loss on an encoded sample (features followed by the label code).
    /// The caller guarantees `z.len() == input_dim() + 1`.
    #[inline]
    pub fn loss_unchecked(&self, z: &[f64]) -> f64 {
        let (x, y) = z.split_at(z.len() - 1);
        self.loss_xy(x, decode_label(y[0]))
    }

    pub fn check_sample_dim(&self, k: usize) -> Result<()> {
        if k != self.weights.len() + 1 {
            return Err(Error::DimensionMismatch { expected: self.weights.len() + 1, actual: k });
        }
        Ok(())
    }
}

/// Loss of `h` on the encoded sample `z`, always in `[0, 1]`.
pub fn loss(h: &Hypothesis, z: &[f64]) -> Result<f64> {
    h.check_sample_dim(z.len())?;
    Ok(h.loss_unchecked(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_one_sign_convention() {
        let h = Hypothesis::constant(2, 0.0, LossKind::ZeroOne);
        // score 0 predicts +1
        assert_eq!(loss(&h, &[0.3, 0.3, 1.0]).unwrap(), 0.0);
        assert_eq!(loss(&h, &[0.3, 0.3, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn correct_prediction_has_zero_loss() {
        let h = Hypothesis::new(vec![1.0], -0.5, LossKind::ZeroOne);
        assert_eq!(loss(&h, &[0.9, 1.0]).unwrap(), 0.0);
        assert_eq!(loss(&h, &[0.1, 0.0]).unwrap(), 0.0);
        assert_eq!(loss(&h, &[0.1, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn clipped_squared_range() {
        let h = Hypothesis::new(vec![0.0], 3.0, LossKind::ClippedSquared);
        assert_eq!(loss(&h, &[0.0, 1.0]).unwrap(), 1.0);
        let zero = Hypothesis::constant(1, 0.0, LossKind::ClippedSquared);
        assert_eq!(loss(&zero, &[0.5, 0.0]).unwrap(), 0.25);
        let exact = Hypothesis::constant(1, -1.0, LossKind::ClippedSquared);
        assert_eq!(loss(&exact, &[0.5, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_checked() {
        let h = Hypothesis::constant(2, 1.0, LossKind::ZeroOne);
        assert!(loss(&h, &[0.5, 1.0]).is_err());
    }

    #[test]
    fn json_shape() {
        let h = Hypothesis::new(vec![0.5, -1.0], 0.25, LossKind::ClippedSquared);
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"weights":[0.5,-1.0],"bias":0.25,"loss_kind":"clipped-squared"}"#);
        assert_eq!(serde_json::from_str::<Hypothesis>(&s).unwrap(), h);
    }
}
