//! Finite-sample deviation bound for the conditional risk estimator.
//!
//! For a deviation level `t`, kernel constants `(K1, K2, L, gamma)`, density
//! bounds `D0, D2`, loss Lipschitz constant `L_H` and block counts with
//! `4 mu a d <= N`:
//!
//! ```text
//! t1 = (t D0 - K2 D2 d^2 b^2) / 6
//! t2 = t1 b^d / (64 K1 L_H)
//! t3 = (3 L / (b^(d+gamma) t1))^(1/gamma)
//!
//! P(sup |R̂ - R| > t) <= 32 (sqrt(kd) t3 / 2)^(kd) N1(t2, H, n) exp(-mu t1^2 b^(2d) / (2048 K1^2))
//!                      + 4 (sqrt(kd) t3 / 2)^(kd) (mu - 1) beta(2 a d)
//! ```
//!
//! with `n = N - d`. Terms are assembled in log space since the covering
//! factor overflows `f64` for moderate `kd`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::processes::{HiddenMarkovSpec, MixingBound};

/// `j -> beta(j)` upper bound.
pub type BetaFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;
/// `(theta, n) -> N1(theta, H, n)` upper bound.
pub type CoveringFn = Arc<dyn Fn(f64, usize) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct BoundParams {
    pub t: f64,
    /// Sequence length `N`.
    pub n_samples: usize,
    pub k: usize,
    pub d: usize,
    pub b: f64,
    pub k1: f64,
    pub k2: f64,
    pub lipschitz: f64,
    pub gamma: f64,
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub loss_lipschitz: f64,
    /// Lipschitz constant of `R` in the history; carried for completeness,
    /// the rate bound does not use it.
    pub risk_lipschitz: Option<f64>,
    pub beta: BetaFn,
    pub covering: CoveringFn,
    pub mu: usize,
    pub a: usize,
}

impl fmt::Debug for BoundParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundParams")
            .field("t", &self.t)
            .field("n_samples", &self.n_samples)
            .field("k", &self.k)
            .field("d", &self.d)
            .field("b", &self.b)
            .field("k1", &self.k1)
            .field("k2", &self.k2)
            .field("lipschitz", &self.lipschitz)
            .field("gamma", &self.gamma)
            .field("d0", &self.d0)
            .field("d2", &self.d2)
            .field("loss_lipschitz", &self.loss_lipschitz)
            .field("mu", &self.mu)
            .field("a", &self.a)
            .finish_non_exhaustive()
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t <= 1.0) {
            return Err(Error::invalid(format!("t must lie in (0, 1], got {}", self.t)));
        }
        let positive = [
            ("b", self.b),
            ("K1", self.k1),
            ("K2", self.k2),
            ("L", self.lipschitz),
            ("D0", self.d0),
            ("D1", self.d1),
            ("D2", self.d2),
            ("L_H", self.loss_lipschitz),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        if self.k == 0 || self.d == 0 || self.mu == 0 || self.a == 0 {
            return Err(Error::invalid("k, d, mu and a must be positive"));
        }
        if 4 * self.mu * self.a * self.d > self.n_samples {
            return Err(Error::invalid(format!(
                "4 mu a d = {} exceeds N = {}",
                4 * self.mu * self.a * self.d,
                self.n_samples
            )));
        }
        if self.n_samples <= self.d {
            return Err(Error::SequenceTooShort { needed: self.d + 1, have: self.n_samples });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

/// `t1`, `t2`, `t3`; fails with [`Error::VacuousRegime`] when `t1 <= 0`.
pub fn derived_thresholds(p: &BoundParams) -> Result<Thresholds> {
    let d = p.d as f64;
    let margin = p.t * p.d0 - p.k2 * p.d2 * d * d * p.b * p.b;
    if !(margin > 0.0) {
        return Err(Error::VacuousRegime { margin });
    }
    let t1 = margin / 6.0;
    let t2 = t1 * p.b.powi(p.d as i32) / (64.0 * p.k1 * p.loss_lipschitz);
    let t3 = (3.0 * p.lipschitz / (p.b.powf(d + p.gamma) * t1)).powf(1.0 / p.gamma);
    Ok(Thresholds { t1, t2, t3 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    pub thresholds: Thresholds,
    /// `n = N - d`.
    pub n: usize,
    /// `ln (sqrt(kd) t3 / 2)^(kd)`.
    pub log_cover_factor: f64,
    /// `N1(t2, H, n)`.
    pub covering: f64,
    pub term1: f64,
    pub term2: f64,
    pub total: f64,
    /// `ln total`; finite even when `total` overflows.
    pub log_total: f64,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Evaluates both terms of the bound.
pub fn theorem2_bound(p: &BoundParams) -> Result<BoundTerms> {
    p.validate()?;
    let th = derived_thresholds(p)?;
    let kd = (p.k * p.d) as f64;
    let n = p.n_samples - p.d;
    let d = p.d as f64;

    let log_t3 = ((3.0 * p.lipschitz).ln() - (d + p.gamma) * p.b.ln() - th.t1.ln()) / p.gamma;
    let log_cover_factor = kd * (0.5 * kd.ln() + log_t3 - std::f64::consts::LN_2);

    let covering = (p.covering)(th.t2, n);
    if !(covering > 0.0) {
        return Err(Error::invalid(format!("covering number must be positive, got {covering}")));
    }
    let exponent = -(p.mu as f64) * th.t1 * th.t1 * p.b.powi(2 * p.d as i32) / (2048.0 * p.k1 * p.k1);
    let log_term1 = 32f64.ln() + log_cover_factor + covering.ln() + exponent;

    let beta = (p.beta)(2 * p.a * p.d);
    if !(beta >= 0.0) {
        return Err(Error::invalid(format!("beta must be non-negative, got {beta}")));
    }
    let factor = (p.mu as f64 - 1.0) * beta;
    let log_term2 = if factor == 0.0 {
        f64::NEG_INFINITY
    } else {
        4f64.ln() + log_cover_factor + factor.ln()
    };
    let term1 = log_term1.exp();
    let term2 = if factor == 0.0 { 0.0 } else { log_term2.exp() };
    let log_total = log_add(log_term1, log_term2);
    if log_total.is_nan() {
        return Err(Error::NonFinite("bound".into()));
    }
    Ok(BoundTerms {
        thresholds: th,
        n,
        log_cover_factor,
        covering,
        term1,
        term2,
        total: term1 + term2,
        log_total,
    })
}

/// `max(1, (sqrt(kd) / (2 tau))^(kd))`: cubes of side `2 tau / sqrt(kd)`
/// tile `[0,1]^(kd)` and each fits in a ball of radius `tau`.
pub fn hypercube_covering(kd: usize, tau: f64) -> f64 {
    let kd_f = kd as f64;
    (kd_f.sqrt() / (2.0 * tau)).powf(kd_f).max(1.0)
}

/// Covering number bound for affine predictors `x -> w.x + c` with
/// `‖(w, c)‖_2 <= weight_radius` on inputs in `[0,1]^input_dim`.
///
/// Such predictors take values in `[-B, B]`, `B = weight_radius sqrt(input_dim + 1)`,
/// and have pseudo-dimension `P = input_dim + 1`. The bound is the smaller of
///
/// * Haussler's packing bound `e (P + 1) (4 e B / theta)^P`, and
/// * the grid bound `ceil(B / theta)^n` (each of the `n` values snapped to a
///   `2 theta` grid),
///
/// clamped below by one. It is 1 whenever `theta >= B`, non-increasing in
/// `theta` and bounded by a constant in `n`.
pub fn linear_covering_bound(theta: f64, weight_radius: f64, input_dim: usize, n: usize) -> f64 {
    let p = (input_dim + 1) as f64;
    let range = weight_radius * p.sqrt();
    if theta >= range {
        return 1.0;
    }
    let e = std::f64::consts::E;
    let log_haussler = (e * (p + 1.0)).ln() + p * (4.0 * e * range / theta).ln();
    let log_grid = n as f64 * (range / theta).ceil().ln();
    log_haussler.min(log_grid).max(0.0).exp()
}

/// Block counts `(mu, a)` with `4 mu a d <= N`.
///
/// With `target_mu`, `a = floor(N / (4 d mu))`. Otherwise `mu a` is made as
/// large as possible, `floor(N / (4d))`, choosing among its factorizations
/// the one with `mu` closest to `(N/(4d))^(2/3)` on a log scale.
pub fn block_schedule(n_samples: usize, d: usize, target_mu: Option<usize>) -> Result<(usize, usize)> {
    if d == 0 {
        return Err(Error::invalid("d must be positive"));
    }
    if n_samples < 4 * d {
        return Err(Error::SequenceTooShort { needed: 4 * d, have: n_samples });
    }
    let blocks = n_samples / (4 * d);
    if let Some(mu) = target_mu {
        if mu == 0 || mu > blocks {
            return Err(Error::invalid(format!("target mu = {mu} must lie in 1..={blocks}")));
        }
        return Ok((mu, n_samples / (4 * d * mu)));
    }
    let ideal = (blocks as f64).powf(2.0 / 3.0).ln();
    let mut best = (blocks, 1);
    let mut best_gap = f64::INFINITY;
    let mut f = 1;
    while f * f <= blocks {
        if blocks % f == 0 {
            for mu in [f, blocks / f] {
                let gap = ((mu as f64).ln() - ideal).abs();
                if gap < best_gap || (gap == best_gap && mu > best.0) {
                    best = (mu, blocks / mu);
                    best_gap = gap;
                }
            }
        }
        f += 1;
    }
    Ok(best)
}

/// One row of [`scaling_check`].
#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub n_samples: usize,
    pub b: f64,
    pub mu: usize,
    pub a: usize,
    pub result: Result<BoundTerms>,
}

/// Evaluates the bound along the schedule `b = N^(-1/(6d))`,
/// `2ad ≈ N^(1/3)`, `mu = floor(N / (4ad)) ≈ N^(2/3)/2`.
///
/// Everything except `N`, `b`, `mu` and `a` is taken from `template`.
/// Failures (typically the vacuous regime at small `N`) are kept per row.
pub fn scaling_check(template: &BoundParams, grid: &[usize]) -> Vec<ScalingRow> {
    let d = template.d;
    grid.iter()
        .map(|&n| {
            let nf = n as f64;
            let b = nf.powf(-1.0 / (6.0 * d as f64));
            let a = ((nf.cbrt() / (2.0 * d as f64)).round() as usize).max(1);
            let mu = n / (4 * a * d);
            let params = BoundParams { n_samples: n, b, mu, a, ..template.clone() };
            let result = if mu == 0 {
                Err(Error::SequenceTooShort { needed: 4 * a * d, have: n })
            } else {
                theorem2_bound(&params)
            };
            ScalingRow { n_samples: n, b, mu, a, result }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Serializable parameter files

/// Mixing coefficient models selectable from a parameter file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum BetaModel {
    /// `beta = 0` (i.i.d. data).
    Zero,
    /// `beta(j) = min(1, scale * exp(-rate * j))`.
    Exponential { scale: f64, rate: f64 },
    /// The geometric latent-chain bound of a hidden Markov process.
    HiddenMarkov { spec: HiddenMarkovSpec },
}

impl BetaModel {
    pub fn to_fn(&self) -> Result<BetaFn> {
        Ok(match self.clone() {
            BetaModel::Zero => Arc::new(|_| 0.0),
            BetaModel::Exponential { scale, rate } => {
                Arc::new(move |j| (scale * (-rate * j as f64).exp()).min(1.0))
            }
            BetaModel::HiddenMarkov { spec } => {
                let mb = MixingBound::new(&spec)?;
                Arc::new(move |j| mb.at(j))
            }
        })
    }
}

/// Covering number models selectable from a parameter file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum CoveringModel {
    Constant { value: f64 },
    Linear { weight_radius: f64, input_dim: usize },
}

impl CoveringModel {
    pub fn to_fn(&self) -> CoveringFn {
        match *self {
            CoveringModel::Constant { value } => Arc::new(move |_, _| value.max(1.0)),
            CoveringModel::Linear { weight_radius, input_dim } => {
                Arc::new(move |theta, n| linear_covering_bound(theta, weight_radius, input_dim, n))
            }
        }
    }
}

fn one() -> f64 {
    1.0
}

/// JSON form of [`BoundParams`]. Kernel and density constants default to 1;
/// `mu` and `a` default to [`block_schedule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    pub t: f64,
    #[serde(rename = "N")]
    pub n_samples: usize,
    pub k: usize,
    pub d: usize,
    pub b: f64,
    #[serde(default = "one")]
    pub k1: f64,
    #[serde(default = "one")]
    pub k2: f64,
    #[serde(default = "one")]
    pub lipschitz: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub d0: f64,
    #[serde(default = "one")]
    pub d1: f64,
    #[serde(default = "one")]
    pub d2: f64,
    #[serde(default = "one")]
    pub loss_lipschitz: f64,
    #[serde(default)]
    pub risk_lipschitz: Option<f64>,
    pub beta: BetaModel,
    pub covering: CoveringModel,
    #[serde(default)]
    pub mu: Option<usize>,
    #[serde(default)]
    pub a: Option<usize>,
}

impl BoundConfig {
    pub fn to_params(&self) -> Result<BoundParams> {
        let (mu, a) = match (self.mu, self.a) {
            (Some(mu), Some(a)) => (mu, a),
            (target, None) => block_schedule(self.n_samples, self.d, target)?,
            (None, Some(_)) => return Err(Error::invalid("'a' given without 'mu'")),
        };
        let params = BoundParams {
            t: self.t,
            n_samples: self.n_samples,
            k: self.k,
            d: self.d,
            b: self.b,
            k1: self.k1,
            k2: self.k2,
            lipschitz: self.lipschitz,
            gamma: self.gamma,
            d0: self.d0,
            d1: self.d1,
            d2: self.d2,
            loss_lipschitz: self.loss_lipschitz,
            risk_lipschitz: self.risk_lipschitz,
            beta: self.beta.to_fn()?,
            covering: self.covering.to_fn(),
            mu,
            a,
        };
        params.validate()?;
        Ok(params)
    }
}
