//! Hidden Markov data generator with exact conditional oracles.
//!
//! Each latent state `i` emits `x` uniformly from an axis-aligned box in
//! `R^2` and labels it deterministically, `y = sign(a_i . x + c_i)` with
//! `sign(0) = +1`. Emitted samples are rescaled to `[0, 1]^2` and the label
//! is encoded as the third coordinate, giving sequences in `[0, 1]^3`.
//!
//! Conditional distributions of the next sample are mixtures of the
//! per-state emissions weighted by a forward-filtered state posterior, so
//! conditional risks can be computed by deterministic quadrature.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{sign, Hypothesis};
use crate::par;
use crate::sequence::{decode_label, encode_label, SampleSequence};

const STOCHASTIC_TOL: f64 = 1e-12;

/// `f(x) = a . x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineLabel {
    pub a: [f64; 2],
    pub c: f64,
}

impl AffineLabel {
    #[inline]
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.a[0] * x[0] + self.a[1] * x[1] + self.c
    }

    #[inline]
    pub fn label(&self, x: [f64; 2]) -> i8 {
        sign(self.eval(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionBox {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Default for EmissionBox {
    fn default() -> Self {
        Self { lo: [0.0, 0.0], hi: [10.0, 10.0] }
    }
}

impl EmissionBox {
    pub fn area(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }

    /// Maps unit-square coordinates into the box.
    #[inline]
    pub fn from_unit(&self, u: [f64; 2]) -> [f64; 2] {
        [
            self.lo[0] + u[0] * (self.hi[0] - self.lo[0]),
            self.lo[1] + u[1] * (self.hi[1] - self.lo[1]),
        ]
    }

    /// Maps box coordinates into the unit square.
    #[inline]
    pub fn to_unit(&self, x: [f64; 2]) -> [f64; 2] {
        [
            (x[0] - self.lo[0]) / (self.hi[0] - self.lo[0]),
            (x[1] - self.lo[1]) / (self.hi[1] - self.lo[1]),
        ]
    }
}

/// A finite-state hidden Markov process with uniform, deterministically
/// labeled emissions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenMarkovSpec {
    pub transition: Vec<Vec<f64>>,
    pub affine_labels: Vec<AffineLabel>,
    #[serde(default)]
    pub emission_box: EmissionBox,
    pub initial_distribution: Vec<f64>,
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::invalid(format!("{what} has negative or non-finite entries")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::invalid(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

impl HiddenMarkovSpec {
    pub fn num_states(&self) -> usize {
        self.transition.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.num_states();
        if m == 0 {
            return Err(Error::invalid("process needs at least one state"));
        }
        for (i, row) in self.transition.iter().enumerate() {
            if row.len() != m {
                return Err(Error::invalid(format!("transition row {i} has {} entries, expected {m}", row.len())));
            }
            check_distribution(row, &format!("transition row {i}"))?;
        }
        if self.affine_labels.len() != m {
            return Err(Error::invalid(format!(
                "{} affine labels for {m} states",
                self.affine_labels.len()
            )));
        }
        if self.initial_distribution.len() != m {
            return Err(Error::invalid("initial distribution length differs from state count"));
        }
        check_distribution(&self.initial_distribution, "initial distribution")?;
        let b = &self.emission_box;
        if !(b.hi[0] > b.lo[0] && b.hi[1] > b.lo[1]) || !b.area().is_finite() {
            return Err(Error::invalid("emission box is degenerate"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("process spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    fn transition_matrix(&self) -> DMatrix<f64> {
        let m = self.num_states();
        DMatrix::from_fn(m, m, |i, j| self.transition[i][j])
    }

    /// Label state `s` assigns to the unit-square point `u`.
    #[inline]
    pub fn label_at(&self, state: usize, u: [f64; 2]) -> i8 {
        self.affine_labels[state].label(self.emission_box.from_unit(u))
    }

    /// Emission density of an encoded sample `(u1, u2, label)` under `state`,
    /// with respect to Lebesgue measure on the original box.
    fn emission_likelihood(&self, state: usize, z: &[f64]) -> f64 {
        if self.label_at(state, [z[0], z[1]]) == decode_label(z[2]) {
            1.0 / self.emission_box.area()
        } else {
            0.0
        }
    }
}

fn draw_categorical(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the cumulative total; take the last state with mass
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

/// Draws `n` samples; deterministic in `seed`.
pub fn simulate(spec: &HiddenMarkovSpec, n: usize, seed: u64) -> Result<SampleSequence> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(3 * n);
    let mut states = Vec::with_capacity(n);
    let mut state = draw_categorical(&mut rng, &spec.initial_distribution);
    for t in 0..n {
        if t > 0 {
            state = draw_categorical(&mut rng, &spec.transition[state]);
        }
        let u = [rng.random::<f64>(), rng.random::<f64>()];
        // label from the back-mapped point, the same one the oracles use
        let y = spec.label_at(state, u);
        data.extend_from_slice(&[u[0], u[1], encode_label(y)]);
        states.push(state);
    }
    SampleSequence::new(3, data)?.with_latent_states(states)
}

/// A distribution over latent states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePosterior {
    pub probs: Vec<f64>,
}

impl StatePosterior {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::invalid("posterior has negative entries"));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("posterior sums to {s}")));
        }
        Ok(Self { probs })
    }

    pub fn indicator(m: usize, state: usize) -> Self {
        let mut probs = vec![0.0; m];
        probs[state] = 1.0;
        Self { probs }
    }
}

/// Posterior of the state following `observed`, filtering from
/// `spec.initial_distribution` as the law of the first observed step.
pub fn forward_posterior(spec: &HiddenMarkovSpec, observed: &SampleSequence) -> Result<StatePosterior> {
    forward_posterior_from(spec, &spec.initial_distribution, observed)
}

/// As [`forward_posterior`] with an explicit prior for the first observed step.
pub fn forward_posterior_from(
    spec: &HiddenMarkovSpec,
    prior: &[f64],
    observed: &SampleSequence,
) -> Result<StatePosterior> {
    let m = spec.num_states();
    if prior.len() != m {
        return Err(Error::DimensionMismatch { expected: m, actual: prior.len() });
    }
    if observed.k() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, actual: observed.k() });
    }
    let mut predicted = prior.to_vec();
    let mut filtered = vec![0.0; m];
    for t in 0..observed.len() {
        let z = observed.sample(t);
        let mut total = 0.0;
        for s in 0..m {
            filtered[s] = predicted[s] * spec.emission_likelihood(s, z);
            total += filtered[s];
        }
        if !(total > 0.0) {
            return Err(Error::InconsistentObservation { step: t });
        }
        filtered.iter_mut().for_each(|a| *a /= total);
        for (next, slot) in predicted.iter_mut().enumerate() {
            *slot = (0..m).map(|s| filtered[s] * spec.transition[s][next]).sum();
        }
    }
    let total: f64 = predicted.iter().sum();
    predicted.iter_mut().for_each(|p| *p /= total);
    StatePosterior::new(predicted)
}

/// Quadrature settings for the conditional risk oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Midpoints per axis of the grid over the emission box.
    pub resolution: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { resolution: 512 }
    }
}

/// `E_x[ℓ(h, (x, sign f_i(x)))]` for every state `i`, by midpoint quadrature.
/// `h` acts on unit-square features.
pub fn per_state_risks(spec: &HiddenMarkovSpec, h: &Hypothesis, cfg: &OracleConfig) -> Result<Vec<f64>> {
    if h.input_dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: h.input_dim() });
    }
    if cfg.resolution == 0 {
        return Err(Error::invalid("oracle resolution must be positive"));
    }
    let res = cfg.resolution;
    let step = 1.0 / res as f64;
    let m = spec.num_states();
    let rows = par::map_indexed(m * res, |idx| {
        let (state, j) = (idx / res, idx % res);
        let u1 = (j as f64 + 0.5) * step;
        let mut acc = 0.0;
        for i in 0..res {
            let u = [(i as f64 + 0.5) * step, u1];
            acc += h.loss_xy(&u, spec.label_at(state, u));
        }
        acc
    });
    Ok(rows.chunks(res).map(|r| par::ordered_sum(r) / (res * res) as f64).collect())
}

/// Exact conditional risk `Σ_i posterior(i) E_x[ℓ(h, (x, sign f_i(x)))]`.
pub fn conditional_risk_oracle(
    spec: &HiddenMarkovSpec,
    posterior: &StatePosterior,
    h: &Hypothesis,
    cfg: &OracleConfig,
) -> Result<f64> {
    if posterior.probs.len() != spec.num_states() {
        return Err(Error::DimensionMismatch { expected: spec.num_states(), actual: posterior.probs.len() });
    }
    let risks = per_state_risks(spec, h, cfg)?;
    Ok(mix(&posterior.probs, &risks))
}

/// `Σ_i p_i r_i`.
pub fn mix(probs: &[f64], values: &[f64]) -> f64 {
    probs.iter().zip(values).map(|(p, r)| p * r).sum::<f64>()
}

/// `E[y | x = u]` under the next-state posterior.
pub fn label_mean(spec: &HiddenMarkovSpec, posterior: &StatePosterior, u: [f64; 2]) -> f64 {
    posterior
        .probs
        .iter()
        .enumerate()
        .map(|(s, p)| p * f64::from(spec.label_at(s, u)))
        .sum::<f64>()
        .clamp(-1.0, 1.0)
}

/// Stationary distribution of a row-stochastic matrix.
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = transition.len();
    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1
    let mut a = DMatrix::from_fn(m, m, |i, j| transition[j][i] - if i == j { 1.0 } else { 0.0 });
    for j in 0..m {
        a[(m - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(m);
    rhs[m - 1] = 1.0;
    let pi = a.lu().solve(&rhs).ok_or(Error::NotMixing { slem: 1.0 })?;
    let mut pi: Vec<f64> = pi.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= s);
    Ok(pi)
}

/// Samples a random four-state process.
///
/// Transition rows are Dirichlet(1) draws with 0.2 extra self-loop mass,
/// renormalized. Each state's labeling line has a uniformly random normal
/// direction and passes through a uniform point of the inner 60% of the
/// box. The initial distribution is stationary, so the process is too.
pub fn random_chain(seed: u64) -> HiddenMarkovSpec {
    const STATES: usize = 4;
    const SELF_LOOP: f64 = 0.2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let emission_box = EmissionBox::default();
    let transition: Vec<Vec<f64>> = (0..STATES)
        .map(|i| {
            let mut row: Vec<f64> = (0..STATES).map(|_| Exp1.sample(&mut rng)).collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
            row[i] += SELF_LOOP;
            row.iter_mut().for_each(|v| *v /= 1.0 + SELF_LOOP);
            // absorb rounding so the row sums to one
            let s: f64 = row.iter().sum();
            row[i] += 1.0 - s;
            row
        })
        .collect();
    let affine_labels = (0..STATES)
        .map(|_| {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let a = [theta.cos(), theta.sin()];
            let p = emission_box.from_unit([rng.random_range(0.2..0.8), rng.random_range(0.2..0.8)]);
            AffineLabel { a, c: -(a[0] * p[0] + a[1] * p[1]) }
        })
        .collect();
    let initial_distribution =
        stationary_distribution(&transition).unwrap_or_else(|_| vec![1.0 / STATES as f64; STATES]);
    HiddenMarkovSpec { transition, affine_labels, emission_box, initial_distribution }
}

// ---------------------------------------------------------------------------
// Mixing

/// Eigenvalues of the transition matrix, largest modulus first.
pub fn transition_eigenvalues(spec: &HiddenMarkovSpec) -> Vec<Complex64> {
    let eig = spec.transition_matrix().complex_eigenvalues();
    let mut eig: Vec<Complex64> = eig.iter().map(|c| Complex64::new(c.re, c.im)).collect();
    eig.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    eig
}

/// Second-largest eigenvalue modulus of the transition matrix.
pub fn second_eigenvalue_modulus(spec: &HiddenMarkovSpec) -> f64 {
    transition_eigenvalues(spec).get(1).map_or(0.0, |c| c.norm())
}

/// Geometric upper bound `β(j) <= min(1, C λ^j, ½ ‖P^j - Π‖_∞)` for the
/// stationary latent chain.
///
/// `λ` is the second-largest eigenvalue modulus and `C = ½ κ_∞(V)` the
/// condition number of the eigenvector matrix (infinite if the matrix is
/// not numerically diagonalizable). The observed process is a function of
/// the latent chain plus conditionally independent noise, so its
/// coefficients are dominated by these.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingBound {
    pub slem: f64,
    pub constant: f64,
    transition: DMatrix<f64>,
    stationary: Vec<f64>,
}

/// Eigenvalue moduli below this are treated as exactly zero.
const ZERO_EIGENVALUE: f64 = 1e-12;
/// Absolute allowance for floating point error in `direct`.
const DIRECT_SLACK: f64 = 1e-12;

impl MixingBound {
    pub fn new(spec: &HiddenMarkovSpec) -> Result<Self> {
        spec.validate()?;
        let eig = transition_eigenvalues(spec);
        let mut slem = eig.get(1).map_or(0.0, |c| c.norm());
        if slem >= 1.0 - 1e-9 {
            return Err(Error::NotMixing { slem });
        }
        if slem < ZERO_EIGENVALUE {
            slem = 0.0;
        }
        let p = spec.transition_matrix();
        let constant = eigen_conditioning(&p, &eig).map_or(f64::INFINITY, |kappa| 0.5 * kappa);
        let stationary = stationary_distribution(&spec.transition)?;
        Ok(Self { slem, constant, transition: p, stationary })
    }

    /// `½ max_s Σ_t |P^j(s, t) - π_t|`, computed by repeated squaring.
    pub fn direct(&self, j: usize) -> f64 {
        let m = self.transition.nrows();
        let mut result = DMatrix::<f64>::identity(m, m);
        let mut base = self.transition.clone();
        let mut e = j;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        (0..m)
            .map(|s| 0.5 * (0..m).map(|t| (result[(s, t)] - self.stationary[t]).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn at(&self, j: usize) -> f64 {
        let geometric = if self.constant.is_finite() {
            self.constant * self.slem.powi(j.min(i32::MAX as usize) as i32)
        } else {
            f64::INFINITY
        };
        // slack covers rounding in the matrix powers
        geometric.min(self.direct(j) + DIRECT_SLACK).clamp(0.0, 1.0)
    }
}

/// `κ_∞(V) = ‖V‖_∞ ‖V⁻¹‖_∞` for eigenvectors found by inverse iteration,
/// or `None` if `V D V⁻¹` does not reproduce `P`.
fn eigen_conditioning(p: &DMatrix<f64>, eig: &[Complex64]) -> Option<f64> {
    let m = p.nrows();
    let pc: DMatrix<Complex64> = p.map(|v| Complex64::new(v, 0.0));
    let eye = DMatrix::<Complex64>::identity(m, m);
    let mut v = DMatrix::<Complex64>::zeros(m, m);
    for (col, lam) in eig.iter().enumerate() {
        let shift = lam + Complex64::new(1e-10, 1e-11) * (1.0 + lam.norm());
        let lu = (&pc - &eye * shift).lu();
        let mut x = DVector::from_fn(m, |i, _| Complex64::new(1.0 + 0.37 * i as f64, 0.11 * i as f64));
        for _ in 0..4 {
            x = lu.solve(&x)?;
            let scale = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if !(scale > 0.0 && scale.is_finite()) {
                return None;
            }
            x /= Complex64::new(scale, 0.0);
        }
        v.set_column(col, &x);
    }
    let v_inv = v.clone().try_inverse()?;
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(eig));
    let rebuilt = &v * d * &v_inv;
    let residual = (rebuilt - pc).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(residual < 1e-8) {
        return None;
    }
    let inf_norm = |a: &DMatrix<Complex64>| {
        (0..m).map(|r| a.row(r).iter().map(|c| c.norm()).sum::<f64>()).fold(0.0, f64::max)
    };
    let kappa = inf_norm(&v) * inf_norm(&v_inv);
    kappa.is_finite().then_some(kappa)
}

/// Upper bound on the `j`-th β-mixing coefficient; see [`MixingBound`].
pub fn beta_mixing_bound(spec: &HiddenMarkovSpec, j: usize) -> Result<f64> {
    Ok(MixingBound::new(spec)?.at(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::LossKind;
    use approx::assert_abs_diff_eq;

    pub(crate) fn two_state(flip: f64) -> HiddenMarkovSpec {
        HiddenMarkovSpec {
            transition: vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]],
            affine_labels: vec![
                AffineLabel { a: [1.0, 0.0], c: -5.0 },
                AffineLabel { a: [-1.0, 0.0], c: 5.0 },
            ],
            emission_box: EmissionBox::default(),
            initial_distribution: vec![0.5, 0.5],
        }
    }

    #[test]
    fn validation_catches_bad_rows() {
        let mut s = two_state(0.3);
        s.transition[0][0] = 0.8;
        assert!(s.validate().is_err());
        let mut s = two_state(0.3);
        s.emission_box.hi[0] = 0.0;
        assert!(s.validate().is_err());
        let mut s = two_state(0.3);
        s.initial_distribution = vec![1.0];
        assert!(s.validate().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let s = random_chain(3);
        assert_eq!(HiddenMarkovSpec::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn identity_chain_stays_put() {
        let mut s = two_state(0.0);
        s.initial_distribution = vec![1.0, 0.0];
        let seq = simulate(&s, 200, 9).unwrap();
        assert!(seq.latent_states().unwrap().iter().all(|&st| st == 0));
        for t in 0..seq.len() {
            let z = seq.sample(t);
            assert_eq!(seq.label(t), s.label_at(0, [z[0], z[1]]));
        }
    }

    #[test]
    fn uniform_transition_posterior_is_uniform() {
        let mut s = random_chain(5);
        s.transition = vec![vec![0.25; 4]; 4];
        let seq = simulate(&s, 6, 1).unwrap();
        let post = forward_posterior(&s, &seq).unwrap();
        for p in post.probs {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn inconsistent_observation_is_an_error() {
        let mut s = two_state(0.0);
        s.affine_labels[1] = s.affine_labels[0];
        // x1 > 5 is labeled +1 by both states; claim -1
        let seq = SampleSequence::new(3, vec![0.9, 0.5, 0.0]).unwrap();
        assert_eq!(forward_posterior(&s, &seq), Err(Error::InconsistentObservation { step: 0 }));
    }

    #[test]
    fn oracle_half_split_and_perfect() {
        let s = two_state(0.3);
        let plus = Hypothesis::constant(2, 1.0, LossKind::ZeroOne);
        let cfg = OracleConfig { resolution: 64 };
        let half = conditional_risk_oracle(&s, &StatePosterior::indicator(2, 0), &plus, &cfg).unwrap();
        assert_abs_diff_eq!(half, 0.5, epsilon = 1e-12);
        let mut all_pos = s.clone();
        all_pos.affine_labels[0] = AffineLabel { a: [0.0, 0.0], c: 1.0 };
        let zero = conditional_risk_oracle(&all_pos, &StatePosterior::indicator(2, 0), &plus, &cfg).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn random_chains_are_deterministic_and_stochastic() {
        assert_eq!(random_chain(11), random_chain(11));
        assert_ne!(random_chain(11), random_chain(12));
        for seed in 0..100 {
            let s = random_chain(seed);
            s.validate().unwrap();
            for row in &s.transition {
                assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn identity_chain_is_not_mixing() {
        let s = two_state(0.0);
        assert!(matches!(beta_mixing_bound(&s, 1), Err(Error::NotMixing { .. })));
        let periodic = two_state(1.0);
        assert!(matches!(beta_mixing_bound(&periodic, 1), Err(Error::NotMixing { .. })));
    }

    #[test]
    fn uniform_chain_mixes_in_one_step() {
        let mut s = random_chain(2);
        s.transition = vec![vec![0.25; 4]; 4];
        s.initial_distribution = vec![0.25; 4];
        let mb = MixingBound::new(&s).unwrap();
        assert_eq!(mb.slem, 0.0);
        for j in 1..6 {
            assert!(mb.at(j) <= 1e-12);
        }
    }

    #[test]
    fn stationary_of_asymmetric_chain() {
        // pi = (b, a) / (a + b) for [[1-a, a], [b, 1-b]]
        let pi = stationary_distribution(&[vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap();
        assert_abs_diff_eq!(pi[0], 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(pi[1], 0.25, epsilon = 1e-14);
    }
}
