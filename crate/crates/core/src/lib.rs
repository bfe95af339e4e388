//! Empirical conditional risk minimization for dependent data.
//!
//! Given one realization `z_1, ..., z_N` of a stationary mixing process, the
//! crate estimates the risk of a predictor on the *next* observation
//! conditioned on the last `d` observations, using kernel weights that
//! compare every past history to the current one. Predictors are then fit
//! by minimizing that estimate.
//!
//! * [`kernels`]: smoothing kernels, their axioms, the stratified set similarity
//! * [`estimator`]: `p̂`, `q̂` and the ratio estimator `R̂ = q̂ / p̂`
//! * [`learners`]: weighted least squares ECRM, ERM and sliding-window fits
//! * [`processes`]: hidden Markov simulator with exact conditional oracles
//! * [`bounds`]: the finite-sample deviation bound and its ingredients
//!
//! Heavy loops go through [`par`], which uses rayon when the `parallel`
//! feature is enabled and is bit-for-bit deterministic either way.

pub mod bounds;
pub mod error;
pub mod estimator;
pub mod hypothesis;
pub mod kernels;
pub mod learners;
pub mod par;
pub mod processes;
pub mod sequence;

pub use error::{Error, Result};
pub use estimator::{
    conditional_risk_estimate, empirical_marginal_risk, estimate_p, estimate_q, history_weights,
    WeightVector, Weighting,
};
pub use hypothesis::{Hypothesis, LossKind};
pub use kernels::{KernelFamily, KernelName, KernelSpec};
pub use learners::{ecrm_fit, erm_fit, sliding_window_fit, Fallback, TrainConfig};
pub use processes::{HiddenMarkovSpec, StatePosterior};
pub use sequence::SampleSequence;
