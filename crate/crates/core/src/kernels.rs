//! Smoothing kernels and the stratified set similarity.
//!
//! A smoothing kernel `K: R^dim -> R+` integrates to one, is bounded by `K1`,
//! has zero first moments and second moments bounded by `K2`, and is Hölder
//! continuous of order `gamma` with constant `L`. The built-in families carry
//! those constants in closed form; [`verify_kernel_axioms`] checks them
//! numerically on a tensor-product midpoint grid.
//!
//! The stratified set similarity compares two labeled histories by averaging
//! an unnormalized Gaussian base kernel within the positive and negative
//! strata separately. It is not a smoothing kernel (it does not integrate to
//! one) and is only meaningful inside the ratio estimator, where constants
//! cancel.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Highest dimension for which tensor-grid quadrature is attempted.
pub const MAX_QUADRATURE_DIM: usize = 4;

/// The four constants a smoothing kernel is characterized by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    /// Uniform bound `K1` on the kernel.
    pub k1: f64,
    /// Bound `K2` on the second moments.
    pub k2: f64,
    /// Hölder constant `L`.
    pub lipschitz: f64,
    /// Hölder order `gamma` in (0, 1].
    pub gamma: f64,
}

/// Anything that can be checked against the smoothing kernel axioms.
pub trait SmoothingKernel: Sync {
    fn dim(&self) -> usize;

    /// Kernel value at `u`. Callers guarantee `u.len() == self.dim()`.
    fn value(&self, u: &[f64]) -> f64;

    fn constants(&self) -> KernelConstants;
}

/// Built-in kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum KernelFamily {
    /// Isotropic Gaussian density with standard deviation `width`.
    SquaredExponential { width: f64 },
    /// Product of one-dimensional Epanechnikov kernels `3/4 (1 - u^2)` on `[-1, 1]`.
    Epanechnikov,
}

/// A smoothing kernel together with the bandwidth it is applied at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    dim: usize,
    bandwidth: f64,
    family: KernelFamily,
    constants: KernelConstants,
    // cached normalization of the Gaussian family
    #[serde(skip)]
    norm: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, dim: usize, bandwidth: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("kernel dimension must be at least 1"));
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::invalid(format!("bandwidth must be positive, got {bandwidth}")));
        }
        let d = dim as f64;
        let (constants, norm) = match family {
            KernelFamily::SquaredExponential { width } => {
                if !(width > 0.0 && width.is_finite()) {
                    return Err(Error::invalid(format!("kernel width must be positive, got {width}")));
                }
                let k1 = (2.0 * PI * width * width).powf(-d / 2.0);
                // |grad K| = K1 r / w^2 exp(-r^2 / 2w^2), maximal at r = w.
                let lipschitz = k1 * (-0.5f64).exp() / width;
                let c = KernelConstants { k1, k2: width * width, lipschitz, gamma: 1.0 };
                (c, k1)
            }
            KernelFamily::Epanechnikov => {
                let k1 = 0.75f64.powi(dim as i32);
                // each partial derivative is at most 3/2 (3/4)^(dim-1)
                let lipschitz = d.sqrt() * 1.5 * 0.75f64.powi(dim as i32 - 1);
                let c = KernelConstants { k1, k2: 0.2, lipschitz, gamma: 1.0 };
                (c, k1)
            }
        };
        Ok(Self { dim, bandwidth, family, constants, norm })
    }

    /// Unit-width Gaussian.
    pub fn sqexp(dim: usize, bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::SquaredExponential { width: 1.0 }, dim, bandwidth)
    }

    pub fn epanechnikov(dim: usize, bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Epanechnikov, dim, bandwidth)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn constants(&self) -> KernelConstants {
        self.constants
    }

    pub fn with_bandwidth(&self, bandwidth: f64) -> Result<Self> {
        Self::new(self.family, self.dim, bandwidth)
    }

    /// `K(u)` without the length check.
    #[inline]
    pub(crate) fn value_unchecked(&self, u: &[f64]) -> f64 {
        match self.family {
            KernelFamily::SquaredExponential { width } => {
                let r2: f64 = u.iter().map(|v| v * v).sum();
                self.norm * (-0.5 * r2 / (width * width)).exp()
            }
            KernelFamily::Epanechnikov => {
                let mut acc = 1.0;
                for &v in u {
                    if v.abs() >= 1.0 {
                        return 0.0;
                    }
                    acc *= 0.75 * (1.0 - v * v);
                }
                acc
            }
        }
    }
}

impl SmoothingKernel for KernelSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, u: &[f64]) -> f64 {
        self.value_unchecked(u)
    }

    fn constants(&self) -> KernelConstants {
        self.constants
    }
}

/// Evaluates `K(u)`.
pub fn eval_kernel(spec: &KernelSpec, u: &[f64]) -> Result<f64> {
    if u.len() != spec.dim {
        return Err(Error::DimensionMismatch { expected: spec.dim, actual: u.len() });
    }
    Ok(spec.value_unchecked(u))
}

/// Kernel names accepted in configuration files and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelName {
    #[serde(rename = "sqexp")]
    SqExp,
    #[serde(rename = "epanechnikov")]
    Epanechnikov,
    #[serde(rename = "stratified-set")]
    StratifiedSet,
}

impl FromStr for KernelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqexp" => Ok(KernelName::SqExp),
            "epanechnikov" => Ok(KernelName::Epanechnikov),
            "stratified-set" => Ok(KernelName::StratifiedSet),
            other => Err(Error::invalid(format!("unknown kernel family '{other}'"))),
        }
    }
}

impl fmt::Display for KernelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelName::SqExp => "sqexp",
            KernelName::Epanechnikov => "epanechnikov",
            KernelName::StratifiedSet => "stratified-set",
        })
    }
}

// ---------------------------------------------------------------------------
// Axiom verification

/// Settings for [`verify_kernel_axioms`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Half-width `R` of the integration cube `[-R, R]^dim`.
    pub radius: f64,
    /// Midpoints per axis.
    pub resolution: usize,
    /// Number of random pairs for the Hölder ratio.
    pub holder_pairs: usize,
    pub seed: u64,
    /// Tolerance for the normalization, boundedness, second moment and Hölder checks.
    pub tolerance: f64,
    /// Tolerance for the first moments.
    pub moment_tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radius: 8.0,
            resolution: 256,
            holder_pairs: 10_000,
            seed: 0,
            tolerance: 1e-3,
            moment_tolerance: 1e-6,
        }
    }
}

/// Numerical values of each axiom and whether it held.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub integral: f64,
    pub max_value: f64,
    pub first_moments: Vec<f64>,
    pub max_second_moment: f64,
    pub holder_ratio: f64,
    pub constants: KernelConstants,
    pub normalization_ok: bool,
    pub bounded_ok: bool,
    pub first_moments_ok: bool,
    pub second_moment_ok: bool,
    pub holder_ok: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.normalization_ok
            && self.bounded_ok
            && self.first_moments_ok
            && self.second_moment_ok
            && self.holder_ok
    }
}

#[derive(Clone)]
struct Partial {
    integral: f64,
    max: f64,
    first: Vec<f64>,
    second: Vec<f64>,
}

/// Checks the smoothing kernel axioms by midpoint quadrature on `[-R, R]^dim`
/// and by sampling Hölder ratios.
pub fn verify_kernel_axioms<K: SmoothingKernel + ?Sized>(
    kernel: &K,
    cfg: &QuadratureConfig,
) -> Result<AxiomReport> {
    let dim = kernel.dim();
    if dim > MAX_QUADRATURE_DIM {
        return Err(Error::Unsupported(format!(
            "tensor-grid quadrature in dimension {dim} (max {MAX_QUADRATURE_DIM})"
        )));
    }
    if cfg.resolution == 0 || !(cfg.radius > 0.0) {
        return Err(Error::invalid("quadrature needs positive radius and resolution"));
    }
    let res = cfg.resolution;
    let h = 2.0 * cfg.radius / res as f64;
    let node = |j: usize| -cfg.radius + (j as f64 + 0.5) * h;
    let inner: usize = res.pow(dim as u32 - 1);

    // one slab per index of the leading axis
    let slabs: Vec<Option<Partial>> = par::map_indexed(res, |i0| {
        let mut p = Partial {
            integral: 0.0,
            max: 0.0,
            first: vec![0.0; dim],
            second: vec![0.0; dim * dim],
        };
        let mut u = vec![0.0; dim];
        u[0] = node(i0);
        for flat in 0..inner {
            let mut rest = flat;
            for axis in 1..dim {
                u[axis] = node(rest % res);
                rest /= res;
            }
            let k = kernel.value(&u);
            if !k.is_finite() {
                return None;
            }
            p.integral += k;
            p.max = p.max.max(k.abs());
            for a in 0..dim {
                p.first[a] += u[a] * k;
                for b in 0..dim {
                    p.second[a * dim + b] += u[a] * u[b] * k;
                }
            }
        }
        Some(p)
    });

    let vol = h.powi(dim as i32);
    let mut integral = 0.0;
    let mut max_value: f64 = 0.0;
    let mut first = vec![0.0; dim];
    let mut second = vec![0.0; dim * dim];
    for slab in slabs {
        let p = slab.ok_or_else(|| Error::NonFinite("kernel integrand".into()))?;
        integral += p.integral;
        max_value = max_value.max(p.max);
        for (acc, v) in first.iter_mut().zip(&p.first) {
            *acc += v;
        }
        for (acc, v) in second.iter_mut().zip(&p.second) {
            *acc += v;
        }
    }
    integral *= vol;
    first.iter_mut().for_each(|v| *v *= vol);
    let max_second_moment = second.iter().map(|v| v * vol).fold(f64::NEG_INFINITY, f64::max);

    let constants = kernel.constants();
    let holder_ratio = holder_ratio(kernel, constants.gamma, cfg)?;
    let tol = cfg.tolerance;

    Ok(AxiomReport {
        integral,
        max_value,
        normalization_ok: (integral - 1.0).abs() <= tol,
        bounded_ok: max_value <= constants.k1 * (1.0 + 1e-12),
        first_moments_ok: first.iter().all(|m| m.abs() <= cfg.moment_tolerance),
        first_moments: first,
        second_moment_ok: max_second_moment <= constants.k2 + tol,
        max_second_moment,
        holder_ok: holder_ratio <= constants.lipschitz * (1.0 + tol),
        holder_ratio,
        constants,
    })
}

/// Largest `|K(u) - K(v)| / |u - v|^gamma` over random pairs: half spread
/// over the cube, half separated by tiny offsets where the ratio approaches
/// the local gradient norm.
fn holder_ratio<K: SmoothingKernel + ?Sized>(
    kernel: &K,
    gamma: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let dim = kernel.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut u = vec![0.0; dim];
    let mut v = vec![0.0; dim];
    let mut worst: f64 = 0.0;
    for pair in 0..cfg.holder_pairs {
        for a in 0..dim {
            u[a] = rng.random_range(-cfg.radius..cfg.radius);
            v[a] = if pair % 2 == 0 {
                rng.random_range(-cfg.radius..cfg.radius)
            } else {
                u[a] + rng.random_range(-1e-3..1e-3)
            };
        }
        let dist = u.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if dist == 0.0 {
            continue;
        }
        let diff = (kernel.value(&u) - kernel.value(&v)).abs();
        let ratio = diff / dist.powf(gamma);
        if !ratio.is_finite() {
            return Err(Error::NonFinite("Hölder ratio".into()));
        }
        worst = worst.max(ratio);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Stratified set similarity

/// One labeled observation `(x, y)` with `y` in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: i8,
}

/// A history of labeled points, compared as a set split by label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledHistory {
    points: Vec<LabeledPoint>,
}

impl LabeledHistory {
    pub fn new(points: Vec<LabeledPoint>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.y != 1 && p.y != -1) {
            return Err(Error::invalid(format!("label must be -1 or +1, got {}", p.y)));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    fn stratum(&self, label: i8) -> Vec<&[f64]> {
        self.points.iter().filter(|p| p.y == label).map(|p| p.x.as_slice()).collect()
    }
}

/// Unnormalized Gaussian `exp(-|x - x'|^2 / w^2)`, bounded by one.
#[inline]
pub fn base_kernel(x: &[f64], x_bar: &[f64], width: f64) -> f64 {
    let r2: f64 = x.iter().zip(x_bar).map(|(a, b)| (a - b) * (a - b)).sum();
    (-r2 / (width * width)).exp()
}

/// Average base-kernel value between two strata, or 0 if either is empty.
///
/// The pair sum is taken in both loop orders and averaged so that swapping
/// the arguments gives a bit-identical result.
fn stratum_term(a: &[&[f64]], b: &[&[f64]], width: f64) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let gram: Vec<f64> =
        a.iter().flat_map(|x| b.iter().map(move |y| base_kernel(x, y, width))).collect();
    let (n, m) = (a.len(), b.len());
    let mut row_major = 0.0;
    for v in &gram {
        row_major += v;
    }
    let mut col_major = 0.0;
    for j in 0..m {
        for i in 0..n {
            col_major += gram[i * m + j];
        }
    }
    0.5 * (row_major + col_major) / (2.0 * (n * m) as f64)
}

/// Stratified set similarity between two labeled histories of equal length.
///
/// Each stratum term `1 / (2 |S+| |S'+|) * sum k(x_i, x'_j)` contributes only
/// when both histories populate that stratum. The result lies in `[0, 1]`.
pub fn stratified_set_weight(
    s: &LabeledHistory,
    s_bar: &LabeledHistory,
    base_width: f64,
) -> Result<f64> {
    if s.len() != s_bar.len() {
        return Err(Error::DimensionMismatch { expected: s.len(), actual: s_bar.len() });
    }
    if !(base_width > 0.0 && base_width.is_finite()) {
        return Err(Error::invalid(format!("base width must be positive, got {base_width}")));
    }
    let pos = stratum_term(&s.stratum(1), &s_bar.stratum(1), base_width);
    let neg = stratum_term(&s.stratum(-1), &s_bar.stratum(-1), base_width);
    Ok(pos + neg)
}
