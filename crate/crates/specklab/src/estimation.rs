//! Moment-based parameter estimation: the equivalent number of looks from
//! homogeneous data, and per-window `(alpha, gamma)` or `(omega, sigma)`
//! fits from the sample moments of order 1/2 and 1.

use crate::bessel::bessel_k_scaled;
use crate::distributions::{G0Params, GHParams, Looks};
use crate::error::{Error, Result};
use crate::numeric::{brent_root, ln_gamma, SearchConfig};

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Sample moments consumed by the fitters: count, mean, unbiased variance
/// and the sample mean of `sqrt(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub half_moment: f64,
}

impl SampleStats {
    /// Computes the moments of a nonempty sample. The variance uses the
    /// unbiased `n - 1` denominator and is 0 for a single observation.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("sample statistics require at least one value"));
        }
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let half_moment = samples.iter().map(|z| z.sqrt()).sum::<f64>() / n as f64;
        let variance = if n > 1 {
            samples.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Ok(SampleStats { n, mean, variance, half_moment })
    }
}

/// Outcome of a moment fit. `params` is present exactly when the solver
/// converged; `residual` is the absolute moment-equation mismatch at the
/// solution (infinite when no solution exists).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult<P> {
    pub params: Option<P>,
    pub converged: bool,
    pub residual: f64,
}

impl<P> FitResult<P> {
    fn failed() -> Self {
        FitResult { params: None, converged: false, residual: f64::INFINITY }
    }
}

/// Equivalent number of looks: the squared mean-to-standard-deviation ratio
/// over (assumed homogeneous) data.
pub fn estimate_enl(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::DegenerateSample(
            "equivalent number of looks requires at least two values".into(),
        ));
    }
    let stats = SampleStats::from_samples(samples)?;
    if stats.variance <= 0.0 {
        return Err(Error::DegenerateSample(
            "equivalent number of looks is undefined for zero-variance data".into(),
        ));
    }
    Ok(stats.mean * stats.mean / stats.variance)
}

/// Fractional moment of the unit-mean speckle at order 1/2:
/// `Γ(L + 1/2) / (sqrt(L)·Γ(L))`.
pub(crate) fn speckle_half_moment(looks: Looks) -> f64 {
    let l = looks.get();
    (ln_gamma(l + 0.5) - 0.5 * l.ln() - ln_gamma(l)).exp()
}

// Backscatter half-moment ratio for the reciprocal-Gamma law:
// sqrt(-alpha-1) * Γ(-alpha-1/2) / Γ(-alpha). Strictly decreasing in alpha,
// range (0, 1) over alpha ∈ (-inf, -1).
fn g0_ratio(alpha: f64) -> f64 {
    (-alpha - 1.0).sqrt() * (ln_gamma(-alpha - 0.5) - ln_gamma(-alpha)).exp()
}

// Backscatter half-moment ratio for the inverse-Gaussian law:
// K_0(2w)/K_{1/2}(2w), strictly increasing in w with supremum 1.
fn gh_ratio(omega: f64) -> f64 {
    let x = 2.0 * omega;
    let k_half_scaled = (PI / (2.0 * x)).sqrt();
    bessel_k_scaled(0.0, x).expect("positive argument") / k_half_scaled
}

const G0_ALPHA_MIN: f64 = -50.0;
const G0_ALPHA_MAX: f64 = -1.0 - 1e-6;
const GH_OMEGA_MIN: f64 = 1e-3;
const GH_OMEGA_MAX: f64 = 1e3;
const TABLE_SIZE: usize = 2048;

// Both moment equations are data-independent monotone curves, so a fixed
// lookup table narrows every per-pixel root search to one grid cell before
// Brent refinement. Built once per process.
struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
    increasing: bool,
}

impl MonotoneTable {
    fn build(lo: f64, hi: f64, log_spaced: bool, f: impl Fn(f64) -> f64) -> Self {
        let xs: Vec<f64> = (0..TABLE_SIZE)
            .map(|i| {
                let t = i as f64 / (TABLE_SIZE - 1) as f64;
                if log_spaced {
                    lo * (hi / lo).powf(t)
                } else {
                    lo + (hi - lo) * t
                }
            })
            .collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let increasing = ys[TABLE_SIZE - 1] > ys[0];
        debug_assert!(ys.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] }));
        MonotoneTable { xs, ys, increasing }
    }

    /// Returns the grid cell whose values bracket `y`, or `None` when `y`
    /// falls outside the attainable range.
    fn bracket(&self, y: f64) -> Option<(f64, f64)> {
        let (min_y, max_y) = if self.increasing {
            (self.ys[0], self.ys[TABLE_SIZE - 1])
        } else {
            (self.ys[TABLE_SIZE - 1], self.ys[0])
        };
        if !(y > min_y && y < max_y) {
            return None;
        }
        let idx = if self.increasing {
            self.ys.partition_point(|&v| v < y)
        } else {
            self.ys.partition_point(|&v| v > y)
        };
        Some((self.xs[idx - 1], self.xs[idx]))
    }
}

fn g0_table() -> &'static MonotoneTable {
    static TABLE: OnceLock<MonotoneTable> = OnceLock::new();
    TABLE.get_or_init(|| MonotoneTable::build(G0_ALPHA_MIN, G0_ALPHA_MAX, false, g0_ratio))
}

fn gh_table() -> &'static MonotoneTable {
    static TABLE: OnceLock<MonotoneTable> = OnceLock::new();
    TABLE.get_or_init(|| MonotoneTable::build(GH_OMEGA_MIN, GH_OMEGA_MAX, true, gh_ratio))
}

// Normalized half-moment ratio: sample m_{1/2}/sqrt(m_1) divided by the
// speckle contribution, leaving the pure backscatter ratio.
fn normalized_ratio(stats: &SampleStats, looks: Looks) -> Option<f64> {
    if !(stats.mean > 0.0) || !(stats.half_moment > 0.0) {
        return None;
    }
    let rho = stats.half_moment / stats.mean.sqrt() / speckle_half_moment(looks);
    rho.is_finite().then_some(rho)
}

/// Fits `(alpha, gamma)` of the heavy-tailed return law from the moments of
/// order 1/2 and 1:
///
/// * `m_1 = gamma / (-alpha - 1)`
/// * `m_{1/2} = sqrt(gamma/L) · Γ(L+1/2)Γ(-alpha-1/2) / (Γ(L)Γ(-alpha))`
///
/// A bracketed root search in `alpha` on `(-50, -1)` solves the ratio
/// equation, then `gamma` follows from the first moment. Windows whose
/// ratio falls outside the attainable range (statistically homogeneous data
/// in particular) yield `converged = false`.
pub fn fit_g0_moments(stats: &SampleStats, looks: Looks) -> FitResult<G0Params> {
    let Some(rho) = normalized_ratio(stats, looks) else {
        return FitResult::failed();
    };
    let Some((lo, hi)) = g0_table().bracket(rho) else {
        return FitResult::failed();
    };
    let alpha = match brent_root(|a| g0_ratio(a) - rho, lo, hi, SearchConfig::default()) {
        Ok(a) => a,
        Err(_) => return FitResult::failed(),
    };
    let gamma = stats.mean * (-alpha - 1.0);
    match G0Params::new(alpha, gamma) {
        Ok(params) => FitResult {
            params: Some(params),
            converged: true,
            residual: (g0_ratio(alpha) - rho).abs(),
        },
        Err(_) => FitResult::failed(),
    }
}

/// Fits `(omega, sigma)` of the inverse-Gaussian-backscatter return law:
/// `sigma` is the first moment, and `omega` solves
/// `m_{1/2}/sqrt(m_1) = [Γ(L+1/2)/(sqrt(L)Γ(L))] · K_0(2w)/K_{1/2}(2w)`
/// by bracketed root search on `w ∈ (1e-3, 1e3)`. The Bessel ratio tends to
/// 1 from below, so near-homogeneous windows fail with `converged = false`.
pub fn fit_gh_moments(stats: &SampleStats, looks: Looks) -> FitResult<GHParams> {
    let Some(rho) = normalized_ratio(stats, looks) else {
        return FitResult::failed();
    };
    let Some((lo, hi)) = gh_table().bracket(rho) else {
        return FitResult::failed();
    };
    let omega = match brent_root(|w| gh_ratio(w) - rho, lo, hi, SearchConfig::default()) {
        Ok(w) => w,
        Err(_) => return FitResult::failed(),
    };
    match GHParams::new(omega, stats.mean) {
        Ok(params) => FitResult {
            params: Some(params),
            converged: true,
            residual: (gh_ratio(omega) - rho).abs(),
        },
        Err(_) => FitResult::failed(),
    }
}

/// Window estimates for the Lee filter: the backscatter mean is the window
/// mean, and the backscatter variance inverts the multiplicative law
/// `var(Z) = var(X)(1 + s) + mean(X)^2·s` with `s = 1/L` the speckle
/// variance:
///
/// `var(X) = (var(Z) - mean(Z)^2·s) / (s + 1)`
///
/// The variance is returned as computed, even when negative (smooth windows
/// can undershoot); gain clamping is the filter's job.
pub fn lee_local_stats(window: &[f64], looks: Looks) -> Result<(f64, f64)> {
    let stats = SampleStats::from_samples(window)?;
    Ok(lee_stats_from_moments(stats.mean, stats.variance, looks))
}

pub(crate) fn lee_stats_from_moments(mean: f64, variance: f64, looks: Looks) -> (f64, f64) {
    let s = looks.speckle_variance();
    (mean, (variance - mean * mean * s) / (s + 1.0))
}
