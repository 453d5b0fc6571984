//! The multiplicative speckle model: the return observed at a pixel is
//! `Z = X·Y`, the product of an unobserved backscatter `X` and unit-mean
//! Gamma speckle `Y` with shape `L` (the number of looks).
//!
//! Four backscatter laws are supported — a constant, a Gamma (giving the K
//! return law), a reciprocal Gamma (giving the heavy-tailed G0 law) and an
//! inverse Gaussian (giving the GH law). Densities are evaluated in log
//! space and exponentiated at the boundary so that large looks or scale
//! parameters cannot overflow intermediate terms.

use crate::bessel::{bessel_k_scaled, ln_bessel_k};
use crate::error::{Error, Result};
use crate::numeric::ln_gamma;
use crate::rng::Rng;

use rand_distr::{Distribution, Gamma as GammaDist, InverseGaussian};

use std::f64::consts::PI;

/// Number of looks of the speckle, `L ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Looks(f64);

impl Looks {
    pub fn new(l: f64) -> Result<Self> {
        if !(l >= 1.0) || !l.is_finite() {
            return Err(Error::domain(format!("looks must satisfy L >= 1, got {l}")));
        }
        Ok(Looks(l))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Speckle variance `1/L`.
    pub fn speckle_variance(self) -> f64 {
        1.0 / self.0
    }
}

/// Reciprocal-Gamma backscatter parameters: shape `alpha < 0`, scale `gamma > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G0Params {
    alpha: f64,
    gamma: f64,
}

impl G0Params {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha < 0.0) || !(gamma > 0.0) || !alpha.is_finite() || !gamma.is_finite() {
            return Err(Error::domain(format!(
                "G0 parameters require alpha < 0 and gamma > 0, got ({alpha}, {gamma})"
            )));
        }
        Ok(G0Params { alpha, gamma })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn gamma(self) -> f64 {
        self.gamma
    }

    /// Backscatter mean `gamma / (-alpha - 1)`, defined for `alpha < -1`.
    pub fn mean(self) -> Result<f64> {
        if self.alpha >= -1.0 {
            return Err(Error::MomentUndefined {
                order: 1.0,
                model: format!("G0(alpha = {}, gamma = {})", self.alpha, self.gamma),
            });
        }
        Ok(self.gamma / (-self.alpha - 1.0))
    }
}

/// Inverse-Gaussian backscatter parameters: shape `omega > 0`, scale `sigma > 0`.
///
/// The backscatter law is the classical inverse Gaussian with mean `sigma`
/// and shape `2·omega·sigma`, i.e. density
/// `sqrt(omega·sigma/(pi·x^3)) · e^{2·omega} · exp(-omega·x/sigma - omega·sigma/x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GHParams {
    omega: f64,
    sigma: f64,
}

impl GHParams {
    pub fn new(omega: f64, sigma: f64) -> Result<Self> {
        if !(omega > 0.0) || !(sigma > 0.0) || !omega.is_finite() || !sigma.is_finite() {
            return Err(Error::domain(format!(
                "GH parameters require omega > 0 and sigma > 0, got ({omega}, {sigma})"
            )));
        }
        Ok(GHParams { omega, sigma })
    }

    pub fn omega(self) -> f64 {
        self.omega
    }

    pub fn sigma(self) -> f64 {
        self.sigma
    }
}

/// Gamma backscatter parameters: shape `alpha > 0`, rate `lambda > 0`
/// (giving backscatter mean `alpha/lambda`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KParams {
    alpha: f64,
    lambda: f64,
}

impl KParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(lambda > 0.0) || !alpha.is_finite() || !lambda.is_finite() {
            return Err(Error::domain(format!(
                "K parameters require alpha > 0 and lambda > 0, got ({alpha}, {lambda})"
            )));
        }
        Ok(KParams { alpha, lambda })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }
}

/// Constant backscatter: mean return `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantParams {
    c: f64,
}

impl ConstantParams {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::domain(format!("constant backscatter requires c > 0, got {c}")));
        }
        Ok(ConstantParams { c })
    }

    pub fn c(self) -> f64 {
        self.c
    }
}

/// One fully parameterized return law `Z = X·Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReturnModel {
    ConstantGamma { params: ConstantParams, looks: Looks },
    K { params: KParams, looks: Looks },
    G0 { params: G0Params, looks: Looks },
    GH { params: GHParams, looks: Looks },
}

impl ReturnModel {
    pub fn constant_gamma(c: f64, looks: Looks) -> Result<Self> {
        Ok(ReturnModel::ConstantGamma { params: ConstantParams::new(c)?, looks })
    }

    pub fn k(alpha: f64, lambda: f64, looks: Looks) -> Result<Self> {
        Ok(ReturnModel::K { params: KParams::new(alpha, lambda)?, looks })
    }

    pub fn g0(alpha: f64, gamma: f64, looks: Looks) -> Result<Self> {
        Ok(ReturnModel::G0 { params: G0Params::new(alpha, gamma)?, looks })
    }

    pub fn gh(omega: f64, sigma: f64, looks: Looks) -> Result<Self> {
        Ok(ReturnModel::GH { params: GHParams::new(omega, sigma)?, looks })
    }

    pub fn looks(&self) -> Looks {
        match *self {
            ReturnModel::ConstantGamma { looks, .. }
            | ReturnModel::K { looks, .. }
            | ReturnModel::G0 { looks, .. }
            | ReturnModel::GH { looks, .. } => looks,
        }
    }

    /// Mean of the return, when it exists.
    pub fn mean(&self) -> Result<f64> {
        theoretical_moment(self, 1.0)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReturnModel::ConstantGamma { .. } => "constant-gamma",
            ReturnModel::K { .. } => "k",
            ReturnModel::G0 { .. } => "g0",
            ReturnModel::GH { .. } => "gh",
        }
    }
}

/// Unit-mean Gamma speckle density `L^L/Γ(L) · x^{L-1} · e^{-Lx}` for `x > 0`.
pub fn speckle_pdf(x: f64, looks: Looks) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("speckle density requires x > 0, got {x}")));
    }
    let l = looks.get();
    let ln = l * l.ln() + (l - 1.0) * x.ln() - l * x - ln_gamma(l);
    finite_density(ln.exp(), "speckle")
}

/// Density of the selected return law at `z > 0`.
pub fn return_pdf(z: f64, model: &ReturnModel) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("return density requires z > 0, got {z}")));
    }
    let value = ln_return_pdf(z, model)?.exp();
    finite_density(value, model.name())
}

fn finite_density(value: f64, what: &str) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::Overflow(format!("{what} density is not representable")));
    }
    Ok(value)
}

/// Log-density of the return law; the numerically safe workhorse behind
/// [`return_pdf`].
pub fn ln_return_pdf(z: f64, model: &ReturnModel) -> Result<f64> {
    debug_assert!(z > 0.0);
    let l = model.looks().get();
    match model {
        ReturnModel::ConstantGamma { params, .. } => {
            let c = params.c();
            Ok(l * (l / c).ln() + (l - 1.0) * z.ln() - l * z / c - ln_gamma(l))
        }
        ReturnModel::G0 { params, .. } => {
            let (a, g) = (params.alpha(), params.gamma());
            Ok(l * l.ln() + ln_gamma(l - a) - a * g.ln() - ln_gamma(l) - ln_gamma(-a)
                + (l - 1.0) * z.ln()
                - (l - a) * (g + l * z).ln())
        }
        ReturnModel::GH { params, .. } => {
            let (w, s) = (params.omega(), params.sigma());
            let arg = 2.0 * ((w / s) * (w * s + l * z)).sqrt();
            Ok(2.0_f64.ln() + l * l.ln() + 0.5 * (w * s / PI).ln() + 2.0 * w - ln_gamma(l)
                + (l - 1.0) * z.ln()
                + 0.25 * (1.0 + 2.0 * l) * (w / (s * (w * s + l * z))).ln()
                + ln_bessel_k(l + 0.5, arg)?)
        }
        ReturnModel::K { params, .. } => {
            let (a, lam) = (params.alpha(), params.lambda());
            let arg = 2.0 * (lam * l * z).sqrt();
            Ok(2.0_f64.ln() + 0.5 * (a + l) * (lam * l).ln() - ln_gamma(l) - ln_gamma(a)
                + (0.5 * (a + l) - 1.0) * z.ln()
                + ln_bessel_k(a - l, arg)?)
        }
    }
}

/// Log-density of the reciprocal-Gamma backscatter prior behind the G0 law.
pub fn ln_reciprocal_gamma_pdf(x: f64, params: G0Params) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("backscatter density requires x > 0, got {x}")));
    }
    let (a, g) = (params.alpha(), params.gamma());
    Ok(-a * g.ln() - ln_gamma(-a) + (a - 1.0) * x.ln() - g / x)
}

/// Log-density of the inverse-Gaussian backscatter prior behind the GH law.
pub fn ln_inverse_gaussian_pdf(x: f64, params: GHParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("backscatter density requires x > 0, got {x}")));
    }
    let (w, s) = (params.omega(), params.sigma());
    Ok(0.5 * ((w * s / PI).ln() - 3.0 * x.ln()) + 2.0 * w - w * x / s - w * s / x)
}

/// Fractional moment of the unit-mean speckle: `E[Y^k] = Γ(L+k)/(L^k·Γ(L))`.
fn speckle_moment(looks: Looks, k: f64) -> Result<f64> {
    let l = looks.get();
    if l + k <= 0.0 {
        return Err(Error::MomentUndefined { order: k, model: format!("speckle(L = {l})") });
    }
    Ok((ln_gamma(l + k) - k * l.ln() - ln_gamma(l)).exp())
}

fn backscatter_mean(model: &ReturnModel) -> Result<f64> {
    match model {
        ReturnModel::ConstantGamma { params, .. } => Ok(params.c()),
        ReturnModel::K { params, .. } => Ok(params.alpha() / params.lambda()),
        ReturnModel::G0 { params, .. } => params.mean(),
        ReturnModel::GH { params, .. } => Ok(params.sigma()),
    }
}

/// Closed-form moment `E[Z^k]` of a return law: the product of the
/// backscatter moment and the speckle moment.
pub fn theoretical_moment(model: &ReturnModel, k: f64) -> Result<f64> {
    // k = 0 and k = 1 have exact closed values (the unit-mean speckle leaves
    // the first moment untouched); skip the log-gamma path and its round-off.
    if k == 0.0 {
        return Ok(1.0);
    }
    if k == 1.0 {
        return backscatter_mean(model);
    }
    let speckle = speckle_moment(model.looks(), k)?;
    let backscatter = match model {
        ReturnModel::ConstantGamma { params, .. } => params.c().powf(k),
        ReturnModel::K { params, .. } => {
            let (a, lam) = (params.alpha(), params.lambda());
            if a + k <= 0.0 {
                return Err(Error::MomentUndefined {
                    order: k,
                    model: format!("K(alpha = {a}, lambda = {lam})"),
                });
            }
            (ln_gamma(a + k) - ln_gamma(a) - k * lam.ln()).exp()
        }
        ReturnModel::G0 { params, .. } => {
            let (a, g) = (params.alpha(), params.gamma());
            // E[X^k] = gamma^k Γ(-alpha-k)/Γ(-alpha), needs k < -alpha.
            if -a - k <= 0.0 {
                return Err(Error::MomentUndefined {
                    order: k,
                    model: format!("G0(alpha = {a}, gamma = {g})"),
                });
            }
            (k * g.ln() + ln_gamma(-a - k) - ln_gamma(-a)).exp()
        }
        ReturnModel::GH { params, .. } => {
            let (w, s) = (params.omega(), params.sigma());
            // Generalized-inverse-Gaussian moment; the e^{2w} scaling cancels
            // in the ratio of scaled Bessel values.
            s.powf(k) * bessel_k_scaled(k - 0.5, 2.0 * w)? / bessel_k_scaled(0.5, 2.0 * w)?
        }
    };
    Ok(backscatter * speckle)
}

/// Prepared sampler for one return model; drawing order is backscatter first,
/// speckle second, so the stream layout is part of the determinism contract.
pub struct ModelSampler {
    backscatter: BackscatterSampler,
    speckle: GammaDist<f64>,
}

enum BackscatterSampler {
    Constant(f64),
    /// Reciprocal Gamma: `X = gamma / G`, `G ~ Gamma(-alpha, 1)`.
    ReciprocalGamma { gamma: f64, denom: GammaDist<f64> },
    /// Gamma with shape `alpha` and scale `1/lambda`.
    Gamma(GammaDist<f64>),
    /// Inverse Gaussian with mean `sigma` and shape `2·omega·sigma`.
    InverseGaussian(InverseGaussian<f64>),
}

impl ModelSampler {
    pub fn new(model: &ReturnModel) -> Result<Self> {
        let l = model.looks().get();
        let speckle = GammaDist::new(l, 1.0 / l)
            .map_err(|e| Error::domain(format!("speckle sampler: {e}")))?;
        let backscatter = match model {
            ReturnModel::ConstantGamma { params, .. } => BackscatterSampler::Constant(params.c()),
            ReturnModel::G0 { params, .. } => BackscatterSampler::ReciprocalGamma {
                gamma: params.gamma(),
                denom: GammaDist::new(-params.alpha(), 1.0)
                    .map_err(|e| Error::domain(format!("G0 sampler: {e}")))?,
            },
            ReturnModel::K { params, .. } => BackscatterSampler::Gamma(
                GammaDist::new(params.alpha(), 1.0 / params.lambda())
                    .map_err(|e| Error::domain(format!("K sampler: {e}")))?,
            ),
            ReturnModel::GH { params, .. } => BackscatterSampler::InverseGaussian(
                InverseGaussian::new(params.sigma(), 2.0 * params.omega() * params.sigma())
                    .map_err(|e| Error::domain(format!("GH sampler: {e}")))?,
            ),
        };
        Ok(ModelSampler { backscatter, speckle })
    }

    pub fn sample_one(&self, rng: &mut Rng) -> f64 {
        let x = match &self.backscatter {
            BackscatterSampler::Constant(c) => *c,
            BackscatterSampler::ReciprocalGamma { gamma, denom } => gamma / denom.sample(rng),
            BackscatterSampler::Gamma(d) => d.sample(rng),
            BackscatterSampler::InverseGaussian(d) => d.sample(rng),
        };
        x * self.speckle.sample(rng)
    }
}

/// Draws `n ≥ 1` independent returns from the model.
pub fn sample(rng: &mut Rng, model: &ReturnModel, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("sample count must be at least 1".to_string()));
    }
    let sampler = ModelSampler::new(model)?;
    Ok((0..n).map(|_| sampler.sample_one(rng)).collect())
}
