//! Sliding-window despeckling.
//!
//! Three filters share one window engine: Lee's minimum-mean-square filter
//! and two maximum-a-posteriori filters whose backscatter priors are the
//! reciprocal-Gamma and inverse-Gaussian laws. The MAP closed forms are
//! validated against a numerical posterior-argmax oracle.

use crate::distributions::{
    ln_inverse_gaussian_pdf, ln_reciprocal_gamma_pdf, G0Params, GHParams, Looks,
};
use crate::error::{Error, Result};
use crate::estimation::{fit_g0_moments, fit_gh_moments, lee_stats_from_moments, SampleStats};
use crate::image::Image;
use crate::numeric::{bracket_max_log_grid, golden_max, ln_gamma};

/// Filtering method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterMethod {
    Lee,
    MapG0,
    MapGH,
}

impl FilterMethod {
    pub const ALL: [FilterMethod; 3] = [FilterMethod::Lee, FilterMethod::MapG0, FilterMethod::MapGH];

    pub fn name(self) -> &'static str {
        match self {
            FilterMethod::Lee => "lee",
            FilterMethod::MapG0 => "mapg0",
            FilterMethod::MapGH => "mapgh",
        }
    }

    /// Single-letter code used on plot axes.
    pub fn letter(self) -> char {
        match self {
            FilterMethod::Lee => 'L',
            FilterMethod::MapG0 => 'G',
            FilterMethod::MapGH => 'H',
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lee" => Ok(FilterMethod::Lee),
            "mapg0" => Ok(FilterMethod::MapG0),
            "mapgh" => Ok(FilterMethod::MapGH),
            other => Err(Error::Validation(vec![format!(
                "unknown filter '{other}' (expected lee, mapg0 or mapgh)"
            )])),
        }
    }
}

/// What a MAP filter outputs when the local moment fit fails (typically on
/// statistically homogeneous windows).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitFallback {
    /// The window sample mean — the natural backscatter estimate exactly
    /// where a fit is impossible.
    WindowMean,
    /// The unfiltered center pixel, for diagnostics.
    Identity,
}

impl FitFallback {
    pub fn name(self) -> &'static str {
        match self {
            FitFallback::WindowMean => "window-mean",
            FitFallback::Identity => "identity",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "window-mean" => Ok(FitFallback::WindowMean),
            "identity" => Ok(FitFallback::Identity),
            other => Err(Error::Validation(vec![format!(
                "unknown fallback '{other}' (expected window-mean or identity)"
            )])),
        }
    }
}

/// Full filter configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub method: FilterMethod,
    pub window: usize,
    pub looks: Looks,
    pub fallback: FitFallback,
}

impl FilterSpec {
    pub fn new(method: FilterMethod, window: usize, looks: Looks) -> Result<Self> {
        if window < 3 || window.is_multiple_of(2) {
            return Err(Error::Validation(vec![format!(
                "window side must be odd and at least 3, got {window}"
            )]));
        }
        Ok(FilterSpec { method, window, looks, fallback: FitFallback::WindowMean })
    }

    pub fn with_fallback(mut self, fallback: FitFallback) -> Self {
        self.fallback = fallback;
        self
    }
}

/// Closed-form MAP backscatter estimate under the reciprocal-Gamma prior:
/// `(L·z + gamma) / (L + 1 - alpha)`.
pub fn map_g0_estimate(z: f64, params: G0Params, looks: Looks) -> f64 {
    debug_assert!(z >= 0.0);
    let l = looks.get();
    (l * z + params.gamma()) / (l + 1.0 - params.alpha())
}

/// Closed-form MAP backscatter estimate under the inverse-Gaussian prior:
/// the positive root of `(w/s)·x² + (L + 3/2)·x - (L·z + w·s) = 0`, written
/// in the cancellation-free conjugate form.
pub fn map_gh_estimate(z: f64, params: GHParams, looks: Looks) -> f64 {
    debug_assert!(z >= 0.0);
    let l = looks.get();
    let (w, s) = (params.omega(), params.sigma());
    let b = l + 1.5;
    let c = l * z + w * s;
    let disc = (b * b + 4.0 * (w / s) * c).sqrt();
    2.0 * c / (disc + b)
}

/// Backscatter prior for the numerical MAP oracle.
#[derive(Debug, Clone, Copy)]
pub enum BackscatterPrior {
    ReciprocalGamma(G0Params),
    InverseGaussian(GHParams),
}

impl BackscatterPrior {
    fn ln_pdf(&self, x: f64) -> Result<f64> {
        match *self {
            BackscatterPrior::ReciprocalGamma(p) => ln_reciprocal_gamma_pdf(x, p),
            BackscatterPrior::InverseGaussian(p) => ln_inverse_gaussian_pdf(x, p),
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            BackscatterPrior::ReciprocalGamma(p) => p.mean().unwrap_or(p.gamma()),
            BackscatterPrior::InverseGaussian(p) => p.sigma(),
        }
    }
}

/// Maximizes the log-posterior `log f_{Z|X=x}(z) + log f_X(x)` over `x > 0`
/// by a log-grid scan plus golden-section refinement. This is the test
/// oracle for the closed-form MAP estimators and deliberately shares no code
/// with them.
pub fn numerical_map_oracle(z: f64, prior: &BackscatterPrior, looks: Looks) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("oracle requires z > 0, got {z}")));
    }
    let l = looks.get();
    let ln_likelihood = move |x: f64| {
        // Gamma(L, L/x) density evaluated at the observation.
        l * (l / x).ln() + (l - 1.0) * z.ln() - l * z / x - ln_gamma(l)
    };
    let objective = |x: f64| ln_likelihood(x) + prior.ln_pdf(x).unwrap_or(f64::NEG_INFINITY);

    let anchor = z.max(prior.scale());
    let (a, b, c) = bracket_max_log_grid(objective, anchor * 1e-8, anchor * 1e8, 400)?;
    Ok(golden_max(objective, a, b, c, 1e-12))
}

// Mirror padding without repeating the boundary pixel: -1 maps to 1 and
// n maps to n - 2. Valid while the overhang stays below the image size.
fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let m = if i < 0 { -i } else if i >= n { 2 * n - 2 - i } else { i };
    debug_assert!((0..n).contains(&m));
    m as usize
}

// Summed-area tables over the mirror-padded image for z, z² and sqrt(z).
// Window sums become O(1) per pixel and depend only on the input image, so
// pixel outputs are independent of evaluation order.
struct WindowEngine {
    padded_w: usize,
    sum_z: Vec<f64>,
    sum_z2: Vec<f64>,
    sum_sqrt: Vec<f64>,
    window: usize,
}

impl WindowEngine {
    fn new(image: &Image, window: usize) -> Self {
        let half = window / 2;
        let (w, h) = (image.width(), image.height());
        let (pw, ph) = (w + 2 * half, h + 2 * half);

        let mut padded = vec![0.0f64; pw * ph];
        for py in 0..ph {
            let sy = mirror(py as isize - half as isize, h);
            for px in 0..pw {
                let sx = mirror(px as isize - half as isize, w);
                padded[py * pw + px] = image.get(sx, sy);
            }
        }

        let stride = pw + 1;
        let mut sum_z = vec![0.0f64; stride * (ph + 1)];
        let mut sum_z2 = vec![0.0f64; stride * (ph + 1)];
        let mut sum_sqrt = vec![0.0f64; stride * (ph + 1)];
        for py in 0..ph {
            let mut row_z = 0.0;
            let mut row_z2 = 0.0;
            let mut row_sq = 0.0;
            for px in 0..pw {
                let v = padded[py * pw + px];
                row_z += v;
                row_z2 += v * v;
                row_sq += v.sqrt();
                let idx = (py + 1) * stride + px + 1;
                sum_z[idx] = sum_z[py * stride + px + 1] + row_z;
                sum_z2[idx] = sum_z2[py * stride + px + 1] + row_z2;
                sum_sqrt[idx] = sum_sqrt[py * stride + px + 1] + row_sq;
            }
        }

        WindowEngine { padded_w: pw, sum_z, sum_z2, sum_sqrt, window }
    }

    /// Window moments centered on output pixel `(x, y)`.
    fn stats(&self, x: usize, y: usize) -> SampleStats {
        let stride = self.padded_w + 1;
        let (x0, y0) = (x, y); // padded window origin: output (x,y) maps here
        let (x1, y1) = (x + self.window, y + self.window);
        let rect = |table: &[f64]| {
            table[y1 * stride + x1] - table[y0 * stride + x1] - table[y1 * stride + x0]
                + table[y0 * stride + x0]
        };
        let n = self.window * self.window;
        let nf = n as f64;
        let s1 = rect(&self.sum_z);
        let s2 = rect(&self.sum_z2);
        let sh = rect(&self.sum_sqrt);
        let mean = s1 / nf;
        let variance = ((s2 - s1 * s1 / nf) / (nf - 1.0)).max(0.0);
        SampleStats { n, mean, variance, half_moment: sh / nf }
    }
}

fn filter_pixel(spec: &FilterSpec, stats: &SampleStats, z: f64) -> f64 {
    match spec.method {
        FilterMethod::Lee => {
            let (mean, var_x) = lee_stats_from_moments(stats.mean, stats.variance, spec.looks);
            // The raw gain var_x/var_z can leave [0, 1] on smooth windows;
            // clamping keeps the convex-combination reading of the filter.
            let gain = if stats.variance > 0.0 {
                (var_x / stats.variance).clamp(0.0, 1.0)
            } else {
                0.0
            };
            mean + gain * (z - mean)
        }
        FilterMethod::MapG0 => match fit_g0_moments(stats, spec.looks).params {
            Some(params) => map_g0_estimate(z, params, spec.looks),
            None => fallback_value(spec, stats, z),
        },
        FilterMethod::MapGH => match fit_gh_moments(stats, spec.looks).params {
            Some(params) => map_gh_estimate(z, params, spec.looks),
            None => fallback_value(spec, stats, z),
        },
    }
}

fn fallback_value(spec: &FilterSpec, stats: &SampleStats, z: f64) -> f64 {
    match spec.fallback {
        FitFallback::WindowMean => stats.mean,
        FitFallback::Identity => z,
    }
}

/// Filters the image with the configured method. The window is gathered with
/// mirror padding at the borders, local parameters are estimated at every
/// pixel, and the output has the input's dimensions.
pub fn apply_filter(image: &Image, spec: &FilterSpec) -> Result<Image> {
    if spec.window > image.width().min(image.height()) {
        return Err(Error::Dimension(format!(
            "window {} exceeds image extent {}x{}",
            spec.window,
            image.width(),
            image.height()
        )));
    }
    let engine = WindowEngine::new(image, spec.window);
    let mut out = Vec::with_capacity(image.width() * image.height());
    for y in 0..image.height() {
        for x in 0..image.width() {
            let stats = engine.stats(x, y);
            out.push(filter_pixel(spec, &stats, image.get(x, y)));
        }
    }
    Image::new(image.width(), image.height(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample, ReturnModel};
    use crate::estimation::estimate_enl;
    use crate::rng::Rng;

    fn looks(l: f64) -> Looks {
        Looks::new(l).unwrap()
    }

    fn g0(alpha: f64, gamma: f64) -> G0Params {
        G0Params::new(alpha, gamma).unwrap()
    }

    fn gh(omega: f64, sigma: f64) -> GHParams {
        GHParams::new(omega, sigma).unwrap()
    }

    #[test]
    fn map_g0_hand_values() {
        assert_eq!(map_g0_estimate(100.0, g0(-2.0, 300.0), looks(1.0)), 100.0);
        assert_eq!(map_g0_estimate(0.0, g0(-3.0, 16.0), looks(4.0)), 2.0);
    }

    #[test]
    fn map_g0_fixed_point() {
        let params = g0(-5.0, 420.0);
        let z = params.gamma() / (1.0 - params.alpha());
        for l in [1.0, 2.0, 8.0] {
            let x = map_g0_estimate(z, params, looks(l));
            assert!((x - z).abs() < 1e-12 * z);
        }
    }

    #[test]
    fn map_gh_hand_value() {
        let x = map_gh_estimate(0.0, gh(1.0, 1.0), looks(1.0));
        assert!((x - 0.35078105935821136).abs() < 1e-11, "got {x}");
    }

    #[test]
    fn map_gh_always_positive() {
        for &z in &[0.0, 0.5, 50.0, 5000.0] {
            for &(w, s) in &[(0.1, 10.0), (2.0, 230.0), (500.0, 50.0)] {
                let x = map_gh_estimate(z, gh(w, s), looks(1.0));
                assert!(x > 0.0, "x = {x} at z = {z}, w = {w}, s = {s}");
            }
        }
    }

    #[test]
    fn map_gh_concentrated_prior_pins_to_sigma() {
        let x = map_gh_estimate(50.0, gh(1e3, 50.0), looks(1.0));
        assert!((x - 50.0).abs() / 50.0 < 0.01, "got {x}");
    }

    #[test]
    fn map_estimates_increase_with_observation() {
        let zs: Vec<f64> = (0..200).map(|i| i as f64 * 5.0).collect();
        let pg = g0(-4.0, 690.0);
        let ph = gh(2.0, 230.0);
        for l in [1.0, 4.0] {
            for w in zs.windows(2) {
                assert!(
                    map_g0_estimate(w[1], pg, looks(l)) > map_g0_estimate(w[0], pg, looks(l))
                );
                assert!(
                    map_gh_estimate(w[1], ph, looks(l)) > map_gh_estimate(w[0], ph, looks(l))
                );
            }
        }
    }

    #[test]
    fn map_g0_scales_jointly_in_observation_and_gamma() {
        // Scaling z and gamma by a power of two scales the estimate exactly.
        let l = looks(4.0);
        for k in [-4i32, 1, 7] {
            let c = 2.0_f64.powi(k);
            let base = map_g0_estimate(120.0, g0(-3.0, 400.0), l);
            let scaled = map_g0_estimate(120.0 * c, g0(-3.0, 400.0 * c), l);
            assert_eq!(scaled, base * c);
        }
    }

    #[test]
    fn oracle_matches_g0_closed_form() {
        for &(alpha, gamma) in &[(-2.0, 230.0), (-4.0, 150.0), (-10.0, 2070.0)] {
            for &z in &[1.0, 50.0, 230.0, 2000.0] {
                for &l in &[1.0, 4.0] {
                    let params = g0(alpha, gamma);
                    let closed = map_g0_estimate(z, params, looks(l));
                    let oracle = numerical_map_oracle(
                        z,
                        &BackscatterPrior::ReciprocalGamma(params),
                        looks(l),
                    )
                    .unwrap();
                    assert!(
                        ((closed - oracle) / closed).abs() < 1e-5,
                        "closed {closed} vs oracle {oracle} at a={alpha} g={gamma} z={z} L={l}"
                    );
                }
            }
        }
    }

    #[test]
    fn oracle_matches_gh_closed_form() {
        for &w in &[0.5, 2.0, 10.0] {
            for &s in &[50.0, 230.0] {
                for &z in &[1.0, 230.0] {
                    let params = gh(w, s);
                    let closed = map_gh_estimate(z, params, looks(1.0));
                    let oracle = numerical_map_oracle(
                        z,
                        &BackscatterPrior::InverseGaussian(params),
                        looks(1.0),
                    )
                    .unwrap();
                    assert!(
                        ((closed - oracle) / closed).abs() < 1e-5,
                        "closed {closed} vs oracle {oracle} at w={w} s={s} z={z}"
                    );
                }
            }
        }
    }

    #[test]
    fn oracle_tracks_prior_mode_when_prior_dominates() {
        // alpha = -50 concentrates the prior near its mode gamma/(1-alpha).
        let params = g0(-50.0, 49.0 * 230.0);
        let mode = params.gamma() / (1.0 - params.alpha());
        for &z in &[100.0, 230.0, 600.0] {
            let oracle = numerical_map_oracle(
                z,
                &BackscatterPrior::ReciprocalGamma(params),
                looks(1.0),
            )
            .unwrap();
            assert!(((oracle - mode) / mode).abs() < 0.05, "oracle {oracle}, mode {mode}");
        }
    }

    #[test]
    fn constant_image_passes_through_every_filter() {
        let img = Image::filled(32, 24, 230.0).unwrap();
        for method in FilterMethod::ALL {
            let spec = FilterSpec::new(method, 7, looks(1.0)).unwrap();
            let out = apply_filter(&img, &spec).unwrap();
            assert_eq!(out, img, "{method:?} altered a constant image");
        }
    }

    #[test]
    fn lee_smooths_homogeneous_speckle() {
        let model = ReturnModel::constant_gamma(230.0, looks(1.0)).unwrap();
        let data = sample(&mut Rng::from_seed(3), &model, 128 * 128).unwrap();
        let img = Image::new(128, 128, data).unwrap();
        let spec = FilterSpec::new(FilterMethod::Lee, 7, looks(1.0)).unwrap();
        let out = apply_filter(&img, &spec).unwrap();
        let enl_in = estimate_enl(img.pixels()).unwrap();
        let enl_out = estimate_enl(out.pixels()).unwrap();
        assert!(
            enl_out > 5.0 * enl_in,
            "ENL before {enl_in}, after {enl_out}"
        );
    }

    #[test]
    fn map_filters_preserve_dimensions_and_finiteness() {
        let model = ReturnModel::g0(-2.0, 230.0, looks(1.0)).unwrap();
        let data = sample(&mut Rng::from_seed(8), &model, 48 * 40).unwrap();
        let img = Image::new(48, 40, data).unwrap();
        for method in [FilterMethod::MapG0, FilterMethod::MapGH] {
            let spec = FilterSpec::new(method, 7, looks(1.0)).unwrap();
            let out = apply_filter(&img, &spec).unwrap();
            assert_eq!((out.width(), out.height()), (48, 40));
            assert!(out.pixels().iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }

    #[test]
    fn lee_output_stays_inside_window_envelope() {
        let model = ReturnModel::g0(-4.0, 690.0, looks(1.0)).unwrap();
        let data = sample(&mut Rng::from_seed(13), &model, 24 * 24).unwrap();
        let img = Image::new(24, 24, data).unwrap();
        let spec = FilterSpec::new(FilterMethod::Lee, 5, looks(1.0)).unwrap();
        let out = apply_filter(&img, &spec).unwrap();
        let engine = WindowEngine::new(&img, 5);
        for y in 0..24 {
            for x in 0..24 {
                // Convexity: the output lies between the window mean and the
                // center value, hence inside [min, max] of the window.
                let stats = engine.stats(x, y);
                let z = img.get(x, y);
                let v = out.get(x, y);
                let lo = stats.mean.min(z) - 1e-9;
                let hi = stats.mean.max(z) + 1e-9;
                assert!(v >= lo && v <= hi, "pixel ({x},{y}): {v} outside [{lo},{hi}]");
            }
        }
    }

    #[test]
    fn output_is_independent_of_evaluation_order() {
        use rayon::prelude::*;

        let model = ReturnModel::g0(-2.0, 50.0, looks(1.0)).unwrap();
        let data = sample(&mut Rng::from_seed(21), &model, 20 * 16).unwrap();
        let img = Image::new(20, 16, data).unwrap();
        let spec = FilterSpec::new(FilterMethod::MapG0, 5, looks(1.0)).unwrap();
        let forward = apply_filter(&img, &spec).unwrap();

        let engine = WindowEngine::new(&img, 5);
        let mut reversed = vec![0.0; 20 * 16];
        for y in (0..16).rev() {
            for x in (0..20).rev() {
                reversed[y * 20 + x] = filter_pixel(&spec, &engine.stats(x, y), img.get(x, y));
            }
        }
        assert_eq!(forward.pixels(), reversed.as_slice());

        // Parallel per-row evaluation over the same engine.
        let parallel: Vec<f64> = (0..16usize)
            .into_par_iter()
            .flat_map_iter(|y| {
                let engine = &engine;
                let img = &img;
                let spec = &spec;
                (0..20usize).map(move |x| filter_pixel(spec, &engine.stats(x, y), img.get(x, y)))
            })
            .collect();
        assert_eq!(forward.pixels(), parallel.as_slice());
    }

    #[test]
    fn window_larger_than_image_is_rejected() {
        let img = Image::filled(5, 5, 1.0).unwrap();
        let spec = FilterSpec::new(FilterMethod::Lee, 7, looks(1.0)).unwrap();
        assert!(apply_filter(&img, &spec).is_err());
    }

    #[test]
    fn even_or_tiny_windows_are_rejected() {
        assert!(FilterSpec::new(FilterMethod::Lee, 4, looks(1.0)).is_err());
        assert!(FilterSpec::new(FilterMethod::Lee, 1, looks(1.0)).is_err());
    }

    #[test]
    fn identity_fallback_returns_center_pixel() {
        let img = Image::filled(9, 9, 42.0).unwrap();
        let spec = FilterSpec::new(FilterMethod::MapG0, 3, looks(1.0))
            .unwrap()
            .with_fallback(FitFallback::Identity);
        let out = apply_filter(&img, &spec).unwrap();
        assert_eq!(out, img);
    }
}
