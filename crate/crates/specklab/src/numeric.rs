//! Scalar numerics shared across the crate: log-gamma, adaptive quadrature,
//! derivative-free root finding and 1-D maximization.

use crate::error::{Error, Result};

use std::f64::consts::PI;

// Lanczos approximation, g = 7, 9 terms. Good to ~1e-14 relative over the
// positive axis, which is all this crate ever evaluates.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma requires a positive argument");
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        PI.ln() - (PI * x).sin().ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Gamma function for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

const SIMPSON_MAX_DEPTH: u32 = 52;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth >= SIMPSON_MAX_DEPTH || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
            + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 0)
}

/// Integrates `f` over `(0, ∞)` through the substitution `z = scale·t/(1−t)`.
///
/// `scale` should sit near the bulk of the integrand's mass (a mean or mode)
/// so the transformed integrand is well resolved on the unit interval. The
/// endpoints are clipped by 1e-12 to avoid evaluating exactly at the open
/// boundary; the clipped slivers are negligible for integrands that are
/// bounded after the substitution.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, scale: f64, tol: f64) -> f64 {
    debug_assert!(scale > 0.0);
    let g = |t: f64| {
        let u = 1.0 - t;
        f(scale * t / u) * scale / (u * u)
    };
    integrate(g, 1e-12, 1.0 - 1e-12, tol)
}

/// Stopping rule shared by the bracketing searches: relative 1e-10 on the
/// bracketing interval, at most 200 iterations.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { rel_tol: 1e-10, max_iter: 200 }
    }
}

impl SearchConfig {
    fn interval_tol(&self, a: f64, b: f64) -> f64 {
        self.rel_tol * a.abs().max(b.abs()).max(1.0)
    }
}

/// Brent root finder on a sign-changing bracket `[a, b]`.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: SearchConfig) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "no sign change over [{a}, {b}] (f = {fa}, {fb})"
        )));
    }

    let (mut a, mut fa, mut b, mut fb) = (a, fa, b, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..cfg.max_iter {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 0.5 * cfg.interval_tol(b, c);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, falling back to secant.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * xm.signum() };
        fb = f(b);
        if fb.signum() * fc.signum() > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Ok(b)
}

/// Plain bisection on a sign-changing bracket; used where monotone robustness
/// matters more than iteration count.
pub fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: SearchConfig) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "no sign change over [{a}, {b}] (f = {fa}, {fb})"
        )));
    }
    let (mut lo, mut hi) = (a, b);
    for _ in 0..cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= cfg.interval_tol(lo, hi) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            lo = mid;
            fa = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` inside the bracket `a < b < c` with
/// `f(b) ≥ f(a)` and `f(b) ≥ f(c)`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, c: f64, rel_tol: f64) -> f64 {
    let (mut lo, mut hi) = (a, c);
    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    // Seed from b so a sharp interior maximum is not lost on the first split.
    if b < x1 {
        x2 = x1;
        x1 = b;
    } else if b > x2 {
        x1 = x2;
        x2 = b;
    }
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > rel_tol * (lo.abs() + hi.abs()).max(1e-300) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Scans a log-spaced grid over `[lo, hi]` and returns a bracketing triple
/// around the best grid point, for use with [`golden_max`].
pub fn bracket_max_log_grid<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<(f64, f64, f64)> {
    debug_assert!(lo > 0.0 && hi > lo && n >= 3);
    let ratio = (hi / lo).ln();
    let grid: Vec<f64> = (0..n)
        .map(|i| lo * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let (best, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    if best == 0 || best == n - 1 {
        return Err(Error::Bracket(format!(
            "no interior maximum over [{lo}, {hi}]"
        )));
    }
    Ok((grid[best - 1], grid[best], grid[best + 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 40-digit arithmetic.
    #[test]
    #[allow(clippy::excessive_precision)]
    fn ln_gamma_reference_values() {
        let cases: [(f64, f64); 11] = [
            (0.1, 2.2527126517342059),
            (0.5, 0.57236494292470009),
            (1.0, 0.0),
            (1.5, -0.12078223763524522),
            (2.0, 0.0),
            (4.5, 2.4537365708424422),
            (10.0, 12.80182748008147),
            (50.5, 146.51925549072063),
            (170.0, 701.43726380873709),
            (0.001, 6.9071788853838537),
            (1000.0, 5905.2204232091812),
        ];
        for (x, want) in cases {
            let got = ln_gamma(x);
            let scale = want.abs().max(1.0);
            assert!(
                (got - want).abs() <= 1e-13 * scale,
                "ln_gamma({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn integrate_polynomial_exactly() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12);
        assert!((v - 9.0).abs() < 1e-10);
    }

    #[test]
    fn integrate_half_line_gaussian_tail() {
        // ∫0^∞ e^{-x} dx = 1
        let v = integrate_half_line(|x| (-x).exp(), 1.0, 1e-10);
        assert!((v - 1.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn integrate_half_line_heavy_tail() {
        // ∫0^∞ 2/(1+x)^3 dx = 1, a tail comparable to the heaviest return law.
        let v = integrate_half_line(|x| 2.0 / (1.0 + x).powi(3), 1.0, 1e-10);
        assert!((v - 1.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn brent_and_bisect_agree() {
        let f = |x: f64| x.cos() - x;
        let cfg = SearchConfig::default();
        let a = brent_root(f, 0.0, 1.0, cfg).unwrap();
        let b = bisect(f, 0.0, 1.0, cfg).unwrap();
        assert!((a - 0.7390851332151607).abs() < 1e-9);
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn root_search_rejects_unbracketed() {
        let err = brent_root(|x| x * x + 1.0, -1.0, 1.0, SearchConfig::default());
        assert!(err.is_err());
    }

    #[test]
    fn golden_max_finds_quadratic_peak() {
        let f = |x: f64| -(x - 2.5) * (x - 2.5);
        let (a, b, c) = bracket_max_log_grid(f, 0.1, 100.0, 64).unwrap();
        let x = golden_max(f, a, b, c, 1e-12);
        assert!((x - 2.5).abs() < 1e-8, "got {x}");
    }

    #[test]
    fn bracket_max_rejects_boundary_maximum() {
        assert!(bracket_max_log_grid(|x| x, 0.1, 10.0, 32).is_err());
    }
}
