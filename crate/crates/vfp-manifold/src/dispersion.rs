//! Dispersion relation `Λ(γ, λ)` of the linearized mode-`k` operator, its
//! `λ`-derivative, the `γ → 0` limit, root finding and the inverse map
//! `λ ↦ c`.
//!
//! For mode `k` with `y = |k|/γ`:
//!
//! ```text
//! Λ_k(γ, λ) = 1 - c/(2π γ²) · J_1(|k|/γ, -λ/γ)
//! ```
//!
//! and at `γ = 0` the integral `y² J_1(y, -λy/|k|)` is replaced by its limit
//! `∫_0^∞ s exp(-s²/2 - λ s/|k|) ds`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_log, peak_breakpoints};
use crate::special_functions::{eval_jn, log_jn_mu_derivative};

/// Relative tolerance used for the `J_n` evaluations inside this module.
/// Tighter than the special-function default so that root residuals of
/// `1e-12` are meaningful.
pub const DISPERSION_TOL: f64 = 1e-13;

/// Largest root residual accepted by [`find_root`].
pub const ROOT_RESIDUAL: f64 = 1e-12;

/// Coupling, friction rate and Fourier mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Attractive coupling, `c >= 0` (`c = 0` is accepted as a degenerate case).
    pub c: f64,
    /// Friction/diffusion rate, `gamma >= 0`.
    pub gamma: f64,
    /// Nonzero Fourier mode.
    pub k: i32,
}

impl ModelParams {
    pub fn new(c: f64, gamma: f64) -> Self {
        ModelParams { c, gamma, k: 1 }
    }

    pub fn with_mode(self, k: i32) -> Self {
        ModelParams { k, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c >= 0.0) || !self.c.is_finite() {
            return Err(Error::Domain(format!("coupling must satisfy c >= 0, got {}", self.c)));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must satisfy gamma >= 0, got {}", self.gamma)));
        }
        if self.k == 0 {
            return Err(Error::Domain("the dispersion relation is defined for k != 0".into()));
        }
        Ok(())
    }

    fn kf(&self) -> f64 {
        (self.k as f64).abs()
    }
}

/// A real root of the dispersion relation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionRoot {
    pub lambda: f64,
    /// `|Λ(γ, λ)|` at the returned root.
    pub residual: f64,
    /// `∂λΛ` at the root.
    #[serde(rename = "dLambda")]
    pub d_lambda: f64,
    pub bracket: (f64, f64),
}

/// `ln ∫_0^∞ s^p exp(-s²/2 - a s) ds` for `p >= 1`.
fn log_gaussian_moment(p: f64, a: f64) -> Result<f64> {
    let phi = move |s: f64| {
        if s <= 0.0 {
            f64::NEG_INFINITY
        } else {
            p * s.ln() - 0.5 * s * s - a * s
        }
    };
    let s_star = 0.5 * (-a + (a * a + 4.0 * p).sqrt());
    let sigma = 1.0 / (p / (s_star * s_star) + 1.0).sqrt();
    let top = phi(s_star);
    let mut upper = s_star + 1.0;
    while phi(upper) > top - 90.0 {
        upper = s_star + 2.0 * (upper - s_star);
    }
    let pts = peak_breakpoints(s_star, sigma, 0.0, upper);
    Ok(integrate_log(phi, &pts, top, DISPERSION_TOL)?.log_value)
}

/// `γ = 0` dispersion value `1 - c/(2π) ∫_0^∞ s exp(-s²/2 - λ s) ds` (mode 1).
pub fn eval_dispersion_vlasov(c: f64, lambda: f64) -> Result<f64> {
    eval_dispersion_vlasov_mode(c, lambda, 1)
}

fn eval_dispersion_vlasov_mode(c: f64, lambda: f64, k: i32) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be finite, got {lambda}")));
    }
    if c == 0.0 {
        return Ok(1.0);
    }
    let kf = (k as f64).abs();
    let moment = log_gaussian_moment(1.0, lambda / kf)?.exp();
    Ok(1.0 - c / (2.0 * PI * kf * kf) * moment)
}

fn check_domain(params: &ModelParams, lambda: f64) -> Result<(f64, f64)> {
    params.validate()?;
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be finite, got {lambda}")));
    }
    let y = params.kf() / params.gamma;
    let mu = -lambda / params.gamma;
    if !(y * y - mu > 0.0) {
        return Err(Error::Domain(format!(
            "need k²/γ² + λ/γ > 0; got γ = {}, λ = {lambda}, k = {}",
            params.gamma, params.k
        )));
    }
    Ok((y, mu))
}

/// `Λ_k(γ, λ) = 1 - c/(2πγ²) J_1(|k|/γ, -λ/γ)`; `γ = 0` uses the Vlasov limit.
pub fn eval_dispersion(params: &ModelParams, lambda: f64) -> Result<f64> {
    params.validate()?;
    if params.gamma == 0.0 {
        return eval_dispersion_vlasov_mode(params.c, lambda, params.k);
    }
    let (y, mu) = check_domain(params, lambda)?;
    if params.c == 0.0 {
        return Ok(1.0);
    }
    let j1 = eval_jn(1, y, mu, DISPERSION_TOL)?;
    let g = params.gamma;
    Ok(1.0 - params.c / (2.0 * PI * g * g) * j1.value())
}

/// Largest number of terms tried in the `J_n/n` series before switching to
/// direct quadrature of the `λ`-derivative.
const SERIES_MAX_TERMS: usize = 400;

/// `∂λΛ`, from the series `(yc/2π)(J_0 - λy Σ_{n≥1} J_n/n)` (mode 1, `y = 1/γ`)
/// with a geometric tail certificate, falling back to direct quadrature of
/// `∂λ J_1` when the terms decay too slowly to certify the tail.
pub fn d_lambda_dispersion(params: &ModelParams, lambda: f64) -> Result<f64> {
    params.validate()?;
    let kf = params.kf();
    if params.c == 0.0 {
        return Ok(0.0);
    }
    if params.gamma == 0.0 {
        let moment = log_gaussian_moment(2.0, lambda / kf)?.exp();
        return Ok(params.c / (2.0 * PI * kf * kf * kf) * moment);
    }
    let (y, mu) = check_domain(params, lambda)?;
    let ell = lambda / kf;
    let prefactor = params.c * y / (2.0 * PI * kf * kf * kf);
    match d_lambda_series(y, mu, ell) {
        Some(bracket) => Ok(prefactor * bracket),
        None => d_lambda_direct(params, lambda),
    }
}

/// `J_0 - ℓ y Σ J_n/n` with a certified tail, or `None` when the terms do
/// not decay geometrically fast enough.
fn d_lambda_series(y: f64, mu: f64, ell: f64) -> Option<f64> {
    let j0 = eval_jn(0, y, mu, DISPERSION_TOL).ok()?.value();
    if ell == 0.0 {
        return Some(j0);
    }
    let target = 1e-3 * DISPERSION_TOL;
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    for n in 1..=SERIES_MAX_TERMS {
        let jn = eval_jn(n, y, mu, DISPERSION_TOL).ok()?.value();
        let term = jn / n as f64;
        sum += term;
        if let Some(p) = prev {
            let ratio = term / p;
            if ratio < 0.5 && term <= target * sum {
                // Terms are decreasing with ratio ≤ r, so the tail is below term·r/(1-r).
                let tail = term * ratio / (1.0 - ratio);
                if tail <= target * sum {
                    return Some(j0 - ell * y * (sum + tail));
                }
            }
        }
        if term == 0.0 {
            return Some(j0 - ell * y * sum);
        }
        prev = Some(term);
    }
    None
}

/// `∂λΛ = (c/(2π k²)) y³ /|k| · ∂μJ_1(y, μ)` evaluated by direct quadrature.
fn d_lambda_direct(params: &ModelParams, lambda: f64) -> Result<f64> {
    let (y, mu) = check_domain(params, lambda)?;
    let kf = params.kf();
    let log_m = log_jn_mu_derivative(1, y, mu, DISPERSION_TOL)?;
    let log_pref = (params.c / (2.0 * PI * kf * kf * kf)).ln() + 3.0 * y.ln();
    Ok((log_pref + log_m).exp())
}

/// `∂λΛ` by direct quadrature only (used to cross-check the series path).
pub fn d_lambda_dispersion_direct(params: &ModelParams, lambda: f64) -> Result<f64> {
    params.validate()?;
    if params.c == 0.0 {
        return Ok(0.0);
    }
    if params.gamma == 0.0 {
        return d_lambda_dispersion(params, lambda);
    }
    d_lambda_direct(params, lambda)
}

/// Brent's method on `f` over a bracket with `f(a) f(b) < 0`, stopping when
/// `|f| <= ftol` or the bracket has collapsed to rounding level.
fn brent<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64, fa: f64, fb: f64, ftol: f64) -> Result<(f64, f64)> {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let xm = 0.5 * (c - b);
        if fb.abs() <= ftol || xm.abs() <= tol1 {
            return Ok((b, fb));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
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
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Ok((b, fb))
}

/// Bracketed real root of `Λ(γ, ·)` with `|Λ| <= 1e-12`.
///
/// A sign change on which `Λ` decreases is reported as
/// [`Error::ComplexBranch`]: on the physical branch `Λ` increases with `λ`,
/// so such a crossing does not belong to the real unstable eigenvalue.
pub fn find_root(params: &ModelParams, bracket: (f64, f64)) -> Result<DispersionRoot> {
    let (lo, hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    let f = |l: f64| eval_dispersion(params, l);
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 || f_hi == 0.0 {
        let lambda = if f_lo == 0.0 { lo } else { hi };
        return finish_root(params, lambda, 0.0, (lo, hi));
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let (lambda, f_root) = brent(f, lo, hi, f_lo, f_hi, ROOT_RESIDUAL)?;
    if f_root.abs() > ROOT_RESIDUAL {
        return Err(Error::Precision(format!(
            "root bracket collapsed at lambda = {lambda} with residual {:e}",
            f_root.abs()
        )));
    }
    if f_lo > 0.0 {
        return Err(Error::ComplexBranch(format!(
            "Λ decreases through zero at λ = {lambda}; the real root is not on the physical branch"
        )));
    }
    finish_root(params, lambda, f_root.abs(), (lo, hi))
}

fn finish_root(params: &ModelParams, lambda: f64, residual: f64, bracket: (f64, f64)) -> Result<DispersionRoot> {
    let d_lambda = d_lambda_dispersion(params, lambda)?;
    if !(d_lambda > 0.0) {
        return Err(Error::ComplexBranch(format!(
            "∂λΛ = {d_lambda:e} <= 0 at λ = {lambda}; the root is not on the physical branch"
        )));
    }
    Ok(DispersionRoot {
        lambda,
        residual,
        d_lambda,
        bracket,
    })
}

/// The coupling that makes `λ` an exact root for mode 1: `c = 2πγ²/J_1(1/γ, -λ/γ)`.
pub fn c_for_growth_rate(gamma: f64, lambda: f64) -> Result<f64> {
    c_for_growth_rate_mode(gamma, lambda, 1)
}

/// Mode-`k` version of [`c_for_growth_rate`]: `c = 2πγ²/J_1(|k|/γ, -λ/γ)`.
pub fn c_for_growth_rate_mode(gamma: f64, lambda: f64, k: i32) -> Result<f64> {
    let probe = ModelParams { c: 1.0, gamma, k };
    probe.validate()?;
    if gamma == 0.0 {
        let kf = (k as f64).abs();
        let moment = log_gaussian_moment(1.0, lambda / kf)?.exp();
        return Ok(2.0 * PI * kf * kf / moment);
    }
    let (y, mu) = check_domain(&probe, lambda)?;
    let j1 = eval_jn(1, y, mu, DISPERSION_TOL)?;
    Ok(2.0 * PI * (2.0 * gamma.ln() - j1.log_value).exp())
}

/// Instability threshold `c*` of mode `k` at friction `γ` (the coupling at which `λ = 0` is a root).
pub fn instability_threshold(gamma: f64, k: i32) -> Result<f64> {
    c_for_growth_rate_mode(gamma, 0.0, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let f = |x: f64| Ok(x * x * x - 2.0);
        let (r, fr) = brent(f, 0.0, 2.0, -2.0, 6.0, 1e-14).unwrap();
        assert!(fr.abs() <= 1e-14);
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn gaussian_moments() {
        // ∫ s e^{-s²/2} = 1 and ∫ s² e^{-s²/2} = sqrt(pi/2)
        assert!(log_gaussian_moment(1.0, 0.0).unwrap().abs() < 1e-14);
        let m2 = log_gaussian_moment(2.0, 0.0).unwrap().exp();
        assert!((m2 - (PI / 2.0).sqrt()).abs() < 1e-14);
    }
}
