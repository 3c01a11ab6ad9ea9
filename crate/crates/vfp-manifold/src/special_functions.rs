//! The integrals `J_n(y, mu)`, the scaled sequence `a_n`, and the resolvent
//! coefficients `psi_alpha^beta` of the shifted harmonic oscillator.
//!
//! With `x = 1 - t` the defining integral reads
//!
//! ```text
//! J_n(y, mu) = ∫_0^1 (1-x)^(s-1) exp(x y²) x^n dx,    s = y² - mu,
//! ```
//!
//! and is evaluated through its exponent
//! `y²·(ln(1-x) + x) + (-mu-1)·ln(1-x) + n·ln(x)`. The combination
//! `ln(1-x) + x` is computed without cancellation, which is what keeps the
//! evaluation accurate for `y ~ 10^8`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_log, peak_breakpoints, LogIntegral};

/// Default relative tolerance of the special-function evaluations.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A value of `J_n(y, mu)` carried as a logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JnEvaluation {
    pub n: usize,
    pub y: f64,
    pub mu: f64,
    /// `ln J_n(y, mu)`.
    pub log_value: f64,
    /// Estimated relative error of `J_n`.
    pub quadrature_error: f64,
}

impl JnEvaluation {
    /// `J_n(y, mu)` itself; underflows to zero or overflows to infinity when
    /// the logarithm is out of the double range.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// A resolvent coefficient `psi_alpha^beta(xi, lam)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiCoefficient {
    pub alpha: usize,
    pub beta: usize,
    pub xi: f64,
    pub lam: f64,
    pub value: Complex64,
}

/// `ln(1 + x) - x` for `x > -1`, accurate for small `|x|`.
pub fn log1pmx(x: f64) -> f64 {
    if x.abs() > 0.5 {
        return x.ln_1p() - x;
    }
    let u = x / (2.0 + x);
    let u2 = u * u;
    let mut term = u * u2;
    let mut sum = 0.0;
    let mut k = 3.0;
    loop {
        let add = term / k;
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
        term *= u2;
        k += 2.0;
    }
    -x * x / (2.0 + x) + 2.0 * sum
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Moment selector for the internal integrator: plain `J_n`, or the same
/// integral weighted by `-ln(1-x)` (the `mu`-derivative of `J_n`).
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weight {
    One,
    MinusLog,
}

/// `ln ∫_0^1 w(x) (1-x)^(s-1) exp(x y²) x^n dx` for the selected weight.
pub(crate) fn log_jn_moment(n: usize, y: f64, mu: f64, tol: f64, weight: Weight) -> Result<LogIntegral> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("J_n requires y > 0, got y = {y}")));
    }
    if !mu.is_finite() {
        return Err(Error::Domain(format!("J_n requires a finite mu, got {mu}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let y2 = y * y;
    let s = y2 - mu;
    if !(s > 0.0) {
        return Err(Error::Domain(format!(
            "J_n(y, mu) diverges at t = 0: y^2 - mu = {s} <= 0 (y = {y}, mu = {mu})"
        )));
    }
    let nf = n as f64;
    if s < 2.0 {
        // Substitute w = t^s so that the t^(s-1) end point singularity is
        // absorbed: J = (1/s) ∫_0^1 exp(y²(1-t)) (1-t)^n dw with t = w^(1/s).
        let inv_s = 1.0 / s;
        let phi = move |w: f64| {
            if w <= 0.0 {
                return if weight == Weight::One { y2 } else { f64::INFINITY };
            }
            let t = w.powf(inv_s);
            if t >= 1.0 {
                return f64::NEG_INFINITY;
            }
            let mut v = y2 * (1.0 - t);
            if n > 0 {
                v += nf * (-t).ln_1p();
            }
            if weight == Weight::MinusLog {
                v += (-w.ln() * inv_s).ln();
            }
            v
        };
        let mut pts = vec![0.0, 1.0];
        let scale = 1.0 / (nf + y2 + 1.0);
        let mut t = scale;
        while t < 1.0 {
            pts.push(t.powf(s));
            t *= 2.0;
        }
        if weight == Weight::MinusLog {
            let mut w = 0.5;
            for _ in 0..60 {
                pts.push(w);
                w *= 0.5;
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let r = integrate_log(phi, &pts, y2, tol)?;
        return Ok(LogIntegral {
            log_value: r.log_value - s.ln(),
            ..r
        });
    }

    let c_log = -mu - 1.0;
    let phi = move |x: f64| {
        if x >= 1.0 {
            return f64::NEG_INFINITY;
        }
        let mut v = y2 * log1pmx(-x) + c_log * (-x).ln_1p();
        if n > 0 {
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            v += nf * x.ln();
        }
        if weight == Weight::MinusLog {
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            v += (-(-x).ln_1p()).ln();
        }
        v
    };
    // Stationary point of the exponent: y² x² + (n - mu - 1) x - n = 0.
    let n_eff = if weight == Weight::MinusLog { nf + 1.0 } else { nf };
    let b = n_eff - mu - 1.0;
    let disc = (b * b + 4.0 * y2 * n_eff).sqrt();
    let mut x_star = if n_eff == 0.0 {
        (-b / y2).max(0.0)
    } else if b > 0.0 {
        2.0 * n_eff / (b + disc)
    } else {
        (-b + disc) / (2.0 * y2)
    };
    x_star = x_star.clamp(0.0, 1.0 - 1e-16);
    let one_minus = 1.0 - x_star;
    let mut curvature = (s - 1.0) / (one_minus * one_minus);
    if x_star > 0.0 {
        curvature += n_eff / (x_star * x_star);
    }
    let slope = if x_star == 0.0 { (mu + 1.0).abs() } else { 0.0 };
    let sigma = (1.0 / curvature.sqrt().max(slope).max(1e-300)).min(1.0);
    let pts = peak_breakpoints(x_star, sigma, 0.0, 1.0);
    let shift = {
        let v = phi(x_star);
        if v.is_finite() {
            v
        } else {
            phi(x_star + 0.5 * sigma)
        }
    };
    integrate_log(phi, &pts, shift, tol)
}

/// `J_n(y, mu) = ∫_0^1 t^(y²-mu) e^((1-t) y²) (1-t)^n dt/t`, as a logarithm.
pub fn eval_jn(n: usize, y: f64, mu: f64, tol: f64) -> Result<JnEvaluation> {
    let r = log_jn_moment(n, y, mu, tol, Weight::One)?;
    Ok(JnEvaluation {
        n,
        y,
        mu,
        log_value: r.log_value,
        quadrature_error: r.rel_error,
    })
}

/// `ln ∂J_n/∂mu (y, mu)`; the derivative is `∫ (-ln t) t^(y²-mu) e^((1-t)y²) (1-t)^n dt/t > 0`.
pub fn log_jn_mu_derivative(n: usize, y: f64, mu: f64, tol: f64) -> Result<f64> {
    Ok(log_jn_moment(n, y, mu, tol, Weight::MinusLog)?.log_value)
}

/// `ln a_n(y, lam)` with `a_n = y^(n+1) J_n(y, -lam y)`.
pub fn log_an(n: usize, y: f64, lam: f64) -> Result<f64> {
    let j = eval_jn(n, y, -lam * y, DEFAULT_TOL)?;
    Ok((n as f64 + 1.0) * y.ln() + j.log_value)
}

/// `i^m`.
pub(crate) fn i_pow(m: i64) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Coefficient of `z^alpha` in the Bargman-space image of `(B(i xi) - lam)^(-1) z^beta`,
/// where `B(i xi) = H - (i xi/√2)(a + a†)`.
///
/// Expands the finite sum over `beta1 + beta2 = beta` and `k` of
/// `J_{k+beta1}(|xi|/√2, lam) · beta!/(k! beta1! beta2!) · (i z xi/√2)^k (-z + i xi/√2)^beta1 z^beta2`,
/// keeping every term as a log-magnitude with a unit phase.
pub fn eval_psi(alpha: usize, beta: usize, xi: f64, lam: f64, tol: f64) -> Result<PsiCoefficient> {
    if xi == 0.0 || !xi.is_finite() {
        return Err(Error::Domain(format!("eval_psi requires a finite nonzero xi, got {xi}")));
    }
    let y = xi.abs() / std::f64::consts::SQRT_2;
    let ln_q = y.ln();
    let xi_sign = xi.signum();
    let j_tol = tol.min(1e-12);

    let mut terms: Vec<(f64, Complex64, f64)> = Vec::new();
    let mut j_cache: Vec<Option<JnEvaluation>> = vec![None; alpha + beta + 1];
    for beta1 in 0..=beta {
        let beta2 = beta - beta1;
        for j in 0..=beta1 {
            let Some(k) = alpha.checked_sub(j + beta2) else {
                continue;
            };
            let order = k + beta1;
            let jn = match j_cache[order] {
                Some(v) => v,
                None => {
                    let v = eval_jn(order, y, lam, j_tol)?;
                    j_cache[order] = Some(v);
                    v
                }
            };
            let m = k + beta1 - j;
            let ln_mag = ln_factorial(beta) - ln_factorial(k) - ln_factorial(beta1) - ln_factorial(beta2)
                + ln_binomial(beta1, j)
                + m as f64 * ln_q
                + jn.log_value;
            let mut phase = i_pow(m as i64);
            if xi_sign < 0.0 && m % 2 == 1 {
                phase = -phase;
            }
            if j % 2 == 1 {
                phase = -phase;
            }
            terms.push((ln_mag, phase, jn.quadrature_error));
        }
    }
    if terms.is_empty() {
        return Ok(PsiCoefficient {
            alpha,
            beta,
            xi,
            lam,
            value: Complex64::new(0.0, 0.0),
        });
    }
    let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut err_sum = 0.0;
    for (l, ph, e) in &terms {
        let w = (l - top).exp();
        sum += ph * w;
        abs_sum += w;
        err_sum += w * (e + f64::EPSILON);
    }
    let magnitude = sum.norm();
    if magnitude == 0.0 || err_sum > tol * magnitude {
        return Err(Error::Precision(format!(
            "psi_{alpha}^{beta}(xi = {xi}, lam = {lam}): cancellation leaves relative error {:e} \
             (largest term / result = {:e})",
            if magnitude == 0.0 { f64::INFINITY } else { err_sum / magnitude },
            abs_sum / magnitude
        )));
    }
    Ok(PsiCoefficient {
        alpha,
        beta,
        xi,
        lam,
        value: sum * top.exp(),
    })
}
