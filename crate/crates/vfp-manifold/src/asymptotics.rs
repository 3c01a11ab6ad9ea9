//! Dirichlet series `φ±_α(λ) = Σ_{n>=1} (±1)^n n^α e^{-λ√n}`, their small-`λ`
//! predictions, log-log power-law fits and the `(γ, λ)` regime map.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};
use std::fmt;

use crate::error::{Error, Result};

/// Number of leading terms summed explicitly before the tail correction.
const DIRECT_TERMS: u64 = 20_000;

/// Explicit-summation budget beyond which the caller must use [`mellin_prediction`].
pub const MAX_TERMS: f64 = 1e9;

/// Sign pattern of the Dirichlet series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesSign {
    Plus,
    Minus,
}

fn summand(alpha: f64, lam: f64, n: f64) -> f64 {
    (alpha * n.ln() - lam * n.sqrt()).exp()
}

/// `d/dx [x^α e^{-λ√x}]`.
fn summand_derivative(alpha: f64, lam: f64, x: f64) -> f64 {
    summand(alpha, lam, x) * (alpha / x - lam / (2.0 * x.sqrt()))
}

/// `∫_a^∞ x^α e^{-λ√x} dx = 2 λ^{-(2α+2)} Γ(2α+2, λ√a)`.
fn tail_integral(alpha: f64, lam: f64, a: f64) -> f64 {
    let s = 2.0 * alpha + 2.0;
    2.0 * lam.powf(-s) * gamma(s) * gamma_ur(s, lam * a.sqrt())
}

fn check_args(alpha: f64, lam: f64) -> Result<()> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must exceed -1, got {alpha}")));
    }
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive, got {lam}")));
    }
    Ok(())
}

/// `φ±_α(λ)` by explicit summation of the first terms plus a tail.
///
/// For `plus`, the tail `Σ_{n>=M} f(n)` is the midpoint Euler-Maclaurin value
/// `∫_{M-1/2}^∞ f - f'(M-1/2)/24`. For `minus`, terms are summed in pairs
/// `(n, n+1)` and the alternating tail is `(-1)^M (f(M)/2 - f'(M)/4)`.
/// Both corrections are below `1e-12` relative once `M` is past the
/// scale on which `f` varies.
pub fn dirichlet_phi(alpha: f64, sign: SeriesSign, lam: f64) -> Result<f64> {
    check_args(alpha, lam)?;
    // Past the peak of x^α e^{-λ√x} (at (2α/λ)²) the summand is monotone and smooth.
    let peak = if alpha > 0.0 { (2.0 * alpha / lam).powi(2) } else { 0.0 };
    if peak > MAX_TERMS {
        return Err(Error::Precision(format!(
            "dirichlet series at lambda = {lam} needs more than {MAX_TERMS:e} explicit terms; use the Mellin prediction"
        )));
    }
    let m = DIRECT_TERMS.max(2 * (peak as u64 / 2) + 2);
    let value = match sign {
        SeriesSign::Plus => {
            let head: f64 = (1..m).map(|n| summand(alpha, lam, n as f64)).sum();
            let a = m as f64 - 0.5;
            head + tail_integral(alpha, lam, a) - summand_derivative(alpha, lam, a) / 24.0
        }
        SeriesSign::Minus => {
            // m is even: n = 1 alone, then pairs (2,3), (4,5), ..., (m-2, m-1).
            let mut head = -summand(alpha, lam, 1.0);
            let mut n = 2u64;
            while n + 1 < m {
                head += summand(alpha, lam, n as f64) - summand(alpha, lam, (n + 1) as f64);
                n += 2;
            }
            let mf = m as f64;
            head + summand(alpha, lam, mf) / 2.0 - summand_derivative(alpha, lam, mf) / 4.0
        }
    };
    if !value.is_finite() {
        return Err(Error::Precision(format!("dirichlet series overflows at lambda = {lam}")));
    }
    Ok(value)
}

/// `Σ_{n>=1, n odd} n^α e^{-λ√n} = (φ+ - φ-)/2`.
pub fn dirichlet_phi_odd(alpha: f64, lam: f64) -> Result<f64> {
    Ok(0.5 * (dirichlet_phi(alpha, SeriesSign::Plus, lam)? - dirichlet_phi(alpha, SeriesSign::Minus, lam)?))
}

/// Leading small-`λ` behaviour of the two series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MellinPrediction {
    /// `φ+_α(λ) ~ plus_coefficient · λ^{-plus_exponent}`.
    pub plus_exponent: f64,
    pub plus_coefficient: f64,
    /// `φ-_α` has a finite limit as `λ → 0+`: its growth exponent is 0.
    pub minus_exponent: f64,
    pub minus_bounded: bool,
}

/// Exponent `2(α+1)` and coefficient `2Γ(2(α+1))` of the leading pole.
pub fn mellin_prediction(alpha: f64) -> Result<MellinPrediction> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("alpha must exceed -1, got {alpha}")));
    }
    let s = 2.0 * (alpha + 1.0);
    Ok(MellinPrediction {
        plus_exponent: s,
        plus_coefficient: 2.0 * gamma(s),
        minus_exponent: 0.0,
        minus_bounded: true,
    })
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub log_prefactor: f64,
    pub r_squared: f64,
    pub sample_range: (f64, f64),
    pub n_samples: usize,
}

impl PowerLawFit {
    /// Fits with `r² < 0.99` are not trusted.
    pub fn is_reliable(&self) -> bool {
        self.r_squared >= 0.99
    }
}

/// Least-squares slope of `ln y` against `ln x` from two or more points.
pub fn log_log_slope(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    if samples.len() < 2 {
        return Err(Error::DegenerateInput(format!("need at least two samples, got {}", samples.len())));
    }
    if let Some((x, y)) = samples.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::DegenerateInput(format!("power-law samples must be positive, got ({x}, {y})")));
    }
    let n = samples.len() as f64;
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("power-law samples share one abscissa".into()));
    }
    let exponent = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    let xmin = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let xmax = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(PowerLawFit {
        exponent,
        log_prefactor: my - exponent * mx,
        r_squared,
        sample_range: (xmin, xmax),
        n_samples: samples.len(),
    })
}

/// [`log_log_slope`] with the four-sample minimum required for a reported fit.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    if samples.len() < 4 {
        return Err(Error::DegenerateInput(format!(
            "a power-law fit needs at least four samples, got {}",
            samples.len()
        )));
    }
    log_log_slope(samples)
}

/// Dynamical regime of `(γ, λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `γ ≪ λ³`.
    I,
    /// `λ³ ≪ γ ≪ λ^{3/4}`.
    II,
    /// `λ^{3/4} ≪ γ`.
    III,
    #[serde(rename = "boundary")]
    Boundary,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::I => "I",
            Regime::II => "II",
            Regime::III => "III",
            Regime::Boundary => "boundary",
        };
        f.write_str(s)
    }
}

/// Regime label with its defining ratios and the Hermite cut-offs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub regime: Regime,
    /// `γ/λ³`.
    pub ratio_cubic: f64,
    /// `γ/λ^{3/4}`.
    pub ratio_three_quarter: f64,
    /// `N1 = λ/γ`.
    pub n1: f64,
    /// `N2 = 1/λ²`.
    pub n2: f64,
    /// `N3 = γ^{-2/3}`.
    pub n3: f64,
    /// `N4 = γ^{-2}`.
    pub n4: f64,
}

/// Regime from the two ratios with factor-10 separations:
/// I iff `γ/λ³ <= 0.1`, III iff `γ/λ^{3/4} >= 10`,
/// II iff `γ/λ³ >= 10` and `γ/λ^{3/4} <= 0.1`, boundary otherwise.
pub fn classify_regime(gamma: f64, lam: f64) -> RegimeLabel {
    let ratio_cubic = gamma / lam.powi(3);
    let ratio_three_quarter = gamma / lam.powf(0.75);
    let regime = if ratio_cubic <= 0.1 {
        Regime::I
    } else if ratio_three_quarter >= 10.0 {
        Regime::III
    } else if ratio_cubic >= 10.0 && ratio_three_quarter <= 0.1 {
        Regime::II
    } else {
        Regime::Boundary
    };
    RegimeLabel {
        regime,
        ratio_cubic,
        ratio_three_quarter,
        n1: lam / gamma,
        n2: lam.powi(-2),
        n3: gamma.powf(-2.0 / 3.0),
        n4: gamma.powi(-2),
    }
}
