//! The linearized operator `L_k` in the `e_n` basis, the unstable
//! eigenvector `G`, the adjoint eigenvector `G̃` and their pairing.
//!
//! For `k != 0`
//!
//! ```text
//! L_k v = -γ H v - i k (a + a†) v + (i c/(2π k)) v_0 e_1,
//! ```
//!
//! and `L_0 = -γ H`. All solves use the scaled oscillator matrix
//! `T(γ, κ, σ) = γ H + i κ (a + a†) + σ`, which is complex symmetric
//! tridiagonal; `L_k - λ = -T(γ, k, λ) + rank one`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dispersion::{d_lambda_dispersion, eval_dispersion, ModelParams};
use crate::error::{Error, Result};
use crate::spectral::SpectralVector;
use crate::special_functions::{eval_jn, i_pow, ln_factorial, DEFAULT_TOL};
use crate::tridiag::Tridiagonal;

/// Largest `|Λ(γ, λ)|` for which `λ` is accepted as an eigenvalue.
pub const ROOT_TOLERANCE: f64 = 1e-10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `T(γ, κ, σ) = γ H + i κ (a + a†) + σ` truncated at order `n_max`.
pub fn oscillator_matrix(gamma: f64, kappa: f64, shift: f64, n_max: usize) -> Tridiagonal {
    let diag = (0..=n_max)
        .map(|n| Complex64::new(gamma * n as f64 + shift, 0.0))
        .collect();
    let off: Vec<Complex64> = (1..=n_max)
        .map(|n| Complex64::new(0.0, kappa * (n as f64).sqrt()))
        .collect();
    Tridiagonal {
        sub: off.clone(),
        diag,
        sup: off,
    }
}

/// `L_k v` for Fourier mode `k` (the mean-field rank-one term is absent for `k = 0`).
pub fn apply_l_k(params: &ModelParams, k: i32, v: &SpectralVector) -> SpectralVector {
    let gamma = params.gamma;
    let n_max = v.n_max();
    let mut out = SpectralVector::zeros(n_max);
    let kf = k as f64;
    for n in 0..=n_max {
        let mut acc = v[n] * (-gamma * n as f64);
        if k != 0 {
            let mut coupling = Complex64::new(0.0, 0.0);
            if n < n_max {
                coupling += v[n + 1] * ((n + 1) as f64).sqrt();
            }
            if n > 0 {
                coupling += v[n - 1] * (n as f64).sqrt();
            }
            acc -= I * kf * coupling;
        }
        out[n] = acc;
    }
    if k != 0 && n_max >= 1 {
        out[1] += I * (params.c / (2.0 * PI * kf)) * v[0];
    }
    out
}

/// `L† v` for mode 1: `-γ H v + i (a + a†) v - (i c/2π) v_1 e_0`.
pub fn apply_l_adjoint(params: &ModelParams, v: &SpectralVector) -> SpectralVector {
    let n_max = v.n_max();
    let mut out = SpectralVector::zeros(n_max);
    for n in 0..=n_max {
        let mut coupling = Complex64::new(0.0, 0.0);
        if n < n_max {
            coupling += v[n + 1] * ((n + 1) as f64).sqrt();
        }
        if n > 0 {
            coupling += v[n - 1] * (n as f64).sqrt();
        }
        out[n] = v[n] * (-params.gamma * n as f64) + I * coupling;
    }
    if n_max >= 1 {
        out[0] -= I * (params.c / (2.0 * PI)) * v[1];
    }
    out
}

/// Solves `(B(iξ) - lam) x = rhs` with `B(iξ) = H - (iξ/√2)(a + a†)`.
pub fn resolvent_solve(xi: f64, lam: f64, rhs: &SpectralVector) -> Result<SpectralVector> {
    let t = oscillator_matrix(1.0, -xi / std::f64::consts::SQRT_2, -lam, rhs.n_max());
    Ok(SpectralVector::from_coeffs(t.solve(&rhs.coeffs)?))
}

/// `(B(iξ) - lam) x`, the operator inverted by [`resolvent_solve`].
pub fn apply_resolvent_operator(xi: f64, lam: f64, x: &SpectralVector) -> SpectralVector {
    let t = oscillator_matrix(1.0, -xi / std::f64::consts::SQRT_2, -lam, x.n_max());
    SpectralVector::from_coeffs(t.apply(&x.coeffs))
}

/// Normalization `G_0 = -1/(c √2 π^{1/4})`, which makes the potential amplitude of `G e^{ix}` equal to 1.
pub fn g0_normalization(c: f64) -> f64 {
    -1.0 / (c * std::f64::consts::SQRT_2 * PI.powf(0.25))
}

/// Normalization `G̃_1 = -2√2 π^{5/4} i / ∂λΛ`, which makes `⟨G̃, G⟩ = 1`.
pub fn gtilde1_normalization(d_lambda: f64) -> Complex64 {
    -I * (2.0 * std::f64::consts::SQRT_2 * PI.powf(1.25) / d_lambda)
}

fn check_params(params: &ModelParams, lambda: f64, n_max: usize) -> Result<()> {
    params.validate()?;
    if params.k != 1 {
        return Err(Error::Domain(format!("eigensystem is built for mode k = 1, got k = {}", params.k)));
    }
    if !(params.gamma > 0.0) {
        return Err(Error::Domain("eigensystem requires gamma > 0".into()));
    }
    if !(params.c > 0.0) {
        return Err(Error::DegenerateInput("eigensystem requires c > 0".into()));
    }
    if n_max < 2 {
        return Err(Error::Domain(format!("truncation order must be at least 2, got {n_max}")));
    }
    let residual = eval_dispersion(params, lambda)?.abs();
    if residual > ROOT_TOLERANCE {
        return Err(Error::NotARoot { lambda, residual });
    }
    Ok(())
}

/// Eigenvector `G` of `L` for the real root `lambda`, normalized by `G_0 = -1/(c√2π^{1/4})`:
/// `G = (i c/2π) G_0 T(γ, 1, λ)^{-1} e_1`.
pub fn eigenvector(params: &ModelParams, lambda: f64, n_max: usize) -> Result<SpectralVector> {
    check_params(params, lambda, n_max)?;
    eigenvector_unchecked(params, lambda, n_max)
}

fn eigenvector_unchecked(params: &ModelParams, lambda: f64, n_max: usize) -> Result<SpectralVector> {
    let t = oscillator_matrix(params.gamma, 1.0, lambda, n_max);
    let w = t.solve(&SpectralVector::basis(1, n_max).coeffs)?;
    let scale = I * (params.c / (2.0 * PI)) * g0_normalization(params.c);
    Ok(SpectralVector::from_coeffs(w.into_iter().map(|z| z * scale).collect()))
}

/// Adjoint eigenvector `G̃ = -(i c/2π) G̃_1 T(γ, -1, λ)^{-1} e_0` with
/// `G̃_1 = -2√2π^{5/4} i/∂λΛ`.
pub fn adjoint_eigenvector(params: &ModelParams, lambda: f64, n_max: usize) -> Result<SpectralVector> {
    check_params(params, lambda, n_max)?;
    let d_lambda = d_lambda_dispersion(params, lambda)?;
    adjoint_unchecked(params, lambda, d_lambda, n_max)
}

fn adjoint_unchecked(params: &ModelParams, lambda: f64, d_lambda: f64, n_max: usize) -> Result<SpectralVector> {
    let t = oscillator_matrix(params.gamma, -1.0, lambda, n_max);
    let w = t.solve(&SpectralVector::basis(0, n_max).coeffs)?;
    let scale = -I * (params.c / (2.0 * PI)) * gtilde1_normalization(d_lambda);
    Ok(SpectralVector::from_coeffs(w.into_iter().map(|z| z * scale).collect()))
}

/// `⟨u, v⟩ = Σ conj(u_n) v_n`.
pub fn inner_product(u: &SpectralVector, v: &SpectralVector) -> Complex64 {
    u.inner(v)
}

/// Eigenvalue, eigenvector, adjoint eigenvector and normalization data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenSystem {
    pub params: ModelParams,
    pub lambda: f64,
    pub g: SpectralVector,
    pub gtilde: SpectralVector,
    /// `∂λΛ` at the root.
    pub d_lambda: f64,
    /// `⟨G̃, G⟩`.
    pub inner: Complex64,
    /// `G_0` normalization.
    pub g0: f64,
    /// `G̃_1` normalization.
    pub gtilde1: Complex64,
    /// `|Λ(γ, λ)|` at `lambda`.
    pub dispersion_residual: f64,
}

impl EigenSystem {
    pub fn new(params: &ModelParams, lambda: f64, n_max: usize) -> Result<Self> {
        check_params(params, lambda, n_max)?;
        let dispersion_residual = eval_dispersion(params, lambda)?.abs();
        let d_lambda = d_lambda_dispersion(params, lambda)?;
        let g = eigenvector_unchecked(params, lambda, n_max)?;
        let gtilde = adjoint_unchecked(params, lambda, d_lambda, n_max)?;
        let inner = gtilde.inner(&g);
        Ok(EigenSystem {
            params: *params,
            lambda,
            g,
            gtilde,
            d_lambda,
            inner,
            g0: g0_normalization(params.c),
            gtilde1: gtilde1_normalization(d_lambda),
            dispersion_residual,
        })
    }

    pub fn n_max(&self) -> usize {
        self.g.n_max()
    }

    /// `‖(L - λ) G‖ / ‖G‖`.
    pub fn eigen_residual(&self) -> f64 {
        let lg = apply_l_k(&self.params, 1, &self.g);
        let r = &lg - &self.g.scale(Complex64::new(self.lambda, 0.0));
        r.norm() / self.g.norm()
    }

    /// `‖(L† - λ) G̃‖ / ‖G̃‖`.
    pub fn adjoint_residual(&self) -> f64 {
        let lg = apply_l_adjoint(&self.params, &self.gtilde);
        let r = &lg - &self.gtilde.scale(Complex64::new(self.lambda, 0.0));
        r.norm() / self.gtilde.norm()
    }

    /// `G_0 conj(G̃_1) (i c/2π) ∂λΛ`, the closed form of `⟨G̃, G⟩`.
    pub fn inner_closed_form(&self) -> Complex64 {
        self.g0 * self.gtilde1.conj() * I * (self.params.c / (2.0 * PI)) * self.d_lambda
    }

    /// Largest tail ratio `|v_N|/max|v_n|` of `G` and `G̃`.
    pub fn tail_ratio(&self) -> f64 {
        self.g.tail_ratio().max(self.gtilde.tail_ratio())
    }
}

/// `ln J_n(1/γ, -λ/γ)` for `n = 0..=n_max`, evaluated independently by quadrature.
pub fn log_jn_table(gamma: f64, lambda: f64, n_max: usize) -> Result<Vec<f64>> {
    let y = 1.0 / gamma;
    let mu = -lambda / gamma;
    (0..=n_max)
        .into_par_iter()
        .map(|n| eval_jn(n, y, mu, DEFAULT_TOL).map(|j| j.log_value))
        .collect()
}

/// `G_n = -(c/2π) G_0 (1/√n!) (-i/γ)^n (λ/γ) J_n(1/γ, -λ/γ)` for `n >= 1`, `G_0` at `n = 0`.
pub fn eigenvector_series(params: &ModelParams, lambda: f64, n_max: usize) -> Result<SpectralVector> {
    params.validate()?;
    let log_j = log_jn_table(params.gamma, lambda, n_max)?;
    Ok(eigenvector_series_from_table(params, lambda, &log_j))
}

pub(crate) fn eigenvector_series_from_table(params: &ModelParams, lambda: f64, log_j: &[f64]) -> SpectralVector {
    let g = params.gamma;
    let g0 = g0_normalization(params.c);
    let n_max = log_j.len() - 1;
    let mut v = SpectralVector::zeros(n_max);
    v[0] = Complex64::new(g0, 0.0);
    if lambda == 0.0 {
        return v;
    }
    let base = (params.c / (2.0 * PI)).ln() + g0.abs().ln() + (lambda.abs() / g).ln();
    let sign = -g0.signum() * lambda.signum();
    for n in 1..=n_max {
        let ln_mag = base - 0.5 * ln_factorial(n) - n as f64 * g.ln() + log_j[n];
        v[n] = i_pow(-(n as i64)) * (sign * ln_mag.exp());
    }
    v
}

/// `G̃_n = -(c/2π) G̃_1 (1/√n!) (i/γ)^{n+1} J_n(1/γ, -λ/γ)`.
pub fn adjoint_eigenvector_series(params: &ModelParams, lambda: f64, n_max: usize) -> Result<SpectralVector> {
    params.validate()?;
    let d_lambda = d_lambda_dispersion(params, lambda)?;
    let log_j = log_jn_table(params.gamma, lambda, n_max)?;
    Ok(adjoint_series_from_table(params, d_lambda, &log_j))
}

pub(crate) fn adjoint_series_from_table(params: &ModelParams, d_lambda: f64, log_j: &[f64]) -> SpectralVector {
    let g = params.gamma;
    let gt1 = gtilde1_normalization(d_lambda);
    let n_max = log_j.len() - 1;
    let mut v = SpectralVector::zeros(n_max);
    let base = (params.c / (2.0 * PI)).ln();
    for n in 0..=n_max {
        let ln_mag = base - 0.5 * ln_factorial(n) - (n as f64 + 1.0) * g.ln() + log_j[n];
        v[n] = -gt1 * i_pow(n as i64 + 1) * ln_mag.exp();
    }
    v
}
