//! Second-order unstable-manifold coefficients and the Landau coefficients.
//!
//! With `G`, `G̃` from [`EigenSystem`]:
//!
//! ```text
//! U_n  = i G_{n-1} √n / (γ n + 2λ),            U_0 = 0
//! (2λ - L_2) H2 = -i a† G                       (rank-one self-consistency in H2_0)
//! X_n  = U_n / (γ n + 4λ)
//! c3_1 = -i ⟨G̃, a†(U + U*)⟩
//! c3_2 =  i ⟨G̃, a† H2⟩
//! c3_3 = (i c π^{1/4} H2_0 / √2) ⟨G̃, a† G*⟩
//! c5_partial = -2 c3 ⟨G̃, a†(X + X*)⟩
//! ```

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::asymptotics::{classify_regime, Regime};
use crate::eigensystem::{oscillator_matrix, EigenSystem};
use crate::error::{Error, Result};
use crate::spectral::SpectralVector;
use crate::special_functions::{eval_jn, i_pow, ln_factorial, DEFAULT_TOL};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Smallest accepted `|1 - (i c/4π) (T(γ,2,2λ)^{-1} e_1)_0|`.
pub const DENOMINATOR_FLOOR: f64 = 1e-10;

/// Relative agreement required between the vector and closed-series paths.
pub const SERIES_AGREEMENT: f64 = 1e-6;

/// Largest truncation for which [`compute_c3`] runs the closed-series cross-check.
pub const SERIES_CHECK_MAX_N: usize = 20_000;

/// Second-order manifold data for one eigensystem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifoldCoefficients {
    /// `U`, with `H^(0) = U + U*`.
    pub u: SpectralVector,
    /// `H^(2)`, the second-harmonic coefficient.
    pub h2: SpectralVector,
    /// `H^(2)_0`, solved self-consistently.
    pub h2_0: Complex64,
    /// `X` with `(γH + 4λ) X = U`.
    pub x: SpectralVector,
}

impl ManifoldCoefficients {
    pub fn compute(eig: &EigenSystem) -> Result<Self> {
        let u = compute_u(eig);
        let (h2, h2_0) = compute_h2(eig)?;
        let x = compute_x(eig, &u);
        Ok(ManifoldCoefficients { u, h2, h2_0, x })
    }

    /// Largest tail ratio of `U` and `H2`.
    pub fn tail_ratio(&self) -> f64 {
        self.u.tail_ratio().max(self.h2.tail_ratio())
    }
}

/// `U_n = i G_{n-1} √n/(γ n + 2λ)`, `U_0 = 0`.
pub fn compute_u(eig: &EigenSystem) -> SpectralVector {
    let g = eig.params.gamma;
    let lam = eig.lambda;
    let mut u = SpectralVector::zeros(eig.n_max());
    for n in 1..=eig.n_max() {
        let nf = n as f64;
        u[n] = I * eig.g[n - 1] * (nf.sqrt() / (g * nf + 2.0 * lam));
    }
    u
}

/// `X_n = U_n/(γ n + 4λ)`.
pub fn compute_x(eig: &EigenSystem, u: &SpectralVector) -> SpectralVector {
    let g = eig.params.gamma;
    let lam = eig.lambda;
    SpectralVector::from_coeffs(
        u.coeffs
            .iter()
            .enumerate()
            .map(|(n, un)| un / (g * n as f64 + 4.0 * lam))
            .collect(),
    )
}

/// Solves `(2λ - L_2) H2 = -i a† G`.
///
/// Writing `T_2 = T(γ, 2, 2λ)`, the equation is `T_2 H2 = -i a†G + (i c/4π) H2_0 e_1`,
/// so with `x = T_2^{-1}(-i a†G)` and `w = T_2^{-1} e_1`:
/// `H2_0 = x_0/(1 - (i c/4π) w_0)` and `H2 = x + (i c/4π) H2_0 w`.
pub fn compute_h2(eig: &EigenSystem) -> Result<(SpectralVector, Complex64)> {
    let n_max = eig.n_max();
    let t2 = oscillator_matrix(eig.params.gamma, 2.0, 2.0 * eig.lambda, n_max);
    let lu = t2.factor()?;
    let rhs = eig.g.raise().scale(-I);
    let x = lu.solve_refined(&t2, &rhs.coeffs);
    let w = lu.solve_refined(&t2, &SpectralVector::basis(1, n_max).coeffs);
    let coupling = I * (eig.params.c / (4.0 * PI));
    let denom = Complex64::new(1.0, 0.0) - coupling * w[0];
    if denom.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DenominatorNearZero(denom.norm()));
    }
    let h2_0 = x[0] / denom;
    let h2 = SpectralVector::from_coeffs(x.iter().zip(&w).map(|(xn, wn)| xn + coupling * h2_0 * wn).collect());
    Ok((h2, h2_0))
}

/// `(2λ - L_2) H2 + i a† G`, the residual of the defining equation.
pub fn h2_residual(eig: &EigenSystem, h2: &SpectralVector) -> SpectralVector {
    let mut l2 = crate::eigensystem::apply_l_k(&eig.params, 2, h2);
    for z in l2.coeffs.iter_mut() {
        *z = -*z;
    }
    let lhs = &l2 + &h2.scale(Complex64::new(2.0 * eig.lambda, 0.0));
    &lhs + &eig.g.raise().scale(I)
}

/// `H2_0` from the resolvent entries `ψ_0^β(-2√2/γ, -2λ/γ) = (-2i/γ)^β J_β(2/γ, -2λ/γ)`,
/// summed over `β <= n_terms`. Independent of any linear solve.
pub fn h2_0_psi_series(eig: &EigenSystem, n_terms: usize) -> Result<Complex64> {
    let g = eig.params.gamma;
    let y = 2.0 / g;
    let mu = -2.0 * eig.lambda / g;
    let rhs = eig.g.raise();
    let top = n_terms.min(eig.n_max());
    let log_j: Vec<f64> = (0..=top)
        .into_par_iter()
        .map(|b| eval_jn(b, y, mu, DEFAULT_TOL).map(|j| j.log_value))
        .collect::<Result<_>>()?;
    // (T_2^{-1})_{0β} = (1/γ) (1/√β!) ψ_0^β and ψ_0^β = (i ξ/√2)^β J_β with ξ/√2 = -2/γ.
    let entry = |b: usize| -> Complex64 {
        let ln_mag = -g.ln() - 0.5 * ln_factorial(b) + b as f64 * y.ln() + log_j[b];
        i_pow(-(b as i64)) * ln_mag.exp()
    };
    let x0: Complex64 = (1..=top).map(|b| entry(b) * rhs[b]).sum::<Complex64>() * (-I);
    let w0 = entry(1);
    let denom = Complex64::new(1.0, 0.0) - I * (eig.params.c / (4.0 * PI)) * w0;
    if denom.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DenominatorNearZero(denom.norm()));
    }
    Ok(x0 / denom)
}

/// Closed-series values of the two Landau inner products, evaluated from
/// `J_n(1/γ, -λ/γ)` by quadrature with log-scaled products.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SeriesCheck {
    /// `⟨G̃, a†(U + U*)⟩` from the odd-index series.
    pub gtilde_adag_u: Complex64,
    /// `⟨G̃, a† G*⟩` from its series.
    pub gtilde_adag_gstar: Complex64,
    /// Relative difference to the vector path for each of the two.
    pub rel_diff_u: f64,
    pub rel_diff_gstar: f64,
}

/// `λ Σ_{n>=2} n J_{n-1} J_n/(γ^{2n+1} n!)`, the series part of `⟨G̃, a†G*⟩`.
pub fn gstar_series_from_table(gamma: f64, lambda: f64, log_j: &[f64]) -> f64 {
    let logs: Vec<f64> = (2..log_j.len())
        .map(|n| {
            let nf = n as f64;
            nf.ln() + log_j[n - 1] + log_j[n] - (2.0 * nf + 1.0) * gamma.ln() - ln_factorial(n)
        })
        .collect();
    lambda * log_sum_exp(&logs)
}

/// `λ Σ_{n>=3, n odd} n(n-1)/(γ(n-1) + 2λ) · J_{n-2} J_n/(γ^{2n} n!)`.
pub fn u_series_from_table(gamma: f64, lambda: f64, log_j: &[f64]) -> f64 {
    let logs: Vec<f64> = (3..log_j.len())
        .step_by(2)
        .map(|n| {
            let nf = n as f64;
            (nf * (nf - 1.0)).ln() - (gamma * (nf - 1.0) + 2.0 * lambda).ln() + log_j[n - 2] + log_j[n]
                - 2.0 * nf * gamma.ln()
                - ln_factorial(n)
        })
        .collect();
    lambda * log_sum_exp(&logs)
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return 0.0;
    }
    logs.iter().map(|l| (l - top).exp()).sum::<f64>() * top.exp()
}

/// Evaluates both closed series up to the eigensystem truncation.
pub fn series_inner_products(eig: &EigenSystem) -> Result<(Complex64, Complex64)> {
    let p = &eig.params;
    let log_j = crate::eigensystem::log_jn_table(p.gamma, eig.lambda, eig.n_max())?;
    let s_u = u_series_from_table(p.gamma, eig.lambda, &log_j);
    let s_g = gstar_series_from_table(p.gamma, eig.lambda, &log_j);
    let adag_u = Complex64::new(0.0, -p.c / (PI * eig.d_lambda)) * s_u;
    let gt1c_g0 = eig.gtilde1.conj() * eig.g0;
    let adag_gstar = gt1c_g0 - gt1c_g0 * (p.c * p.c / (4.0 * PI * PI)) * s_g;
    Ok((adag_u, adag_gstar))
}

/// Landau coefficient breakdown at one `(γ, λ)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LandauBreakdown {
    pub gamma: f64,
    pub lambda: f64,
    pub c: f64,
    pub c3_1: Complex64,
    pub c3_2: Complex64,
    pub c3_3: Complex64,
    pub c3: Complex64,
    /// Leading term of `c5` only.
    pub c5_partial: Complex64,
    pub regime: Regime,
    pub n_max_used: usize,
    /// Largest tail ratio `|v_N|/max|v_n|` over `G`, `G̃`, `U`, `H2`.
    pub tail_bound: f64,
    /// `⟨G̃, a† G*⟩`.
    pub gtilde_adag_gstar: Complex64,
    /// `H2_0`.
    pub h2_0: Complex64,
    /// `λ Σ_{n>=2} n J_{n-1} J_n/(γ^{2n+1} n!)`, the series part of `⟨G̃, a†G*⟩`,
    /// recovered from the vector path.
    pub c3_3_series: f64,
    /// `|c3_2| / |c3_1 + c3_3|`.
    pub c3_2_ratio: f64,
    /// Closed-series cross-check, present when the truncation allowed it.
    pub series_check: Option<SeriesCheck>,
}

/// Options for [`compute_c3_with`].
#[derive(Clone, Copy, Debug)]
pub struct C3Options {
    /// Run the closed-series cross-check when `N` is at most this.
    pub series_check_max_n: usize,
}

impl Default for C3Options {
    fn default() -> Self {
        C3Options {
            series_check_max_n: SERIES_CHECK_MAX_N,
        }
    }
}

/// Landau coefficient breakdown with the default options.
pub fn compute_c3(eig: &EigenSystem, mc: &ManifoldCoefficients) -> Result<LandauBreakdown> {
    compute_c3_with(eig, mc, C3Options::default())
}

pub fn compute_c3_with(eig: &EigenSystem, mc: &ManifoldCoefficients, opts: C3Options) -> Result<LandauBreakdown> {
    let p = &eig.params;
    let u_sym = &mc.u + &mc.u.conj();
    let adag_u = eig.gtilde.inner(&u_sym.raise());
    let adag_gstar = eig.gtilde.inner(&eig.g.conj().raise());
    let c3_1 = -I * adag_u;
    let c3_2 = I * eig.gtilde.inner(&mc.h2.raise());
    let c3_3 = I * (p.c * PI.powf(0.25) / SQRT_2) * mc.h2_0 * adag_gstar;
    let c3 = c3_1 + c3_2 + c3_3;
    let c5_partial = compute_c5_partial(eig, mc, c3);
    let gstar_prefactor = eig.gtilde1.conj() * eig.g0;
    let c3_3_series =
        ((Complex64::new(1.0, 0.0) - adag_gstar / gstar_prefactor) * (4.0 * PI * PI / (p.c * p.c))).re;

    let series_check = if eig.n_max() <= opts.series_check_max_n {
        let (s_u, s_g) = series_inner_products(eig)?;
        let rel_u = (s_u - adag_u).norm() / adag_u.norm().max(f64::MIN_POSITIVE);
        let rel_g = (s_g - adag_gstar).norm() / adag_gstar.norm().max(f64::MIN_POSITIVE);
        if rel_u > SERIES_AGREEMENT || rel_g > SERIES_AGREEMENT {
            return Err(Error::Precision(format!(
                "c3 paths disagree at gamma = {}, lambda = {}: relative differences {rel_u:e} (U term), {rel_g:e} (G* term)",
                p.gamma, eig.lambda
            )));
        }
        Some(SeriesCheck {
            gtilde_adag_u: s_u,
            gtilde_adag_gstar: s_g,
            rel_diff_u: rel_u,
            rel_diff_gstar: rel_g,
        })
    } else {
        None
    };

    Ok(LandauBreakdown {
        gamma: p.gamma,
        lambda: eig.lambda,
        c: p.c,
        c3_1,
        c3_2,
        c3_3,
        c3,
        c5_partial,
        regime: classify_regime(p.gamma, eig.lambda).regime,
        n_max_used: eig.n_max(),
        tail_bound: eig.tail_ratio().max(mc.tail_ratio()),
        gtilde_adag_gstar: adag_gstar,
        h2_0: mc.h2_0,
        c3_3_series,
        c3_2_ratio: c3_2.norm() / (c3_1 + c3_3).norm(),
        series_check,
    })
}

/// `-2 c3 ⟨G̃, a†(X + X*)⟩`, the leading contribution to `c5`.
pub fn compute_c5_partial(eig: &EigenSystem, mc: &ManifoldCoefficients, c3: Complex64) -> Complex64 {
    let x_sym = &mc.x + &mc.x.conj();
    -2.0 * c3 * eig.gtilde.inner(&x_sym.raise())
}

/// Odd-index and even-index parts of `⟨G̃, a†(U + U*)⟩` on the vector path.
pub fn c3_1_parity_split(eig: &EigenSystem, mc: &ManifoldCoefficients) -> (Complex64, Complex64) {
    let v = (&mc.u + &mc.u.conj()).raise();
    let mut odd = Complex64::new(0.0, 0.0);
    let mut even = Complex64::new(0.0, 0.0);
    for (n, (a, b)) in eig.gtilde.coeffs.iter().zip(&v.coeffs).enumerate() {
        let term = a.conj() * b;
        if n % 2 == 1 {
            odd += term;
        } else {
            even += term;
        }
    }
    (odd, even)
}
