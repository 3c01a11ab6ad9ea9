//! Dense reference operators assembled entry by entry, independent of the
//! tridiagonal code paths under test.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use vfp_manifold::spectral::SpectralVector;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Matrix of `a†` on `e_0..e_N`: `(a† v)_n = √n v_{n-1}`.
pub fn raising(n_max: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n_max + 1, n_max + 1, |r, col| {
        if r == col + 1 {
            c((r as f64).sqrt())
        } else {
            c(0.0)
        }
    })
}

/// Matrix of `a`: `(a v)_n = √(n+1) v_{n+1}`.
pub fn lowering(n_max: usize) -> DMatrix<Complex64> {
    raising(n_max).transpose()
}

/// Matrix of the number operator `H`.
pub fn number(n_max: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n_max + 1, n_max + 1, |r, col| if r == col { c(r as f64) } else { c(0.0) })
}

/// `L_k = -γH - ik(a + a†) + (ic/2πk) e_1 ⟨e_0, ·⟩` (no rank-one term for `k = 0`).
pub fn dense_l(c_coupling: f64, gamma: f64, k: i32, n_max: usize) -> DMatrix<Complex64> {
    let kf = k as f64;
    let mut m = number(n_max) * c(-gamma) - (lowering(n_max) + raising(n_max)) * (I * kf);
    if k != 0 {
        m[(1, 0)] += I * (c_coupling / (2.0 * PI * kf));
    }
    m
}

/// `L† = -γH + i(a + a†) - (ic/2π) e_0 ⟨e_1, ·⟩`, written from the adjoint formula.
pub fn dense_l_adjoint(c_coupling: f64, gamma: f64, n_max: usize) -> DMatrix<Complex64> {
    let mut m = number(n_max) * c(-gamma) + (lowering(n_max) + raising(n_max)) * I;
    m[(0, 1)] -= I * (c_coupling / (2.0 * PI));
    m
}

/// `L_2` for the second harmonic with the mode-2 mean-field term.
pub fn dense_l2(c_coupling: f64, gamma: f64, n_max: usize) -> DMatrix<Complex64> {
    dense_l(c_coupling, gamma, 2, n_max)
}

pub fn to_dvector(v: &SpectralVector) -> DVector<Complex64> {
    DVector::from_column_slice(&v.coeffs)
}

pub fn from_dvector(v: &DVector<Complex64>) -> SpectralVector {
    SpectralVector::from_coeffs(v.iter().cloned().collect())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n_max: usize) -> SpectralVector {
    SpectralVector::from_coeffs(
        (0..=n_max)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
}

/// Largest entrywise difference relative to the largest entry of `b`.
pub fn rel_diff(a: &SpectralVector, b: &SpectralVector) -> f64 {
    let scale = b.max_abs().max(f64::MIN_POSITIVE);
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

/// Eigenpair, manifold vectors and Landau coefficient from dense solves.
pub struct DenseReference {
    pub g: SpectralVector,
    pub gtilde: SpectralVector,
    pub u: SpectralVector,
    pub h2: SpectralVector,
    pub c3: Complex64,
}

/// Null vector of `m` with entry 0 fixed to `v0`, from rows `1..=N`.
fn null_vector_fixing_first(m: &DMatrix<Complex64>, v0: Complex64) -> DVector<Complex64> {
    let n = m.nrows();
    let sub = m.view((1, 1), (n - 1, n - 1)).into_owned();
    let rhs = -m.view((1, 0), (n - 1, 1)).column(0).into_owned() * v0;
    let tail = sub.lu().solve(&rhs).expect("nonsingular minor");
    let mut v = DVector::zeros(n);
    v[0] = v0;
    v.rows_mut(1, n - 1).copy_from(&tail);
    v
}

fn inner(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Everything entering `c3`, from dense linear algebra on independently assembled matrices.
///
/// `G` is fixed by `G_0 = -1/(c√2π^{1/4})` and `G̃` by `⟨G̃, G⟩ = 1`.
pub fn dense_reference(c_coupling: f64, gamma: f64, lambda: f64, n_max: usize) -> DenseReference {
    let dim = n_max + 1;
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let g0 = -1.0 / (c_coupling * std::f64::consts::SQRT_2 * PI.powf(0.25));
    let l1 = dense_l(c_coupling, gamma, 1, n_max) - &id * c(lambda);
    let g = null_vector_fixing_first(&l1, c(g0));
    let ladj = dense_l_adjoint(c_coupling, gamma, n_max) - &id * c(lambda);
    let mut gt = null_vector_fixing_first(&ladj, c(1.0));
    let norm = inner(&gt, &g);
    gt /= norm.conj();

    let adag = raising(n_max);
    let adag_g = &adag * &g;
    let diag_u = number(n_max) * c(gamma) + &id * c(2.0 * lambda);
    let u = diag_u.lu().solve(&(&adag_g * I)).unwrap();
    let l2 = dense_l2(c_coupling, gamma, n_max);
    let h2 = (&id * c(2.0 * lambda) - l2).lu().solve(&(&adag_g * (-I))).unwrap();

    let u_sym = &u + u.map(|z| z.conj());
    let c3_1 = -I * inner(&gt, &(&adag * u_sym));
    let c3_2 = I * inner(&gt, &(&adag * &h2));
    let gstar = g.map(|z| z.conj());
    let c3_3 = I * (c_coupling * PI.powf(0.25) / std::f64::consts::SQRT_2) * h2[0] * inner(&gt, &(&adag * gstar));
    DenseReference {
        g: from_dvector(&g),
        gtilde: from_dvector(&gt),
        u: from_dvector(&u),
        h2: from_dvector(&h2),
        c3: c3_1 + c3_2 + c3_3,
    }
}
