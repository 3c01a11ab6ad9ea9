//! Coefficient sequences in the Hermite/Bargman basis `e_n = z^n/√(π n!)`
//! and the ladder operators acting on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Mul, Sub};

/// Complex coefficients `v_0..=v_N` of one Fourier mode in the `e_n` basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralVector {
    pub coeffs: Vec<Complex64>,
}

impl SpectralVector {
    /// The zero vector with truncation order `n_max` (length `n_max + 1`).
    pub fn zeros(n_max: usize) -> Self {
        SpectralVector {
            coeffs: vec![Complex64::new(0.0, 0.0); n_max + 1],
        }
    }

    /// The basis vector `e_index`.
    pub fn basis(index: usize, n_max: usize) -> Self {
        let mut v = Self::zeros(n_max);
        v.coeffs[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        SpectralVector { coeffs }
    }

    /// Truncation order `N`.
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `⟨self, other⟩ = Σ conj(self_n) other_n`.
    pub fn inner(&self, other: &SpectralVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `|v_N| / max_n |v_n|`, the truncation-health diagnostic.
    pub fn tail_ratio(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            0.0
        } else {
            self.coeffs[self.n_max()].norm() / m
        }
    }

    /// Coefficient-wise complex conjugate (the `v*` of a real-space conjugation).
    pub fn conj(&self) -> SpectralVector {
        SpectralVector {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> SpectralVector {
        SpectralVector {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `(a† v)_n = √n v_{n-1}`, truncated at `N`.
    pub fn raise(&self) -> SpectralVector {
        let mut out = Self::zeros(self.n_max());
        for n in 1..self.len() {
            out.coeffs[n] = self.coeffs[n - 1] * (n as f64).sqrt();
        }
        out
    }

    /// `(a v)_n = √(n+1) v_{n+1}`.
    pub fn lower(&self) -> SpectralVector {
        let mut out = Self::zeros(self.n_max());
        for n in 0..self.n_max() {
            out.coeffs[n] = self.coeffs[n + 1] * ((n + 1) as f64).sqrt();
        }
        out
    }

    /// `(H v)_n = n v_n`.
    pub fn number(&self) -> SpectralVector {
        SpectralVector {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * n as f64)
                .collect(),
        }
    }

    /// Copy truncated or zero-padded to order `n_max`.
    pub fn resized(&self, n_max: usize) -> SpectralVector {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n_max + 1, Complex64::new(0.0, 0.0));
        SpectralVector { coeffs }
    }
}

impl Index<usize> for SpectralVector {
    type Output = Complex64;
    fn index(&self, n: usize) -> &Complex64 {
        &self.coeffs[n]
    }
}

impl IndexMut<usize> for SpectralVector {
    fn index_mut(&mut self, n: usize) -> &mut Complex64 {
        &mut self.coeffs[n]
    }
}

impl Add for &SpectralVector {
    type Output = SpectralVector;
    fn add(self, rhs: &SpectralVector) -> SpectralVector {
        SpectralVector {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SpectralVector {
    type Output = SpectralVector;
    fn sub(self, rhs: &SpectralVector) -> SpectralVector {
        SpectralVector {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<Complex64> for &SpectralVector {
    type Output = SpectralVector;
    fn mul(self, s: Complex64) -> SpectralVector {
        self.scale(s)
    }
}

/// Default Hermite truncation for growth rate `lambda` and friction `gamma`.
///
/// The eigenvector coefficients decay like `exp(-λ√n)` beyond `1/λ²` and
/// like `exp(-c γ n^{3/2})` beyond `γ^{-2/3}`; the order is chosen where the
/// faster of the two has reached about `e^{-25}`, plus a margin of 64.
pub fn default_truncation(gamma: f64, lambda: f64) -> usize {
    const CAP: f64 = 8.0e6;
    let by_lambda = if lambda > 0.0 { (25.0 / lambda).powi(2) } else { f64::INFINITY };
    let by_gamma = if gamma > 0.0 { (75.0 / gamma).powf(2.0 / 3.0) } else { f64::INFINITY };
    let n = by_lambda.min(by_gamma).min(CAP);
    (n as usize + 64).max(64)
}
