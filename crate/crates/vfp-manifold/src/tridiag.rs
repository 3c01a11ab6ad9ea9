//! Complex tridiagonal systems: LU factorization with partial pivoting
//! (the LAPACK `gttrf`/`gttrs` scheme) and matrix-vector products.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `A` with `A[i][i] = diag[i]`, `A[i+1][i] = sub[i]`, `A[i][i+1] = sup[i]`.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

/// Factorization `P A = L U` of a [`Tridiagonal`]; `U` has two superdiagonals.
#[derive(Clone, Debug)]
pub struct TridiagonalLu {
    dl: Vec<Complex64>,
    d: Vec<Complex64>,
    du: Vec<Complex64>,
    du2: Vec<Complex64>,
    swapped: Vec<bool>,
}

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `A x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    pub fn factor(&self) -> Result<TridiagonalLu> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::SingularSystem("empty system".into()));
        }
        let mut dl = self.sub.clone();
        let mut d = self.diag.clone();
        let mut du = self.sup.clone();
        let mut du2 = vec![Complex64::new(0.0, 0.0); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let scale = self
            .diag
            .iter()
            .chain(&self.sub)
            .chain(&self.sup)
            .map(|z| cabs1(*z))
            .fold(0.0, f64::max);
        for i in 0..n.saturating_sub(1) {
            if cabs1(d[i]) >= cabs1(dl[i]) {
                if d[i] != Complex64::new(0.0, 0.0) {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        let tiny = scale * f64::EPSILON * 1e-6;
        if let Some(i) = d.iter().position(|z| cabs1(*z) <= tiny) {
            return Err(Error::SingularSystem(format!("zero pivot at row {i} of {n}")));
        }
        Ok(TridiagonalLu { dl, d, du, du2, swapped })
    }

    /// Solves `A x = b` with one step of iterative refinement.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let lu = self.factor()?;
        Ok(lu.solve_refined(self, b))
    }
}

impl TridiagonalLu {
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = temp - self.dl[i] * x[i];
            } else {
                let xi = x[i];
                x[i + 1] -= self.dl[i] * xi;
            }
        }
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
        x
    }

    /// Solve followed by one correction `x += A^{-1}(b - A x)`.
    pub fn solve_refined(&self, a: &Tridiagonal, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = self.solve(b);
        let ax = a.apply(&x);
        let r: Vec<Complex64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let dx = self.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        x
    }
}
