//! Unstable-manifold expansion of the one-dimensional Vlasov-Newton-Fokker-Planck
//! equation near its homogeneous Maxwellian state.
//!
//! The crate is organised bottom-up:
//!
//! - [`special_functions`]: the integrals `J_n(y, μ)` and resolvent coefficients `ψ_α^β`.
//! - [`dispersion`]: the dispersion function `Λ(γ, λ)`, its roots and the inverse map `λ ↦ c`.
//! - [`eigensystem`]: the linearized operator, its unstable eigenvector and adjoint.
//! - [`manifold`]: second-order manifold coefficients and the Landau coefficients `c3`, `c5`.
//! - [`asymptotics`]: Dirichlet series, power-law fits and the `(γ, λ)` regime map.
//! - [`simulator`]: nonlinear Fourier-Hermite time integration.
//! - [`cli`] and [`output`]: the `vfp` command line and its run artifacts.

pub mod asymptotics;
pub mod cli;
pub mod dispersion;
pub mod eigensystem;
pub mod error;
pub mod manifold;
pub mod output;
pub mod quadrature;
pub mod simulator;
pub mod special_functions;
pub mod spectral;
pub mod tridiag;

pub use error::{Error, Result};
