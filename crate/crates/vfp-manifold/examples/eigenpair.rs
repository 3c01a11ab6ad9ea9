//! Unstable eigenvector G, adjoint G~ and their pairing for one point in each regime.

use vfp_manifold::dispersion::{c_for_growth_rate, ModelParams};
use vfp_manifold::eigensystem::EigenSystem;
use vfp_manifold::spectral::default_truncation;

fn main() -> vfp_manifold::Result<()> {
    for &(gamma, lambda) in &[(1e-8, 0.1), (1e-5, 2e-3), (0.3, 1e-3)] {
        let c = c_for_growth_rate(gamma, lambda)?;
        let n = default_truncation(gamma, lambda);
        let e = EigenSystem::new(&ModelParams::new(c, gamma), lambda, n)?;
        println!("gamma = {gamma:e}, lambda = {lambda:e}, c = {c:.8}, N = {n}");
        println!("  |(L - lambda)G|   = {:.2e}", e.eigen_residual());
        println!("  |(L* - lambda)G~| = {:.2e}", e.adjoint_residual());
        println!("  <G~, G> = {:.12}, closed form {:.12}", e.inner, e.inner_closed_form());
        println!("  G_0 = {:.6}, G_1 = {:.6}, tail ratio {:.1e}", e.g[0], e.g[1], e.tail_ratio());
    }
    Ok(())
}
