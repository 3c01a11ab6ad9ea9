//! Landau coefficient c3 and its three parts at c = 7, γ = 0.2.

use vfp_manifold::dispersion::{find_root, ModelParams};
use vfp_manifold::eigensystem::EigenSystem;
use vfp_manifold::manifold::{compute_c3, ManifoldCoefficients};
use vfp_manifold::spectral::default_truncation;

fn main() -> vfp_manifold::Result<()> {
    let params = ModelParams::new(7.0, 0.2);
    let root = find_root(&params, (0.0, 1.0))?;
    let eig = EigenSystem::new(&params, root.lambda, default_truncation(params.gamma, root.lambda))?;
    let mc = ManifoldCoefficients::compute(&eig)?;
    let b = compute_c3(&eig, &mc)?;
    println!("lambda = {:.15}", root.lambda);
    println!("c3_1 = {:.6}", b.c3_1);
    println!("c3_2 = {:.6}", b.c3_2);
    println!("c3_3 = {:.6}", b.c3_3);
    println!("c3   = {:.6}", b.c3);
    println!("c5 (partial) = {:.6}", b.c5_partial);
    println!("regime {}, H2_0 = {:.6}", b.regime, b.h2_0);
    if let Some(check) = b.series_check {
        println!("series cross-check: {:.1e} (U), {:.1e} (G*)", check.rel_diff_u, check.rel_diff_gstar);
    }
    if b.c3.re < 0.0 {
        println!("predicted saturation amplitude sqrt(lambda/|c3|) = {:.6}", (root.lambda / -b.c3.re).sqrt());
    }
    Ok(())
}
