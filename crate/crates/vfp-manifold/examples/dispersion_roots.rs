//! Instability threshold, unstable roots and the inverse map λ -> c for mode 1.

use std::f64::consts::PI;
use vfp_manifold::dispersion::{c_for_growth_rate, find_root, instability_threshold, ModelParams};

fn main() -> vfp_manifold::Result<()> {
    for gamma in [1e-6, 1e-2, 0.1, 0.3, 1.0] {
        let c_star = instability_threshold(gamma, 1)?;
        println!("gamma = {gamma:>6}: threshold c* = {c_star:.10} (c*/2pi = {:.6})", c_star / (2.0 * PI));
    }

    println!("\nroots at c = 4 pi:");
    for gamma in [0.0, 1e-2, 1e-3, 1e-4, 1e-5] {
        let root = find_root(&ModelParams::new(4.0 * PI, gamma), (0.0, 2.0))?;
        println!("  gamma = {gamma:>6}: lambda = {:.15}, dLambda/dlambda = {:.6}", root.lambda, root.d_lambda);
    }

    println!("\ninverse map:");
    for &(gamma, lambda) in &[(0.1, 0.05), (0.3, 0.02), (1e-8, 0.1)] {
        let c = c_for_growth_rate(gamma, lambda)?;
        let back = find_root(&ModelParams::new(c, gamma), (0.0, 1.0))?.lambda;
        println!("  (gamma, lambda) = ({gamma}, {lambda}) -> c = {c:.12}, root back = {back:.12}");
    }
    Ok(())
}
