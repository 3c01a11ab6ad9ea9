//! Evaluates J_n(y, μ) in log form, the large-y coefficient a_n and a resolvent coefficient ψ.

use vfp_manifold::special_functions::{eval_jn, eval_psi, log_an, DEFAULT_TOL};

fn main() -> vfp_manifold::Result<()> {
    println!("{:>6} {:>8} {:>8} {:>22} {:>12}", "n", "y", "mu", "ln J_n", "quad. err");
    for &(n, y, mu) in &[(0, 1.0, 0.0), (3, 10.0, -5.0), (50, 2.0, 0.0), (5000, 2.0, 0.0), (10, 1e4, -1e3)] {
        let j = eval_jn(n, y, mu, DEFAULT_TOL)?;
        println!("{n:>6} {y:>8} {mu:>8} {:>22.15e} {:>12.2e}", j.log_value, j.quadrature_error);
    }

    println!("\na_n e^(n/2 - (n/2) ln n)/sqrt(pi) at y = 1e6, lambda = 1e-4:");
    for n in [20usize, 50, 100, 200] {
        let nf = n as f64;
        let ratio = (log_an(n, 1e6, 1e-4)? + nf / 2.0 - nf / 2.0 * nf.ln()).exp() / std::f64::consts::PI.sqrt();
        println!("  n = {n:>3}: {ratio:.6}");
    }

    let psi = eval_psi(2, 1, 1.5, 0.2, DEFAULT_TOL)?;
    println!("\npsi_2^1(xi = 1.5, lambda = 0.2) = {}", psi.value);
    Ok(())
}
