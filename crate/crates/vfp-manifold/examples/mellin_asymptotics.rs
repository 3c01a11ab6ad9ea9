//! Dirichlet series against their Mellin predictions, and the regime labels of a few points.

use vfp_manifold::asymptotics::{classify_regime, dirichlet_phi, dirichlet_phi_odd, mellin_prediction, SeriesSign};

fn main() -> vfp_manifold::Result<()> {
    for alpha in [-0.5, 0.0, 0.5, 1.0] {
        let p = mellin_prediction(alpha)?;
        print!("alpha = {alpha:>4}: prediction {:.4} lambda^-{}", p.plus_coefficient, p.plus_exponent);
        for lam in [1e-1f64, 1e-2, 1e-3] {
            let scaled = lam.powf(p.plus_exponent) * dirichlet_phi(alpha, SeriesSign::Plus, lam)?;
            print!("  {scaled:.5}");
        }
        println!();
    }
    let lam: f64 = 1e-3;
    println!("odd-n variant at alpha = 1/2: {:.6}", lam.powi(3) * dirichlet_phi_odd(0.5, lam)?);
    for lam in [1e-1, 1e-2, 1e-3] {
        println!("phi-(1/2, {lam:e}) = {:.8}", dirichlet_phi(0.5, SeriesSign::Minus, lam)?);
    }

    println!();
    for &(gamma, lambda) in &[(1e-8, 0.1), (1e-5, 1e-3), (0.3, 1e-3), (1e-3, 0.1)] {
        let r = classify_regime(gamma, lambda);
        println!(
            "gamma = {gamma:e}, lambda = {lambda:e}: {} (gamma/lambda^3 = {:.2e}, gamma/lambda^(3/4) = {:.2e})",
            r.regime, r.ratio_cubic, r.ratio_three_quarter
        );
    }
    Ok(())
}
