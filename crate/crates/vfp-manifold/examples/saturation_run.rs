//! Nonlinear run from the unstable eigenvector to saturation at γ = 0.3, λ = 0.02.

use vfp_manifold::dispersion::{c_for_growth_rate, ModelParams};
use vfp_manifold::simulator::{analyse, simulate, SimConfig};

fn main() -> vfp_manifold::Result<()> {
    let (gamma, lambda) = (0.3, 0.02);
    let params = ModelParams::new(c_for_growth_rate(gamma, lambda)?, gamma);
    let cfg = SimConfig::for_growth_rate(params, lambda);
    println!("K = {}, N = {}, dt = {:.3e}, t_end = {}", cfg.k_max, cfg.n_max, cfg.dt, cfg.t_end);
    let traj = simulate(&cfg)?;
    for s in traj.samples.iter().step_by(traj.samples.len() / 20 + 1) {
        println!("t = {:>8.1}  |phi_1| = {:.6e}  |phi_2| = {:.3e}", s.t, s.phi1.norm(), s.abs_phi2);
    }
    let report = analyse(&traj)?;
    println!("fitted growth rate {:?} (target {lambda})", report.fitted_growth_rate);
    println!("fitted c3 {:?}, predicted {:.5}", report.fitted_c3.map(|c| c.re), report.predicted_c3.re);
    println!(
        "A_sat = {:.5} at t = {:.1} ({:?}); balance prediction {:?}",
        report.a_sat, report.t_sat, report.method_flags.saturation, report.predicted_a_sat
    );
    Ok(())
}
