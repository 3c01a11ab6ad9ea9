//! c3 along λ in each regime, with the fitted log-log slopes.

use vfp_manifold::asymptotics::log_log_slope;
use vfp_manifold::cli::breakdown_at;
use vfp_manifold::manifold::C3Options;

fn main() -> vfp_manifold::Result<()> {
    let opts = C3Options { series_check_max_n: 0 };
    for (gamma, lambdas) in [(1e-8, [0.05, 0.1, 0.2]), (1e-5, [1e-4, 3e-4, 1e-3]), (0.3, [1e-5, 1e-4, 1e-3])] {
        println!("gamma = {gamma:e}");
        let mut rows = Vec::new();
        for lambda in lambdas {
            let b = breakdown_at(gamma, lambda, None, opts)?;
            println!(
                "  lambda = {lambda:e}: c3 = {:>12.5e}, c3_1 = {:>12.5e}, c3_3 = {:>12.5e}, |c5| = {:.3e} [{}]",
                b.c3.re,
                b.c3_1.re,
                b.c3_3.re,
                b.c5_partial.norm(),
                b.regime
            );
            rows.push((lambda, b.c3.norm(), b.c3_1.norm()));
        }
        let c3: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
        let c31: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.2)).collect();
        println!(
            "  slopes: |c3| {:.3}, |c3_1| {:.3}",
            log_log_slope(&c3)?.exponent,
            log_log_slope(&c31)?.exponent
        );
    }
    Ok(())
}
