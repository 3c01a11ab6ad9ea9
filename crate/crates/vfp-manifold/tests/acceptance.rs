//! Acceptance criteria 1-16, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_RED` are reported as FAIL when they fail but do
//! not change the exit status; any other failure exits with status 1.

mod common;

use nalgebra::Schur;
use num_complex::Complex64;
use std::f64::consts::{E, PI};
use std::time::Instant;

use common::{dense_l, dense_reference, rel_diff};
use vfp_manifold::asymptotics::{
    dirichlet_phi, dirichlet_phi_odd, log_log_slope, SeriesSign,
};
use vfp_manifold::cli::breakdown_at;
use vfp_manifold::dispersion::{
    c_for_growth_rate, d_lambda_dispersion, eval_dispersion, find_root, ModelParams,
};
use vfp_manifold::eigensystem::EigenSystem;
use vfp_manifold::manifold::{compute_c3, C3Options, LandauBreakdown, ManifoldCoefficients};
use vfp_manifold::simulator::{recommended_dt, run, step, SimConfig, SimState};
use vfp_manifold::special_functions::{eval_jn, log_an, DEFAULT_TOL};
use vfp_manifold::spectral::default_truncation;

/// Criteria whose failure is understood and kept visible rather than fatal.
const KNOWN_RED: [u32; 3] = [6, 7, 11];

/// Root of the `γ = 0` relation at `c = 4π`, 40-digit quadrature.
const VLASOV_ROOT_4PI: f64 = 0.6120031809624807605680903;

/// One `(γ, λ)` row per regime.
const REGIME_GRID: [(f64, [f64; 3]); 3] = [
    (1e-8, [0.05, 0.1, 0.2]),
    (1e-5, [1e-3, 2e-3, 4e-3]),
    (0.3, [1e-4, 1e-3, 3e-3]),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn breakdown(gamma: f64, lambda: f64) -> LandauBreakdown {
    let opts = C3Options { series_check_max_n: 0 };
    breakdown_at(gamma, lambda, None, opts).unwrap_or_else(|e| panic!("c3 at ({gamma}, {lambda}): {e}"))
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

fn slope(points: &[(f64, f64)]) -> f64 {
    log_log_slope(points).expect("slope fit").exponent
}

fn jn(n: usize, y: f64, mu: f64) -> f64 {
    eval_jn(n, y, mu, DEFAULT_TOL).unwrap().log_value
}

fn criterion_1() -> Outcome {
    let mut worst_rec: f64 = 0.0;
    let mut worst_anchor: f64 = 0.0;
    for &y in &[0.5, 1.0, 5.0, 20.0, 100.0] {
        for &lam in &[0.0, 0.1, 1.0] {
            let mu = -lam * y;
            let logs: Vec<f64> = (0..=201).map(|n| jn(n, y, mu)).collect();
            // y²J_1 - μJ_0 = 1, evaluated as J_0 (y² J_1/J_0 - μ).
            let anchor = logs[0].exp() * (y * y * (logs[1] - logs[0]).exp() - mu);
            worst_anchor = worst_anchor.max((anchor - 1.0).abs());
            for n in 1..=200 {
                let nf = n as f64;
                let prev = (logs[n - 1] - logs[n]).exp();
                let next = (logs[n + 1] - logs[n]).exp();
                let scale = [nf, nf * prev, y * y * next, mu.abs()].into_iter().fold(0.0, f64::max);
                let residual = nf * (1.0 - prev) + y * y * next - mu;
                worst_rec = worst_rec.max(residual.abs() / scale);
            }
        }
    }
    outcome(
        worst_rec <= 1e-10 && worst_anchor <= 1e-10,
        format!("max recurrence rel. residual {worst_rec:.2e}, max anchor abs. error {worst_anchor:.2e}"),
    )
}

fn criterion_2() -> Outcome {
    let errs = [
        (jn(0, 1.0, 0.0).exp() - (E - 1.0)).abs(),
        (jn(1, 1.0, 0.0).exp() - 1.0).abs(),
        (jn(2, 1.0, 0.0).exp() - (E - 2.0)).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("max error {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for n in 20..=200usize {
        let nf = n as f64;
        let r = (log_an(n, 1e6, 1e-4).unwrap() + nf / 2.0 - nf / 2.0 * nf.ln()).exp() / PI.sqrt();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    outcome(
        lo >= 0.98 && hi <= 1.02,
        format!("a_n e^(n/2-(n/2)ln n)/sqrt(pi) in [{lo:.5}, {hi:.5}] for n = 20..200"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst_fd: f64 = 0.0;
    for &(c, g, l) in &[(7.0f64, 0.1f64, 0.05f64), (7.0, 0.2, 0.0829), (12.0, 1e-3, 0.3), (6.5, 0.5, 0.01)] {
        let p = ModelParams::new(c, g);
        let h = 1e-5 * l.max(1e-2);
        let fd = (eval_dispersion(&p, l + h).unwrap() - eval_dispersion(&p, l - h).unwrap()) / (2.0 * h);
        worst_fd = worst_fd.max((d_lambda_dispersion(&p, l).unwrap() / fd - 1.0).abs());
    }
    let mut worst_zero: f64 = 0.0;
    for &c in &[2.0 * PI, 7.0, 4.0 * PI] {
        let d = d_lambda_dispersion(&ModelParams::new(c, 1e-6), 0.0).unwrap();
        worst_zero = worst_zero.max((d / (c / (2.0 * (2.0 * PI).sqrt())) - 1.0).abs());
    }
    let mut gaps = Vec::new();
    for &gamma in &[1e-2, 1e-3, 1e-4, 1e-5] {
        let r = find_root(&ModelParams::new(4.0 * PI, gamma), (0.0, 2.0)).unwrap();
        gaps.push((r.lambda - VLASOV_ROOT_4PI).abs());
    }
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(
        worst_fd <= 1e-6 && worst_zero <= 1e-3 && monotone,
        format!(
            "FD rel. error {worst_fd:.2e}; d_lambda at 0 rel. error {worst_zero:.2e}; gaps to Vlasov root {}",
            gaps.iter().map(|g| format!("{g:.2e}")).collect::<Vec<_>>().join(" > ")
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for (gamma, lambdas) in REGIME_GRID {
        for lambda in lambdas {
            let c = c_for_growth_rate(gamma, lambda).unwrap();
            let e = EigenSystem::new(&ModelParams::new(c, gamma), lambda, default_truncation(gamma, lambda)).unwrap();
            worst_res = worst_res.max(e.eigen_residual()).max(e.adjoint_residual());
            let closed = e.inner_closed_form();
            worst_closed = worst_closed.max((e.inner - closed).norm() / closed.norm());
            worst_norm = worst_norm.max((e.inner - 1.0).norm());
        }
    }
    outcome(
        worst_res <= 1e-8 && worst_closed <= 1e-6 && worst_norm <= 1e-6,
        format!("max residual {worst_res:.2e}, closed-form rel. error {worst_closed:.2e}, |<G~,G> - 1| {worst_norm:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let lambdas = [0.05, 0.1, 0.2];
    let pts: Vec<(f64, f64)> = lambdas.iter().map(|&l| (l, breakdown(1e-8, l).c3.norm())).collect();
    let scaled: Vec<f64> = pts.iter().map(|(l, c)| -c * l.powi(3)).collect();
    let s = slope(&pts);
    let within = scaled.iter().all(|v| (v / -0.25 - 1.0).abs() <= 0.1);
    outcome(
        within && (s + 3.0).abs() <= 0.1,
        format!(
            "c3 lambda^3 = {} at lambda = 0.05, 0.1, 0.2; slope {s:.3}",
            scaled.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let gammas = log_grid(1e-7, 1e-4, 4);
    let along_gamma: Vec<(f64, f64)> = gammas.iter().map(|&g| (g, breakdown(g, 1e-3).c3_1.norm())).collect();
    let lambdas = log_grid(1e-4, 1e-3, 4);
    let along_lambda: Vec<(f64, f64)> = lambdas.iter().map(|&l| (l, breakdown(1e-5, l).c3_1.norm())).collect();
    let sg = slope(&along_gamma);
    let sl = slope(&along_lambda);
    outcome(
        (sg + 4.0 / 3.0).abs() <= 0.15 && (sl - 1.0).abs() <= 0.15,
        format!("slope in gamma {sg:.4} (target -4/3), slope in lambda {sl:.4} (target 1)"),
    )
}

fn criterion_8() -> Outcome {
    let lambdas = log_grid(1e-5, 1e-3, 5);
    let values: Vec<(f64, f64)> = lambdas.iter().map(|&l| (l, breakdown(0.3, l).c3.norm())).collect();
    let max = values.iter().map(|v| v.1).fold(0.0, f64::max);
    let min = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let s = slope(&values);
    outcome(
        max / min < 2.0 && s > -0.1,
        format!("|c3| in [{min:.5}, {max:.5}] (ratio {:.4}), slope {s:.4}", max / min),
    )
}

fn criterion_9() -> Outcome {
    let large: Vec<(f64, f64)> = [0.05, 0.1, 0.2].iter().map(|&l| (l, breakdown(1e-8, l).c3_3.norm())).collect();
    let s_large = slope(&large);
    let small: Vec<(f64, f64)> = [1e-5, 1e-4, 1e-3]
        .iter()
        .map(|&l| (l, breakdown(0.3, l).c3_3_series.abs()))
        .collect();
    let s_small = slope(&small);
    let vanishing = small[0].1 < small[2].1;
    outcome(
        (s_large + 1.0).abs() <= 0.15 && (s_small - 1.0).abs() <= 0.15 && vanishing,
        format!("slope {s_large:.4} at gamma = 1e-8 (target -1); series slope {s_small:.4} at gamma = 0.3 (target 1)"),
    )
}

fn criterion_10() -> Outcome {
    let mut points: Vec<(f64, f64)> = REGIME_GRID
        .iter()
        .flat_map(|(g, ls)| ls.iter().map(move |l| (*g, *l)))
        .collect();
    points.extend(log_grid(1e-7, 1e-4, 4).into_iter().map(|g| (g, 1e-3)));
    points.extend(log_grid(1e-4, 1e-3, 4).into_iter().map(|l| (1e-5, l)));
    points.extend(log_grid(1e-5, 1e-3, 5).into_iter().map(|l| (0.3, l)));
    let ratios: Vec<f64> = points.iter().map(|&(g, l)| breakdown(g, l).c3_2_ratio).collect();
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        ratios.iter().all(|r| r.is_finite()),
        format!("|c3_2|/|c3_1 + c3_3| finite at {} points, range [{min:.3e}, {max:.3e}]", ratios.len()),
    )
}

fn criterion_11() -> Outcome {
    let c5_along = |gamma: f64, lambdas: &[f64]| -> f64 {
        let pts: Vec<(f64, f64)> = lambdas.iter().map(|&l| (l, breakdown(gamma, l).c5_partial.norm())).collect();
        slope(&pts)
    };
    let s1 = c5_along(1e-8, &[0.05, 0.1, 0.2]);
    let deep = c5_along(1e-11, &[0.01, 0.014, 0.02]);
    let sl = c5_along(1e-8, &[1e-6, 3e-6, 1e-5]);
    let along_gamma: Vec<(f64, f64)> = [1e-8, 3e-8, 1e-7]
        .iter()
        .map(|&g| (g, breakdown(g, 1e-5).c5_partial.norm()))
        .collect();
    let sg = slope(&along_gamma);
    outcome(
        (s1 + 7.0).abs() <= 0.3 && (sl - 1.5).abs() <= 0.3 && (sg + 17.0 / 6.0).abs() <= 0.3,
        format!(
            "regime I slope {s1:.3} at gamma = 1e-8 (target -7; {deep:.3} at gamma = 1e-11, lambda in [0.01, 0.02]); \
             regime II slopes {sl:.3} in lambda (target 1.5), {sg:.3} in gamma (target -17/6)"
        ),
    )
}

fn criterion_12() -> Outcome {
    let lam: f64 = 1e-3;
    let plus = lam.powi(3) * dirichlet_phi(0.5, SeriesSign::Plus, lam).unwrap();
    let odd = lam.powi(3) * dirichlet_phi_odd(0.5, lam).unwrap();
    let minus: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&l| dirichlet_phi(0.5, SeriesSign::Minus, l).unwrap())
        .collect();
    let drift = minus
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / w[0].abs().max(w[1].abs()))
        .fold(0.0, f64::max);
    outcome(
        (plus / 4.0 - 1.0).abs() <= 0.01 && (odd / 2.0 - 1.0).abs() <= 0.01 && drift < 0.1,
        format!("lambda^3 phi+ = {plus:.5}, odd variant {odd:.5}, phi- drift per decade {drift:.3e}"),
    )
}

fn criterion_13() -> Outcome {
    let (gamma, lambda) = (0.1, 0.05);
    let params = ModelParams::new(c_for_growth_rate(gamma, lambda).unwrap(), gamma);
    let n = default_truncation(gamma, lambda);
    let cfg = SimConfig {
        k_max: 4,
        dt: recommended_dt(4, n),
        eps0: 1e-8,
        ..SimConfig::for_growth_rate(params, lambda)
    };
    let rate = run(&cfg).unwrap().fitted_growth_rate.unwrap();

    let n = 60;
    let slowest = Schur::new(dense_l(0.0, 1.0, 1, n))
        .eigenvalues()
        .unwrap()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let cfg = SimConfig {
        params: ModelParams::new(0.0, 1.0),
        k_max: 1,
        n_max: n,
        dt: recommended_dt(1, n),
        t_end: 12.0,
        eps0: 1.0,
        record_every: 1,
        nonlinear: false,
    };
    let mut state = SimState::zeros(1, n);
    state.modes[1][0] = Complex64::new(1.0, 0.0);
    let mut mid = None;
    while state.t < cfg.t_end {
        state = step(&state, &cfg).unwrap();
        if mid.is_none() && state.t >= 6.0 {
            mid = Some((state.t, state.modes[1][0].norm().ln()));
        }
    }
    let (t0, l0) = mid.unwrap();
    let decay = (state.modes[1][0].norm().ln() - l0) / (state.t - t0);
    outcome(
        (rate / lambda - 1.0).abs() <= 0.02 && (decay / slowest - 1.0).abs() <= 0.02,
        format!("growth rate {rate:.6} (target {lambda}); c = 0 decay {decay:.5} vs slowest eigenvalue {slowest:.5}"),
    )
}

fn criterion_14() -> Outcome {
    let (gamma, lambda) = (0.3, 0.02);
    let params = ModelParams::new(c_for_growth_rate(gamma, lambda).unwrap(), gamma);
    let report = run(&SimConfig::for_growth_rate(params, lambda)).unwrap();
    let predicted = breakdown(gamma, lambda).c3;
    let fitted = report.fitted_c3.unwrap();
    let rel = (fitted.re - predicted.re).abs() / predicted.re.abs();
    outcome(
        rel <= 0.25,
        format!("fitted c3 {:.5} vs coefficient module {:.5} (rel. {rel:.3})", fitted.re, predicted.re),
    )
}

fn criterion_15() -> Outcome {
    let gamma = 0.5;
    let pts: Vec<(f64, f64)> = [0.005, 0.01, 0.02, 0.05]
        .iter()
        .map(|&lambda| {
            let params = ModelParams::new(c_for_growth_rate(gamma, lambda).unwrap(), gamma);
            (lambda, run(&SimConfig::for_growth_rate(params, lambda)).unwrap().a_sat)
        })
        .collect();
    let s = slope(&pts);
    outcome(
        (s - 0.5).abs() <= 0.1,
        format!(
            "A_sat = {} at lambda = 0.005, 0.01, 0.02, 0.05; slope {s:.4}",
            pts.iter().map(|p| format!("{:.5}", p.1)).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_16() -> Outcome {
    let mut worst: f64 = 0.0;
    for &(gamma, lambda) in &[(0.3, 0.02), (0.5, 0.05), (0.2, 0.0829)] {
        let c = c_for_growth_rate(gamma, lambda).unwrap();
        let n = 100;
        let e = EigenSystem::new(&ModelParams::new(c, gamma), lambda, n).unwrap();
        let mc = ManifoldCoefficients::compute(&e).unwrap();
        let b = compute_c3(&e, &mc).unwrap();
        let r = dense_reference(c, gamma, lambda, n);
        let gtilde = e.gtilde.scale(Complex64::new(1.0, 0.0) / e.inner.conj());
        worst = worst
            .max(rel_diff(&e.g, &r.g))
            .max(rel_diff(&gtilde, &r.gtilde))
            .max(rel_diff(&mc.u, &r.u))
            .max(rel_diff(&mc.h2, &r.h2))
            .max((b.c3 - r.c3).norm() / r.c3.norm());
    }
    outcome(worst <= 1e-8, format!("max rel. difference {worst:.2e} over G, G~, U, H2, c3"))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 16] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
        (13, criterion_13),
        (14, criterion_14),
        (15, criterion_15),
        (16, criterion_16),
    ];
    let mut unexpected = Vec::new();
    for (id, check) in criteria {
        let start = Instant::now();
        let o = check();
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {id:>2}: {} ({secs:.1} s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass && !KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
