//! The `vfp` command line.
//!
//! Every command writes a [`RunManifest`](crate::output::RunManifest) into the
//! output directory (`--out`, default `vfp-runs`); data files are named by the
//! configuration hash so concurrent runs never collide.

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::asymptotics::{
    classify_regime, dirichlet_phi, log_log_slope, mellin_prediction, PowerLawFit, SeriesSign,
};
use crate::dispersion::{c_for_growth_rate, eval_dispersion, find_root, ModelParams};
use crate::eigensystem::EigenSystem;
use crate::error::{Error, Result};
use crate::manifold::{compute_c3_with, C3Options, LandauBreakdown, ManifoldCoefficients, SERIES_CHECK_MAX_N};
use crate::output::{configure_threads, csv_float, to_json_string, write_csv, write_json, RunDir};
use crate::simulator::{analyse, recommended_dt, simulate, unstable_root, SimConfig};
use crate::spectral::default_truncation;
use crate::special_functions::{eval_jn, DEFAULT_TOL};

#[derive(Parser, Debug)]
#[command(name = "vfp", version, about = "Unstable-manifold toolkit for the Vlasov-Newton-Fokker-Planck equation")]
pub struct Cli {
    /// Directory for data files and run manifests.
    #[arg(long, global = true, default_value = "vfp-runs")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate J_n(y, mu).
    Jn(JnArgs),
    /// Dispersion relation: roots, scans and the inverse map lambda -> c.
    #[command(subcommand)]
    Dispersion(DispersionCommand),
    /// Landau coefficients c3 and partial c5.
    #[command(subcommand)]
    C3(C3Command),
    /// Nonlinear Fourier-Hermite simulation.
    Simulate(SimulateArgs),
    /// Dirichlet series against their Mellin predictions.
    #[command(subcommand)]
    Mellin(MellinCommand),
    /// (gamma, lambda) regime classification.
    #[command(subcommand)]
    Regimes(RegimesCommand),
}

#[derive(Args, Debug, Serialize)]
pub struct JnArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true, requires = "mu", conflicts_with_all = ["gamma", "lambda"])]
    pub y: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "y")]
    pub mu: Option<f64>,
    /// With --lambda: y = 1/gamma, mu = -lambda/gamma.
    #[arg(long, requires = "lambda")]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "gamma")]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum DispersionCommand {
    /// Bracketed root of Lambda(gamma, .) for mode 1.
    Solve(SolveArgs),
    /// Lambda(gamma, lambda) on a grid of lambda, written as CSV.
    Scan(ScanArgs),
    /// The coupling c for which lambda is the mode-1 root.
    Invert(InvertArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub bracket: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub gamma: f64,
    /// Comma list, `lin:lo:hi:count` or `log:lo:hi:count`.
    #[arg(long)]
    pub lambda_grid: String,
}

#[derive(Args, Debug, Serialize)]
pub struct InvertArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub lambda: f64,
}

#[derive(Subcommand, Debug)]
pub enum C3Command {
    /// Landau breakdown at one point, printed as JSON.
    Compute(ComputeArgs),
    /// Landau breakdown over a (gamma, lambda) grid, written as CSV with fitted slopes.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ComputeArgs {
    #[arg(long)]
    pub gamma: f64,
    /// Growth rate; c is inferred. Give either --lambda or --c.
    #[arg(long, conflicts_with = "c", required_unless_present = "c")]
    pub lambda: Option<f64>,
    /// Coupling; lambda is the unstable root.
    #[arg(long)]
    pub c: Option<f64>,
    /// Hermite truncation (default from gamma and lambda).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Largest truncation for the closed-series cross-check.
    #[arg(long, default_value_t = SERIES_CHECK_MAX_N)]
    pub series_check_max_n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub gamma_grid: String,
    #[arg(long)]
    pub lambda_grid: String,
    #[arg(long, default_value_t = SERIES_CHECK_MAX_N)]
    pub series_check_max_n: usize,
}

/// Simulation flags; each overrides the corresponding field of `--config`.
#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    /// JSON file with SimConfig fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Target growth rate; sets c through the inverse dispersion map.
    #[arg(long, conflicts_with = "c")]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Integrate the linearized equation only.
    #[arg(long)]
    pub linear: bool,
}

#[derive(Subcommand, Debug)]
pub enum MellinCommand {
    /// Tabulate phi+, phi- and lambda^{2(alpha+1)} phi+ against the prediction.
    Check(MellinArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct MellinArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long)]
    pub lambda_grid: String,
}

#[derive(Subcommand, Debug)]
pub enum RegimesCommand {
    /// Regime label and cut-offs on a (gamma, lambda) grid.
    Map(RegimesArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct RegimesArgs {
    #[arg(long)]
    pub gamma_grid: String,
    #[arg(long)]
    pub lambda_grid: String,
}

/// Parses `a,b,c`, `lin:lo:hi:count` or `log:lo:hi:count`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("invalid grid '{spec}': {why}"));
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{s}' is not a number")));
    let values = if let Some(rest) = spec.strip_prefix("lin:").or_else(|| spec.strip_prefix("log:")) {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected kind:lo:hi:count"));
        }
        let lo = parse(parts[0])?;
        let hi = parse(parts[1])?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad("count must be a positive integer"))?;
        if count == 0 {
            return Err(bad("count must be a positive integer"));
        }
        let log = spec.starts_with("log:");
        if log && !(lo > 0.0 && hi > 0.0) {
            return Err(bad("log grids need positive end points"));
        }
        (0..count)
            .map(|i| {
                let f = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                if log {
                    (lo.ln() + f * (hi.ln() - lo.ln())).exp()
                } else {
                    lo + f * (hi - lo)
                }
            })
            .collect()
    } else {
        spec.split(',').map(parse).collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(bad("empty grid"));
    }
    Ok(values)
}

/// Parses `args` (including the program name) and runs the command, writing to stdout.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command, writing its primary output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Jn(a) => cmd_jn(&cli.out, a, out),
        Command::Dispersion(DispersionCommand::Solve(a)) => cmd_solve(&cli.out, a, out),
        Command::Dispersion(DispersionCommand::Scan(a)) => cmd_scan(&cli.out, a, out),
        Command::Dispersion(DispersionCommand::Invert(a)) => cmd_invert(&cli.out, a, out),
        Command::C3(C3Command::Compute(a)) => cmd_c3_compute(&cli.out, a, out),
        Command::C3(C3Command::Sweep(a)) => cmd_c3_sweep(&cli.out, a, out),
        Command::Simulate(a) => cmd_simulate(&cli.out, a, out),
        Command::Mellin(MellinCommand::Check(a)) => cmd_mellin(&cli.out, a, out),
        Command::Regimes(RegimesCommand::Map(a)) => cmd_regimes(&cli.out, a, out),
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    writeln!(out, "{}", to_json_string(value)?)?;
    Ok(())
}

#[derive(Serialize)]
struct JnOutput {
    n: usize,
    y: f64,
    mu: f64,
    log_value: f64,
    value_if_representable: Option<f64>,
    error_estimate: f64,
}

fn cmd_jn(dir: &Path, a: &JnArgs, out: &mut dyn Write) -> Result<()> {
    let (y, mu) = match (a.y, a.mu, a.gamma, a.lambda) {
        (Some(y), Some(mu), _, _) => (y, mu),
        (_, _, Some(g), Some(l)) => {
            if !(g > 0.0) {
                return Err(Error::Domain(format!("gamma must be positive, got {g}")));
            }
            (1.0 / g, -l / g)
        }
        _ => return Err(Error::Config("give either --y and --mu or --gamma and --lambda".into())),
    };
    let run = RunDir::create(dir, "jn", a)?;
    let j = eval_jn(a.n, y, mu, a.tol)?;
    let value = j.value();
    let result = JnOutput {
        n: a.n,
        y,
        mu,
        log_value: j.log_value,
        value_if_representable: (value.is_finite() && value > 0.0).then_some(value),
        error_estimate: j.quadrature_error,
    };
    emit(out, &result)?;
    run.finish()?;
    Ok(())
}

fn cmd_solve(dir: &Path, a: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    let run = RunDir::create(dir, "dispersion solve", a)?;
    let root = find_root(&ModelParams::new(a.c, a.gamma), (a.bracket[0], a.bracket[1]))?;
    emit(out, &root)?;
    run.finish()?;
    Ok(())
}

fn cmd_scan(dir: &Path, a: &ScanArgs, out: &mut dyn Write) -> Result<()> {
    let grid = parse_grid(&a.lambda_grid)?;
    let mut run = RunDir::create(dir, "dispersion scan", a)?;
    let params = ModelParams::new(a.c, a.gamma);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|l| eval_dispersion(&params, *l))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<String>> = grid
        .iter()
        .zip(&values)
        .map(|(l, v)| vec![csv_float(*l), csv_float(*v)])
        .collect();
    let path = run.output_path(".csv");
    write_csv(&path, &["lambda", "Lambda_value"], &rows)?;
    writeln!(out, "{}", path.display())?;
    run.finish()?;
    Ok(())
}

#[derive(Serialize)]
struct InvertOutput {
    gamma: f64,
    lambda: f64,
    c: f64,
}

fn cmd_invert(dir: &Path, a: &InvertArgs, out: &mut dyn Write) -> Result<()> {
    let run = RunDir::create(dir, "dispersion invert", a)?;
    let c = c_for_growth_rate(a.gamma, a.lambda)?;
    emit(
        out,
        &InvertOutput {
            gamma: a.gamma,
            lambda: a.lambda,
            c,
        },
    )?;
    run.finish()?;
    Ok(())
}

/// Landau breakdown at `(γ, λ)` with `c` from the inverse dispersion map.
pub fn breakdown_at(gamma: f64, lambda: f64, n_max: Option<usize>, opts: C3Options) -> Result<LandauBreakdown> {
    if !(gamma > 0.0) || !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "c3 needs gamma > 0 and lambda > 0, got gamma = {gamma}, lambda = {lambda}"
        )));
    }
    let c = c_for_growth_rate(gamma, lambda)?;
    let n = n_max.unwrap_or_else(|| default_truncation(gamma, lambda));
    let eig = EigenSystem::new(&ModelParams::new(c, gamma), lambda, n)?;
    let mc = ManifoldCoefficients::compute(&eig)?;
    compute_c3_with(&eig, &mc, opts)
}

fn cmd_c3_compute(dir: &Path, a: &ComputeArgs, out: &mut dyn Write) -> Result<()> {
    let run = RunDir::create(dir, "c3 compute", a)?;
    let opts = C3Options {
        series_check_max_n: a.series_check_max_n,
    };
    let breakdown = match (a.lambda, a.c) {
        (Some(l), _) => breakdown_at(a.gamma, l, a.n_max, opts)?,
        (None, Some(c)) => {
            let params = ModelParams::new(c, a.gamma);
            params.validate()?;
            if c == 0.0 {
                return Err(Error::DegenerateInput(
                    "c = 0 has no mean field and no instability, so c3 is not defined".into(),
                ));
            }
            let root = unstable_root(&params)?.ok_or_else(|| {
                Error::DegenerateInput(format!("c = {c} is at or below the instability threshold at gamma = {}", a.gamma))
            })?;
            let n = a.n_max.unwrap_or_else(|| default_truncation(a.gamma, root.lambda));
            let eig = EigenSystem::new(&params, root.lambda, n)?;
            let mc = ManifoldCoefficients::compute(&eig)?;
            compute_c3_with(&eig, &mc, opts)?
        }
        (None, None) => return Err(Error::Config("give --lambda or --c".into())),
    };
    emit(out, &breakdown)?;
    run.finish()?;
    Ok(())
}

/// Slopes of `|c3_1|`, `|c3|`, `|c3_3|` and `|c5_partial|` along one grid line.
#[derive(Debug, Serialize)]
pub struct SweepSlopes {
    /// `gamma` or `lambda`: the axis varied along the line.
    pub axis: String,
    /// Value of the other parameter on this line.
    pub fixed: f64,
    pub c3_1: Option<PowerLawFit>,
    pub c3: Option<PowerLawFit>,
    pub c3_3: Option<PowerLawFit>,
    pub c5_partial: Option<PowerLawFit>,
}

fn slopes_along(axis: &str, fixed: f64, line: &[(f64, &LandauBreakdown)]) -> SweepSlopes {
    let fit = |f: &dyn Fn(&LandauBreakdown) -> f64| {
        let pts: Vec<(f64, f64)> = line.iter().map(|(x, b)| (*x, f(b))).collect();
        log_log_slope(&pts).ok()
    };
    SweepSlopes {
        axis: axis.to_string(),
        fixed,
        c3_1: fit(&|b| b.c3_1.norm()),
        c3: fit(&|b| b.c3.norm()),
        c3_3: fit(&|b| b.c3_3.norm()),
        c5_partial: fit(&|b| b.c5_partial.norm()),
    }
}

fn cmd_c3_sweep(dir: &Path, a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let gammas = parse_grid(&a.gamma_grid)?;
    let lambdas = parse_grid(&a.lambda_grid)?;
    let mut run = RunDir::create(dir, "c3 sweep", a)?;
    let opts = C3Options {
        series_check_max_n: a.series_check_max_n,
    };
    let points: Vec<(f64, f64)> = gammas.iter().flat_map(|g| lambdas.iter().map(move |l| (*g, *l))).collect();
    let results: Vec<Result<LandauBreakdown>> = points
        .par_iter()
        .map(|(g, l)| breakdown_at(*g, *l, None, opts))
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut any_precision = false;
    let mut ok: Vec<&LandauBreakdown> = Vec::new();
    for ((g, l), r) in points.iter().zip(&results) {
        match r {
            Ok(b) => {
                rows.push(vec![
                    csv_float(*g),
                    csv_float(*l),
                    csv_float(b.c),
                    csv_float(b.c3_1.re),
                    csv_float(b.c3_2.re),
                    csv_float(b.c3_3.re),
                    csv_float(b.c3.re),
                    csv_float(b.c5_partial.norm()),
                    b.regime.to_string(),
                ]);
                ok.push(b);
            }
            Err(e) => {
                any_precision |= e.exit_code() == 3;
                failures.push(format!("(gamma = {g}, lambda = {l}): {e}"));
            }
        }
    }
    let csv_path = run.output_path(".csv");
    write_csv(
        &csv_path,
        &["gamma", "lambda", "c", "c3_1", "c3_2", "c3_3", "c3", "c5_partial", "regime"],
        &rows,
    )?;

    let mut by_gamma: BTreeMap<u64, Vec<(f64, &LandauBreakdown)>> = BTreeMap::new();
    let mut by_lambda: BTreeMap<u64, Vec<(f64, &LandauBreakdown)>> = BTreeMap::new();
    for b in &ok {
        by_gamma.entry(b.gamma.to_bits()).or_default().push((b.lambda, b));
        by_lambda.entry(b.lambda.to_bits()).or_default().push((b.gamma, b));
    }
    let mut slopes = Vec::new();
    for (g, line) in &by_gamma {
        if line.len() >= 2 {
            slopes.push(slopes_along("lambda", f64::from_bits(*g), line));
        }
    }
    for (l, line) in &by_lambda {
        if line.len() >= 2 {
            slopes.push(slopes_along("gamma", f64::from_bits(*l), line));
        }
    }
    let slopes_path = run.output_path("-slopes.json");
    write_json(&slopes_path, &slopes)?;
    emit(out, &slopes)?;
    run.finish()?;
    if !failures.is_empty() {
        let msg = format!("{} grid point(s) failed: {}", failures.len(), failures.join("; "));
        return Err(if any_precision { Error::Precision(msg) } else { Error::Domain(msg) });
    }
    Ok(())
}

/// `SimConfig` fields as read from a configuration file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimConfigFile {
    params: Option<ParamsFile>,
    k_max: Option<usize>,
    n_max: Option<usize>,
    dt: Option<f64>,
    t_end: Option<f64>,
    eps0: Option<f64>,
    record_every: Option<usize>,
    nonlinear: Option<bool>,
    lambda: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    c: Option<f64>,
    gamma: Option<f64>,
    #[allow(dead_code)]
    k: Option<i32>,
}

/// Merges the configuration file and flags into a full [`SimConfig`].
pub fn resolve_sim_config(a: &SimulateArgs) -> Result<SimConfig> {
    let file: SimConfigFile = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => SimConfigFile::default(),
    };
    let fp = file.params.unwrap_or_default();
    let gamma = a
        .gamma
        .or(fp.gamma)
        .ok_or_else(|| Error::Config("gamma: missing (flag --gamma or params.gamma)".into()))?;
    let lambda_target = a.lambda.or(if a.c.is_some() { None } else { file.lambda });
    let c = match (a.c, lambda_target, fp.c) {
        (Some(c), _, _) => c,
        (None, Some(l), _) => c_for_growth_rate(gamma, l)?,
        (None, None, Some(c)) => c,
        _ => return Err(Error::Config("c: missing (flag --c, --lambda, params.c or lambda)".into())),
    };
    let params = ModelParams::new(c, gamma);
    params.validate().map_err(|e| Error::Config(format!("params: {e}")))?;
    let lambda = match lambda_target {
        Some(l) => Some(l),
        None => unstable_root(&params)?.map(|r| r.lambda),
    };
    let k_max = a.k_max.or(file.k_max).unwrap_or(8);
    let n_max = a
        .n_max
        .or(file.n_max)
        .unwrap_or_else(|| default_truncation(gamma, lambda.unwrap_or(0.0)));
    let t_scale = lambda.map(|l| 1.0 / l).unwrap_or(50.0);
    Ok(SimConfig {
        params,
        k_max,
        n_max,
        dt: a.dt.or(file.dt).unwrap_or_else(|| recommended_dt(k_max, n_max)),
        t_end: a.t_end.or(file.t_end).unwrap_or(40.0 * t_scale),
        eps0: a.eps0.or(file.eps0).unwrap_or(1e-5),
        record_every: a.record_every.or(file.record_every).unwrap_or(10),
        nonlinear: if a.linear { false } else { file.nonlinear.unwrap_or(true) },
    })
}

fn cmd_simulate(dir: &Path, a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = resolve_sim_config(a)?;
    let mut run = RunDir::create(dir, "simulate", &cfg)?;
    let traj = simulate(&cfg)?;
    let rows: Vec<Vec<String>> = traj
        .samples
        .iter()
        .map(|s| {
            vec![
                csv_float(s.t),
                csv_float(s.phi1.re),
                csv_float(s.phi1.im),
                csv_float(s.phi1.norm()),
                csv_float(s.abs_phi2),
                csv_float(s.tail_ratio),
            ]
        })
        .collect();
    let csv_path = run.output_path(".csv");
    write_csv(
        &csv_path,
        &["t", "re_phi1", "im_phi1", "abs_phi1", "abs_phi2", "tail_ratio"],
        &rows,
    )?;
    let outcome = analyse(&traj);
    let report_path = run.output_path("-report.json");
    match &outcome {
        Ok(report) => {
            write_json(&report_path, report)?;
            emit(out, report)?;
        }
        Err(e) => {
            let failure = serde_json::json!({ "error": e.to_string(), "exit_code": e.exit_code(), "config": cfg });
            write_json(&report_path, &failure)?;
        }
    }
    run.finish()?;
    outcome.map(|_| ())
}

#[derive(Serialize)]
struct MellinSummary {
    alpha: f64,
    plus_exponent: f64,
    prediction: f64,
    smallest_lambda: f64,
    scaled_plus_at_smallest: f64,
    relative_error_at_smallest: f64,
    phi_minus_max_drift: f64,
    verdict: String,
}

fn cmd_mellin(dir: &Path, a: &MellinArgs, out: &mut dyn Write) -> Result<()> {
    let grid = parse_grid(&a.lambda_grid)?;
    let mut run = RunDir::create(dir, "mellin check", a)?;
    let pred = mellin_prediction(a.alpha)?;
    let rows: Vec<(f64, f64, f64, f64)> = grid
        .par_iter()
        .map(|l| {
            let plus = dirichlet_phi(a.alpha, SeriesSign::Plus, *l)?;
            let minus = dirichlet_phi(a.alpha, SeriesSign::Minus, *l)?;
            Ok((*l, plus, minus, l.powf(pred.plus_exponent) * plus))
        })
        .collect::<Result<_>>()?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(l, p, m, s)| {
            vec![csv_float(*l), csv_float(*p), csv_float(*m), csv_float(*s), csv_float(pred.plus_coefficient)]
        })
        .collect();
    let path = run.output_path(".csv");
    write_csv(
        &path,
        &["lambda", "phi_plus", "phi_minus", "scaled_plus", "prediction"],
        &csv_rows,
    )?;
    let smallest = rows
        .iter()
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .expect("grid is non-empty");
    let rel = (smallest.3 / pred.plus_coefficient - 1.0).abs();
    let minus_abs: Vec<f64> = rows.iter().map(|r| r.2.abs()).collect();
    let mmax = minus_abs.iter().cloned().fold(0.0, f64::max);
    let mmin = minus_abs.iter().cloned().fold(f64::INFINITY, f64::min);
    let drift = if mmax > 0.0 { (mmax - mmin) / mmax } else { 0.0 };
    let summary = MellinSummary {
        alpha: a.alpha,
        plus_exponent: pred.plus_exponent,
        prediction: pred.plus_coefficient,
        smallest_lambda: smallest.0,
        scaled_plus_at_smallest: smallest.3,
        relative_error_at_smallest: rel,
        phi_minus_max_drift: drift,
        verdict: if rel <= 0.02 { "converging".into() } else { "not yet converged".into() },
    };
    let summary_path = run.output_path("-summary.json");
    write_json(&summary_path, &summary)?;
    emit(out, &summary)?;
    run.finish()?;
    Ok(())
}

fn cmd_regimes(dir: &Path, a: &RegimesArgs, out: &mut dyn Write) -> Result<()> {
    let gammas = parse_grid(&a.gamma_grid)?;
    let lambdas = parse_grid(&a.lambda_grid)?;
    let mut run = RunDir::create(dir, "regimes map", a)?;
    let mut rows = Vec::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for g in &gammas {
        for l in &lambdas {
            if !(*g > 0.0 && *l > 0.0) {
                return Err(Error::Domain(format!("regimes need gamma > 0 and lambda > 0, got ({g}, {l})")));
            }
            let r = classify_regime(*g, *l);
            *counts.entry(r.regime.to_string()).or_default() += 1;
            rows.push(vec![
                csv_float(*g),
                csv_float(*l),
                r.regime.to_string(),
                csv_float(r.ratio_cubic),
                csv_float(r.ratio_three_quarter),
                csv_float(r.n1),
                csv_float(r.n2),
                csv_float(r.n3),
                csv_float(r.n4),
            ]);
        }
    }
    let path = run.output_path(".csv");
    write_csv(
        &path,
        &["gamma", "lambda", "regime", "gamma_over_lambda3", "gamma_over_lambda34", "n1", "n2", "n3", "n4"],
        &rows,
    )?;
    emit(out, &counts)?;
    run.finish()?;
    Ok(())
}
