//! Nonlinear time integration of the Fourier-Hermite form
//!
//! ```text
//! ∂t ĝ_k = L_k ĝ_k + N̂_k,   N̂_k = Σ_{l≠k} (i c √2 π^{1/4}/(k-l)) (ĝ_{k-l})_0 a† ĝ_l,
//! ```
//!
//! for modes `k = 0..=K` (negative modes are conjugates) and Hermite orders
//! `n = 0..=N`. The damping `-γ n` is integrated exactly and the rest by
//! classical Runge-Kutta in the integrating-factor variable (Lawson RK4).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::dispersion::{eval_dispersion, find_root, DispersionRoot, ModelParams};
use crate::eigensystem::EigenSystem;
use crate::error::{Error, Result};
use crate::manifold::{compute_c3, ManifoldCoefficients};
use crate::spectral::{default_truncation, SpectralVector};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest accepted `|ĝ_k[N]|/max_n |ĝ_k[n]|` during a run.
pub const TAIL_LIMIT: f64 = 1e-4;

/// Largest accepted growth of `‖ĝ‖` over a single step.
pub const STEP_GROWTH_LIMIT: f64 = 2.0;

/// `dt · 2K√(N+1)` must stay inside the RK4 stability interval on the imaginary axis.
const RK4_IMAGINARY_LIMIT: f64 = 2.8;

/// Run configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    /// Fourier truncation `K` (modes `-K..=K`).
    pub k_max: usize,
    /// Hermite truncation `N`.
    pub n_max: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Initial amplitude along the unstable eigenvector.
    pub eps0: f64,
    /// Steps between recorded samples.
    pub record_every: usize,
    /// Disable to integrate the linearized equation only.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
}

fn default_true() -> bool {
    true
}

impl SimConfig {
    /// Configuration with `K = 8`, `N` from [`default_truncation`] and the step bound `0.5/(K√(2N))`.
    pub fn for_growth_rate(params: ModelParams, lambda: f64) -> Self {
        let k_max = 8;
        let n_max = default_truncation(params.gamma, lambda);
        SimConfig {
            params,
            k_max,
            n_max,
            dt: recommended_dt(k_max, n_max),
            t_end: 40.0 / lambda,
            eps0: 1e-5,
            record_every: 10,
            nonlinear: true,
        }
    }

    /// Checks field ranges and the RK4 step-size limit (`K >= 2` is checked by [`simulate`]).
    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if !(p.c >= 0.0 && p.c.is_finite()) {
            return Err(Error::Config(format!("params.c must be finite and >= 0, got {}", p.c)));
        }
        if !(p.gamma >= 0.0 && p.gamma.is_finite()) {
            return Err(Error::Config(format!("params.gamma must be finite and >= 0, got {}", p.gamma)));
        }
        if self.k_max < 1 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if self.n_max < 2 {
            return Err(Error::Config(format!("n_max must be at least 2, got {}", self.n_max)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(Error::Config(format!("eps0 must be positive, got {}", self.eps0)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        let stiffness = self.dt * 2.0 * self.k_max as f64 * ((self.n_max + 1) as f64).sqrt();
        if stiffness > RK4_IMAGINARY_LIMIT {
            return Err(Error::CflViolation {
                t: 0.0,
                growth: stiffness,
            });
        }
        Ok(())
    }
}

/// `0.5/(K√(2N))`.
pub fn recommended_dt(k_max: usize, n_max: usize) -> f64 {
    0.5 / (k_max as f64 * (2.0 * n_max as f64).sqrt())
}

/// One recorded sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub phi1: Complex64,
    pub abs_phi2: f64,
    /// Amplitude `A = ⟨G̃, ĝ_1⟩/⟨G̃, G⟩` (equal to `φ̂_1` when there is no unstable eigenvector).
    pub amplitude: Complex64,
    /// `dA/dt` from the full right-hand side.
    pub d_amplitude: Complex64,
    /// Largest Hermite tail ratio over the populated modes.
    pub tail_ratio: f64,
    /// `Σ_k ‖ĝ_k‖²` over `k = -K..=K`.
    pub energy: f64,
}

/// Spectral state: modes `k = 0..=K` and time. Recorded samples live in [`Trajectory`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    pub modes: Vec<SpectralVector>,
}

impl SimState {
    pub fn zeros(k_max: usize, n_max: usize) -> Self {
        SimState {
            t: 0.0,
            modes: vec![SpectralVector::zeros(n_max); k_max + 1],
        }
    }

    pub fn k_max(&self) -> usize {
        self.modes.len() - 1
    }

    pub fn n_max(&self) -> usize {
        self.modes[0].n_max()
    }

    /// `ĝ_k` for any `|k| <= K`, using `ĝ_{-k} = conj(ĝ_k)`.
    pub fn mode(&self, k: i64) -> SpectralVector {
        if k >= 0 {
            self.modes[k as usize].clone()
        } else {
            self.modes[(-k) as usize].conj()
        }
    }

    /// Hermite coefficients of `g(x, ·) = Σ_{|k|<=K} ĝ_k e^{ikx}` at position `x`.
    pub fn coefficients_at(&self, x: f64) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.n_max() + 1];
        let kk = self.k_max() as i64;
        for k in -kk..=kk {
            let phase = Complex64::from_polar(1.0, k as f64 * x);
            for (o, v) in out.iter_mut().zip(&self.mode(k).coeffs) {
                *o += phase * v;
            }
        }
        out
    }

    /// Largest `|ĝ_k[N]|/max_n |ĝ_k[n]|` over modes carrying at least `1e-12` of the largest mode.
    pub fn tail_ratio(&self) -> f64 {
        let peak = self.modes.iter().map(|m| m.max_abs()).fold(0.0, f64::max);
        self.modes
            .iter()
            .filter(|m| m.max_abs() > 1e-12 * peak)
            .map(|m| m.tail_ratio())
            .fold(0.0, f64::max)
    }

    /// `Σ_{|k|<=K} ‖ĝ_k‖²`.
    pub fn energy(&self) -> f64 {
        self.modes
            .iter()
            .enumerate()
            .map(|(k, m)| if k == 0 { 1.0 } else { 2.0 } * m.norm().powi(2))
            .sum()
    }
}

/// `κ = i c √2 π^{1/4}`.
fn coupling(c: f64) -> Complex64 {
    I * (c * SQRT_2 * PI.powf(0.25))
}

/// `φ̂_k = -c√2π^{1/4} (ĝ_k)_0/k²`, which gives `φ̂_1 = 1` for `G` in mode 1.
pub fn order_parameter(state: &SimState, params: &ModelParams, k: i32) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::Domain("the order parameter is defined for k != 0".into()));
    }
    if k.unsigned_abs() as usize > state.k_max() {
        return Err(Error::Domain(format!("mode {k} is outside the truncation K = {}", state.k_max())));
    }
    let g0 = state.mode(k as i64)[0];
    Ok(g0 * (-params.c * SQRT_2 * PI.powf(0.25) / (k as f64 * k as f64)))
}

/// Flat `(K+1) × (N+1)` workspace for the right-hand side.
struct Kernel {
    k_max: usize,
    len: usize,
    c: f64,
    nonlinear: bool,
    sqrt_n: Vec<f64>,
    raised: Vec<Complex64>,
}

impl Kernel {
    fn new(params: &ModelParams, k_max: usize, n_max: usize, nonlinear: bool) -> Self {
        let len = n_max + 1;
        Kernel {
            k_max,
            len,
            c: params.c,
            nonlinear,
            sqrt_n: (0..len).map(|n| (n as f64).sqrt()).collect(),
            raised: vec![ZERO; (k_max + 1) * len],
        }
    }

    /// Writes `(L ĝ + N̂) + γ n ĝ` (everything except the damping) into `out`.
    fn undamped_rhs(&mut self, g: &[Complex64], out: &mut [Complex64]) {
        let len = self.len;
        for k in 0..=self.k_max {
            let v = &g[k * len..(k + 1) * len];
            let o = &mut out[k * len..(k + 1) * len];
            if k == 0 {
                o.fill(ZERO);
                continue;
            }
            let kf = k as f64;
            for n in 0..len {
                let mut s = ZERO;
                if n + 1 < len {
                    s += v[n + 1] * self.sqrt_n[n + 1];
                }
                if n > 0 {
                    s += v[n - 1] * self.sqrt_n[n];
                }
                o[n] = Complex64::new(kf * s.im, -kf * s.re);
            }
            if len > 1 {
                o[1] += I * (self.c / (2.0 * PI * kf)) * v[0];
            }
        }
        if self.nonlinear {
            self.add_nonlinear(g, out);
        }
    }

    fn add_nonlinear(&mut self, g: &[Complex64], out: &mut [Complex64]) {
        let len = self.len;
        let kk = self.k_max as i64;
        for l in 0..=self.k_max {
            let r = &mut self.raised[l * len..(l + 1) * len];
            r[0] = ZERO;
            for n in 1..len {
                r[n] = g[l * len + n - 1] * self.sqrt_n[n];
            }
        }
        let kappa = coupling(self.c);
        let head = |m: i64| -> Complex64 {
            if m >= 0 {
                g[m as usize * len]
            } else {
                g[(-m) as usize * len].conj()
            }
        };
        for k in 0..=kk {
            let o = &mut out[k as usize * len..(k as usize + 1) * len];
            let mut acc0 = vec![ZERO; if k == 0 { len } else { 0 }];
            for l in -kk..=kk {
                let m = k - l;
                if l == k || m.abs() > kk {
                    continue;
                }
                let coef = kappa / m as f64 * head(m);
                if coef == ZERO {
                    continue;
                }
                let r = &self.raised[l.unsigned_abs() as usize * len..(l.unsigned_abs() as usize + 1) * len];
                let target: &mut [Complex64] = if k == 0 { &mut acc0 } else { &mut *o };
                if l >= 0 {
                    for (t, x) in target.iter_mut().zip(r) {
                        *t += coef * x;
                    }
                } else {
                    for (t, x) in target.iter_mut().zip(r) {
                        *t += coef * x.conj();
                    }
                }
            }
            if k == 0 {
                for (t, a) in o.iter_mut().zip(&acc0) {
                    *t += Complex64::new(a.re, 0.0);
                }
            }
        }
    }
}

/// Per-mode `N̂_k` for `k = 0..=K`; `N̂_0` is real by the `l ↔ -l` pairing and stored as such.
pub fn nonlinear_rhs(state: &SimState, params: &ModelParams) -> Vec<SpectralVector> {
    let k_max = state.k_max();
    let n_max = state.n_max();
    let mut kernel = Kernel::new(params, k_max, n_max, true);
    let flat = flatten(state);
    let mut out = vec![ZERO; flat.len()];
    kernel.add_nonlinear(&flat, &mut out);
    unflatten(&out, k_max, n_max)
}

/// Per-mode `L_k ĝ_k + N̂_k` (or `L_k ĝ_k` alone when `nonlinear` is false).
pub fn full_rhs(state: &SimState, params: &ModelParams, nonlinear: bool) -> Vec<SpectralVector> {
    let k_max = state.k_max();
    let n_max = state.n_max();
    let mut kernel = Kernel::new(params, k_max, n_max, nonlinear);
    let flat = flatten(state);
    let mut out = vec![ZERO; flat.len()];
    kernel.undamped_rhs(&flat, &mut out);
    let len = n_max + 1;
    for (i, o) in out.iter_mut().enumerate() {
        *o -= flat[i] * (params.gamma * (i % len) as f64);
    }
    unflatten(&out, k_max, n_max)
}

fn flatten(state: &SimState) -> Vec<Complex64> {
    state.modes.iter().flat_map(|m| m.coeffs.iter().copied()).collect()
}

fn unflatten(flat: &[Complex64], k_max: usize, n_max: usize) -> Vec<SpectralVector> {
    (0..=k_max)
        .map(|k| SpectralVector::from_coeffs(flat[k * (n_max + 1)..(k + 1) * (n_max + 1)].to_vec()))
        .collect()
}

/// Lawson RK4 stepper with preallocated stages.
struct Stepper {
    kernel: Kernel,
    dt: f64,
    half: Vec<f64>,
    full: Vec<f64>,
    stage: Vec<Complex64>,
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
}

impl Stepper {
    fn new(cfg: &SimConfig) -> Self {
        let len = cfg.n_max + 1;
        let total = (cfg.k_max + 1) * len;
        let half: Vec<f64> = (0..total)
            .map(|i| (-cfg.params.gamma * (i % len) as f64 * cfg.dt / 2.0).exp())
            .collect();
        let full = half.iter().map(|e| e * e).collect();
        Stepper {
            kernel: Kernel::new(&cfg.params, cfg.k_max, cfg.n_max, cfg.nonlinear),
            dt: cfg.dt,
            half,
            full,
            stage: vec![ZERO; total],
            k1: vec![ZERO; total],
            k2: vec![ZERO; total],
            k3: vec![ZERO; total],
            k4: vec![ZERO; total],
        }
    }

    fn advance(&mut self, g: &mut [Complex64], t: f64) -> Result<()> {
        let dt = self.dt;
        let before: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        self.kernel.undamped_rhs(g, &mut self.k1);
        for i in 0..g.len() {
            self.stage[i] = self.half[i] * (g[i] + 0.5 * dt * self.k1[i]);
        }
        self.kernel.undamped_rhs(&self.stage, &mut self.k2);
        for i in 0..g.len() {
            self.stage[i] = self.half[i] * g[i] + 0.5 * dt * self.k2[i];
        }
        self.kernel.undamped_rhs(&self.stage, &mut self.k3);
        for i in 0..g.len() {
            self.stage[i] = self.full[i] * g[i] + dt * self.half[i] * self.k3[i];
        }
        self.kernel.undamped_rhs(&self.stage, &mut self.k4);
        for i in 0..g.len() {
            g[i] = self.full[i] * g[i]
                + dt / 6.0 * (self.full[i] * self.k1[i] + 2.0 * self.half[i] * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
        let after: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        let growth = if before > 0.0 { (after / before).sqrt() } else { 1.0 };
        if !after.is_finite() || growth > STEP_GROWTH_LIMIT {
            return Err(Error::CflViolation { t, growth });
        }
        Ok(())
    }
}

/// Advances `state` by one step of `cfg.dt`. Identical inputs give bit-identical outputs.
pub fn step(state: &SimState, cfg: &SimConfig) -> Result<SimState> {
    cfg.validate()?;
    if state.k_max() != cfg.k_max || state.n_max() != cfg.n_max {
        return Err(Error::Config(format!(
            "state shape (K = {}, N = {}) does not match the configuration (K = {}, N = {})",
            state.k_max(),
            state.n_max(),
            cfg.k_max,
            cfg.n_max
        )));
    }
    let mut flat = flatten(state);
    Stepper::new(cfg).advance(&mut flat, state.t)?;
    Ok(SimState {
        t: state.t + cfg.dt,
        modes: unflatten(&flat, cfg.k_max, cfg.n_max),
    })
}

/// The unstable root of mode 1, or `None` when `c` is at or below the threshold.
pub fn unstable_root(params: &ModelParams) -> Result<Option<DispersionRoot>> {
    let p = params.with_mode(1);
    if eval_dispersion(&p, 0.0)? >= 0.0 {
        return Ok(None);
    }
    let mut hi = 0.5;
    while eval_dispersion(&p, hi)? <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Domain(format!("no bracket for the unstable root at c = {}", p.c)));
        }
    }
    find_root(&p, (0.0, hi)).map(Some)
}

/// How the saturation amplitude was identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaturationMethod {
    /// First local maximum of `|φ̂_1|` in time.
    FirstLocalMax,
    /// Logarithmic growth rate of `|φ̂_1|` fell below `1e-3 λ` without a maximum.
    Plateau,
}

/// Diagnostics attached to a [`RunReport`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodFlags {
    pub saturation: SaturationMethod,
    pub growth_fit_points: usize,
    pub c3_fit_points: usize,
    pub max_tail_ratio: f64,
    pub steps: u64,
}

/// Outcome of a saturating run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Unstable root `λ` of the dispersion relation at the configured `c`.
    pub lambda: f64,
    /// Slope of `ln|φ̂_1|` while `|φ̂_1|` grows from `10 eps0` to `10³ eps0`.
    pub fitted_growth_rate: Option<f64>,
    /// Slope of `(dA/dt)/A` against `|A|²` over `|A| ∈ [A_sat/10, A_sat/2]`.
    pub fitted_c3: Option<Complex64>,
    /// Intercept of the same fit (an estimate of `λ`).
    pub fitted_c3_intercept: Option<Complex64>,
    pub a_sat: f64,
    pub t_sat: f64,
    /// `c3` from the coefficient modules at the same truncation.
    pub predicted_c3: Complex64,
    /// `√(λ/|Re c3|)` when `Re c3 < 0`.
    pub predicted_a_sat: Option<f64>,
    pub method_flags: MethodFlags,
    pub config: SimConfig,
}

/// Recorded history with the data needed to analyse it.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: SimConfig,
    pub root: Option<DispersionRoot>,
    pub predicted_c3: Option<Complex64>,
    pub samples: Vec<Sample>,
    pub steps: u64,
    pub saturation: Option<(usize, SaturationMethod)>,
}

/// Initial state `eps0 · G` in mode 1 (with `G` the truncated eigenvector), or
/// `eps0 · G_0 e_0` when there is no unstable root (`eps0 · e_0` at `c = 0`).
pub fn initial_state(cfg: &SimConfig, eig: Option<&EigenSystem>) -> SimState {
    let mut state = SimState::zeros(cfg.k_max, cfg.n_max);
    let eps = Complex64::new(cfg.eps0, 0.0);
    match eig {
        Some(e) => state.modes[1] = e.g.scale(eps),
        None if cfg.params.c > 0.0 => state.modes[1][0] = eps * crate::eigensystem::g0_normalization(cfg.params.c),
        None => state.modes[1][0] = eps,
    }
    state
}

fn sample(state: &SimState, cfg: &SimConfig, eig: Option<&EigenSystem>) -> Result<Sample> {
    let phi1 = order_parameter(state, &cfg.params, 1)?;
    let abs_phi2 = if cfg.k_max >= 2 { order_parameter(state, &cfg.params, 2)?.norm() } else { 0.0 };
    let rhs1 = full_rhs(state, &cfg.params, cfg.nonlinear).swap_remove(1);
    let (amplitude, d_amplitude) = match eig {
        Some(e) => (
            e.gtilde.inner(&state.modes[1]) / e.inner,
            e.gtilde.inner(&rhs1) / e.inner,
        ),
        None => (phi1, rhs1[0] * (-cfg.params.c * SQRT_2 * PI.powf(0.25))),
    };
    Ok(Sample {
        t: state.t,
        phi1,
        abs_phi2,
        amplitude,
        d_amplitude,
        tail_ratio: state.tail_ratio(),
        energy: state.energy(),
    })
}

/// Integrates from the eigenvector initial condition until the first local maximum
/// of `|φ̂_1|`, a plateau, or `t_end`.
pub fn simulate(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let root = unstable_root(&cfg.params)?;
    let (eig, predicted_c3) = match &root {
        Some(r) => {
            let required = default_truncation(cfg.params.gamma, r.lambda);
            if cfg.n_max < required {
                return Err(Error::Config(format!(
                    "n_max = {} is below the eigensystem truncation {required} for lambda = {}",
                    cfg.n_max, r.lambda
                )));
            }
            if cfg.k_max < 2 {
                return Err(Error::Config("k_max must be at least 2 for a nonlinear run".into()));
            }
            let eig = EigenSystem::new(&cfg.params.with_mode(1), r.lambda, cfg.n_max)?;
            let mc = ManifoldCoefficients::compute(&eig)?;
            let c3 = compute_c3(&eig, &mc)?.c3;
            (Some(eig), Some(c3))
        }
        None => (None, None),
    };
    let lambda = root.map(|r| r.lambda);
    let mut state = initial_state(cfg, eig.as_ref());
    let mut flat = flatten(&state);
    let mut stepper = Stepper::new(cfg);
    let mut samples = vec![sample(&state, cfg, eig.as_ref())?];
    let mut steps: u64 = 0;
    let total_steps = (cfg.t_end / cfg.dt).ceil() as u64;
    let mut saturation = None;
    while steps < total_steps {
        stepper.advance(&mut flat, state.t)?;
        steps += 1;
        state.t = steps as f64 * cfg.dt;
        if steps % cfg.record_every as u64 != 0 && steps != total_steps {
            continue;
        }
        state.modes = unflatten(&flat, cfg.k_max, cfg.n_max);
        let s = sample(&state, cfg, eig.as_ref())?;
        if s.tail_ratio > TAIL_LIMIT {
            return Err(Error::UnderResolved {
                t: s.t,
                tail_ratio: s.tail_ratio,
            });
        }
        samples.push(s);
        if let Some(lam) = lambda {
            saturation = detect_saturation(&samples, cfg.eps0, lam);
            if saturation.is_some() {
                break;
            }
        }
    }
    Ok(Trajectory {
        config: *cfg,
        root,
        predicted_c3,
        samples,
        steps,
        saturation,
    })
}

/// Index and method of saturation in the recorded samples, if reached.
fn detect_saturation(samples: &[Sample], eps0: f64, lambda: f64) -> Option<(usize, SaturationMethod)> {
    let n = samples.len();
    if n < 3 {
        return None;
    }
    let a = |i: usize| samples[i].phi1.norm();
    let j = n - 2;
    if a(j) > 10.0 * eps0 && a(j) > a(j - 1) && a(j) >= a(j + 1) {
        return Some((j, SaturationMethod::FirstLocalMax));
    }
    // Plateau: average logarithmic growth over the last 1/λ below 1e-3 λ.
    let last = &samples[n - 1];
    if a(n - 1) <= 10.0 * eps0 {
        return None;
    }
    let window = 1.0 / lambda;
    let start = samples.iter().rposition(|s| s.t <= last.t - window)?;
    if a(start) <= 10.0 * eps0 {
        return None;
    }
    let rate = (a(n - 1) / a(start)).ln() / (last.t - samples[start].t);
    if rate < 1e-3 * lambda {
        return Some((n - 1, SaturationMethod::Plateau));
    }
    None
}

/// Least-squares line `y = a + b x`; `None` for fewer than three points.
fn line_fit<T>(points: &[(f64, T)]) -> Option<(T, T)>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::iter::Sum,
{
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() * (1.0 / n);
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: T = points.iter().map(|p| (p.1 - my) * (p.0 - mx)).sum();
    let slope = sxy * (1.0 / sxx);
    Some((my - slope * mx, slope))
}

/// Fits and saturation diagnostics of a recorded trajectory.
pub fn analyse(traj: &Trajectory) -> Result<RunReport> {
    let cfg = &traj.config;
    let samples = &traj.samples;
    let last = samples.last().expect("a trajectory has at least one sample");
    let (Some(root), Some((i_sat, method))) = (traj.root, traj.saturation) else {
        let first = samples[0].phi1.norm();
        let trend = if last.phi1.norm() < first { "decaying" } else { "growing" };
        return Err(Error::NoSaturation {
            t_end: last.t,
            final_amplitude: last.phi1.norm(),
            trend: format!(
                "{trend}: |phi_1| went from {first:e} to {:e}{}",
                last.phi1.norm(),
                if traj.root.is_none() { ", no unstable root at this coupling" } else { "" }
            ),
        });
    };
    let a_sat = samples[i_sat].phi1.norm();
    let t_sat = samples[i_sat].t;
    let before = &samples[..=i_sat];

    let lo = 10.0 * cfg.eps0;
    let hi = (1e3 * cfg.eps0).min(a_sat / 10.0);
    let growth: Vec<(f64, f64)> = before
        .iter()
        .filter(|s| s.phi1.norm() >= lo && s.phi1.norm() <= hi)
        .map(|s| (s.t, s.phi1.norm().ln()))
        .collect();
    let fitted_growth_rate = line_fit(&growth).map(|(_, b)| b);

    let c3_points: Vec<(f64, Complex64)> = before
        .iter()
        .filter(|s| s.amplitude.norm() >= a_sat / 10.0 && s.amplitude.norm() <= a_sat / 2.0)
        .map(|s| (s.amplitude.norm_sqr(), s.d_amplitude / s.amplitude))
        .collect();
    let c3_fit = line_fit(&c3_points);

    let predicted_c3 = traj.predicted_c3.unwrap_or(ZERO);
    let predicted_a_sat = (predicted_c3.re < 0.0).then(|| (root.lambda / -predicted_c3.re).sqrt());
    Ok(RunReport {
        lambda: root.lambda,
        fitted_growth_rate,
        fitted_c3: c3_fit.map(|(_, b)| b),
        fitted_c3_intercept: c3_fit.map(|(a, _)| a),
        a_sat,
        t_sat,
        predicted_c3,
        predicted_a_sat,
        method_flags: MethodFlags {
            saturation: method,
            growth_fit_points: growth.len(),
            c3_fit_points: c3_points.len(),
            max_tail_ratio: samples.iter().map(|s| s.tail_ratio).fold(0.0, f64::max),
            steps: traj.steps,
        },
        config: *cfg,
    })
}

/// [`simulate`] followed by [`analyse`].
pub fn run(cfg: &SimConfig) -> Result<RunReport> {
    analyse(&simulate(cfg)?)
}
