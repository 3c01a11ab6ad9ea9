mod common;

use num_complex::Complex64;
use std::f64::consts::PI;

use common::{dense_l2, dense_reference, number, raising, rel_diff, to_dvector, I};
use nalgebra::DMatrix;
use vfp_manifold::asymptotics::{log_log_slope, Regime};
use vfp_manifold::dispersion::{c_for_growth_rate, find_root, ModelParams};
use vfp_manifold::eigensystem::EigenSystem;
use vfp_manifold::manifold::{
    c3_1_parity_split, compute_c3, compute_c3_with, compute_h2, compute_u, compute_x, h2_0_psi_series, h2_residual,
    C3Options, ManifoldCoefficients,
};
use vfp_manifold::spectral::{default_truncation, SpectralVector};

/// Landau coefficients at `c = 7`, `γ = 0.2` (`λ = 0.0829158408968...`).
const C3_PARTS_C7_G0P2: [f64; 4] = [-0.47124, -0.46972, 0.15948, -0.78147];

fn system(gamma: f64, lambda: f64) -> EigenSystem {
    let c = c_for_growth_rate(gamma, lambda).unwrap();
    EigenSystem::new(&ModelParams::new(c, gamma), lambda, default_truncation(gamma, lambda)).unwrap()
}

fn c7_system(gamma: f64, n_max: usize) -> EigenSystem {
    let p = ModelParams::new(7.0, gamma);
    let lambda = find_root(&p, (0.0, 1.0)).unwrap().lambda;
    EigenSystem::new(&p, lambda, n_max).unwrap()
}

#[test]
fn u_first_coefficients() {
    let e = c7_system(0.2, 200);
    let u = compute_u(&e);
    assert_eq!(u[0], Complex64::new(0.0, 0.0));
    let expected = I * e.g[0] / (e.params.gamma + 2.0 * e.lambda);
    assert!((u[1] - expected).norm() < 1e-15 * expected.norm());
}

#[test]
fn u_solves_its_diagonal_equation() {
    let e = c7_system(0.2, 200);
    let u = compute_u(&e);
    let lhs = &u.number().scale(Complex64::new(e.params.gamma, 0.0)) + &u.scale(Complex64::new(2.0 * e.lambda, 0.0));
    let rhs = e.g.raise().scale(I);
    assert!((&lhs - &rhs).norm() <= 1e-10 * rhs.norm());

    // Third coefficient by a direct solve of the diagonal system.
    let n = 200;
    let d = number(n) * Complex64::new(e.params.gamma, 0.0) + DMatrix::identity(n + 1, n + 1) * Complex64::new(2.0 * e.lambda, 0.0);
    let direct = d.lu().solve(&(raising(n) * to_dvector(&e.g) * I)).unwrap();
    assert!((u[3] - direct[3]).norm() <= 1e-12 * direct[3].norm());
}

#[test]
fn x_solves_its_diagonal_equation() {
    let e = c7_system(0.2, 200);
    let u = compute_u(&e);
    let x = compute_x(&e, &u);
    let lhs = &x.number().scale(Complex64::new(e.params.gamma, 0.0)) + &x.scale(Complex64::new(4.0 * e.lambda, 0.0));
    assert!((&lhs - &u).norm() <= 1e-10 * u.norm());
}

#[test]
fn second_harmonic_solves_the_full_equation() {
    for &(gamma, lambda) in &[(0.3, 0.02), (1e-5, 1e-3), (0.2, 0.0829)] {
        let e = system(gamma, lambda);
        let (h2, h2_0) = compute_h2(&e).unwrap();
        assert_eq!(h2[0], h2_0);
        let rhs = e.g.raise();
        let r = h2_residual(&e, &h2);
        assert!(r.norm() <= 1e-10 * rhs.norm(), "({gamma}, {lambda}): {:e}", r.norm() / rhs.norm());
    }
}

#[test]
fn second_harmonic_ground_coefficient_from_psi_series() {
    let c = c_for_growth_rate(0.3, 0.01).unwrap();
    let e = EigenSystem::new(&ModelParams::new(c, 0.3), 0.01, 80).unwrap();
    let (_, h2_0) = compute_h2(&e).unwrap();
    let series = h2_0_psi_series(&e, 80).unwrap();
    assert!((series - h2_0).norm() <= 1e-6 * h2_0.norm(), "{series} vs {h2_0}");
}

#[test]
fn second_harmonic_without_mean_field() {
    // With c -> 0 in the mode-2 operator the rank-one term drops and H2 = (2λ + γH + 2i(a+a†))^{-1}(-i a†G).
    let e = c7_system(0.3, 100);
    let n = 100;
    let (h2, _) = compute_h2(&e).unwrap();
    let with_field = dense_l2(e.params.c, e.params.gamma, n);
    let without = dense_l2(0.0, e.params.gamma, n);
    let id = DMatrix::<Complex64>::identity(n + 1, n + 1);
    let rhs = raising(n) * to_dvector(&e.g) * (-I);
    let full = (&id * Complex64::new(2.0 * e.lambda, 0.0) - with_field).lu().solve(&rhs).unwrap();
    let bare = (&id * Complex64::new(2.0 * e.lambda, 0.0) - without).lu().solve(&rhs).unwrap();
    for k in 0..=n {
        assert!((h2[k] - full[k]).norm() < 1e-9 * full.camax());
    }
    // The rank-one correction is the multiple H2_0 (ic/4π) of (2λ - L2|_{c=0})^{-1} e_1.
    let e1 = to_dvector(&SpectralVector::basis(1, n));
    let w = (&id * Complex64::new(2.0 * e.lambda, 0.0) - dense_l2(0.0, e.params.gamma, n)).lu().solve(&e1).unwrap();
    let corrected = &bare + w * (I * (e.params.c / (4.0 * PI)) * full[0]);
    for k in 0..=n {
        assert!((corrected[k] - full[k]).norm() < 1e-9 * full.camax());
    }
}

#[test]
fn c3_reference_point() {
    let p = ModelParams::new(7.0, 0.2);
    let root = find_root(&p, (0.0, 1.0)).unwrap();
    assert!((root.lambda - 0.08291584089680554).abs() < 1e-12);
    let e = EigenSystem::new(&p, root.lambda, default_truncation(0.2, root.lambda)).unwrap();
    let mc = ManifoldCoefficients::compute(&e).unwrap();
    let b = compute_c3(&e, &mc).unwrap();
    let parts = [b.c3_1, b.c3_2, b.c3_3, b.c3];
    for (got, want) in parts.iter().zip(C3_PARTS_C7_G0P2) {
        assert!((got.re - want).abs() < 1e-5, "{got} vs {want}");
    }
    assert_eq!(b.c3, b.c3_1 + b.c3_2 + b.c3_3);
    assert!(b.c3_1.im.abs() <= 1e-8 * b.c3_1.norm());
    let check = b.series_check.expect("series check runs at this truncation");
    assert!(check.rel_diff_u < 1e-6 && check.rel_diff_gstar < 1e-6);
}

#[test]
fn c3_1_has_no_even_index_contributions() {
    for &(gamma, lambda) in &[(0.2, 0.0829), (1e-5, 2e-3), (0.3, 1e-3)] {
        let e = system(gamma, lambda);
        let mc = ManifoldCoefficients::compute(&e).unwrap();
        let (odd, even) = c3_1_parity_split(&e, &mc);
        assert!(even.norm() <= 1e-10 * odd.norm(), "({gamma}, {lambda}): even {even}");
    }
}

#[test]
fn series_and_vector_paths_agree_across_regimes() {
    for &(gamma, lambda) in &[(1e-8, 0.2), (1e-5, 1e-3), (1e-5, 4e-3), (0.3, 1e-4), (0.3, 3e-3)] {
        let e = system(gamma, lambda);
        let mc = ManifoldCoefficients::compute(&e).unwrap();
        let b = compute_c3_with(&e, &mc, C3Options { series_check_max_n: usize::MAX }).unwrap();
        let check = b.series_check.unwrap();
        assert!(check.rel_diff_u < 1e-6, "({gamma}, {lambda}): {:e}", check.rel_diff_u);
        assert!(check.rel_diff_gstar < 1e-6, "({gamma}, {lambda}): {:e}", check.rel_diff_gstar);
    }
}

#[test]
fn sign_of_first_part_in_regimes_one_and_two() {
    for &(gamma, lambda) in &[(1e-8, 0.2), (1e-5, 1e-3), (1e-5, 2e-3)] {
        let e = system(gamma, lambda);
        let mc = ManifoldCoefficients::compute(&e).unwrap();
        let b = compute_c3(&e, &mc).unwrap();
        assert!(matches!(b.regime, Regime::I | Regime::II));
        assert!(b.c3_1.re < 0.0);
        assert!(b.c3_2_ratio.is_finite());
    }
}

#[test]
fn dense_solve_oracle_for_c3() {
    for &(gamma, lambda) in &[(0.3, 0.02), (0.5, 0.05), (0.2, 0.0829)] {
        let c = c_for_growth_rate(gamma, lambda).unwrap();
        let n = 100;
        let e = EigenSystem::new(&ModelParams::new(c, gamma), lambda, n).unwrap();
        let mc = ManifoldCoefficients::compute(&e).unwrap();
        let b = compute_c3(&e, &mc).unwrap();
        let r = dense_reference(c, gamma, lambda, n);
        assert!(rel_diff(&mc.u, &r.u) < 1e-8, "U at ({gamma}, {lambda})");
        assert!(rel_diff(&mc.h2, &r.h2) < 1e-8, "H2 at ({gamma}, {lambda})");
        assert!((b.c3 - r.c3).norm() < 1e-8 * r.c3.norm(), "c3 at ({gamma}, {lambda}): {} vs {}", b.c3, r.c3);
    }
    let e = c7_system(0.3, 100);
    let b = compute_c3(&e, &ManifoldCoefficients::compute(&e).unwrap()).unwrap();
    let r = dense_reference(7.0, 0.3, e.lambda, 100);
    assert!((b.c3 - r.c3).norm() < 1e-8 * r.c3.norm(), "c3 at c = 7: {} vs {}", b.c3, r.c3);
}

#[test]
fn balance_amplitude_scales_as_lambda_squared_in_regime_one() {
    let samples: Vec<(f64, f64)> = [0.02, 0.05, 0.1, 0.2]
        .iter()
        .map(|&lambda| {
            let e = system(1e-8, lambda);
            let mc = ManifoldCoefficients::compute(&e).unwrap();
            let b = compute_c3_with(&e, &mc, C3Options { series_check_max_n: 0 }).unwrap();
            (lambda, (lambda / b.c3.norm()).sqrt())
        })
        .collect();
    let fit = log_log_slope(&samples).unwrap();
    assert!((fit.exponent - 2.0).abs() <= 0.1, "slope {}", fit.exponent);
}

#[test]
fn c5_partial_definition() {
    let e = c7_system(0.2, 300);
    let mc = ManifoldCoefficients::compute(&e).unwrap();
    let b = compute_c3(&e, &mc).unwrap();
    let x_sym = &mc.x + &mc.x.conj();
    let expected = -2.0 * b.c3 * e.gtilde.inner(&x_sym.raise());
    assert!((b.c5_partial - expected).norm() <= 1e-14 * expected.norm());
    assert!(b.c5_partial.re.abs() <= 1e-8 * b.c5_partial.norm());
}

#[test]
fn c5_partial_scalings() {
    let opts = C3Options { series_check_max_n: 0 };
    let c5 = |gamma: f64, lambdas: &[f64]| -> f64 {
        let pts: Vec<(f64, f64)> = lambdas
            .iter()
            .map(|&l| {
                let e = system(gamma, l);
                let mc = ManifoldCoefficients::compute(&e).unwrap();
                (l, compute_c3_with(&e, &mc, opts).unwrap().c5_partial.norm())
            })
            .collect();
        log_log_slope(&pts).unwrap().exponent
    };
    // Dissipative side: |c5| grows linearly in λ at fixed γ.
    let s = c5(0.3, &[1e-5, 1e-4, 1e-3]);
    assert!((s - 1.0).abs() <= 0.2, "slope {s}");
    // Deep in regime I the λ^{-7} law holds; at γ = 1e-8 the finite-λ correction pulls the slope up.
    let s = c5(1e-11, &[0.01, 0.014, 0.02]);
    assert!((s + 7.0).abs() <= 0.3, "slope {s}");
}
