// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use num_complex::Complex64;
use qbm_core::diagnostics::{min_eigenvalue, purity, trace};
use qbm_core::evolvers::{
    build_qbm_lindblad, completed_lindblad_generator, evolve_caldeira_leggett, evolve_free_decoherence,
    evolve_lindblad, evolve_rk4, kinetic_hamiltonian, qbm_lindblad_generator, rk4_step, Difference,
    DiagnosticsSeries, Generator, LindbladOperator, QbmGenerator,
};
use qbm_core::evolvers::{frobenius, snapshot_csv};
use qbm_core::kinematics::{apply_collision_decoherence, fit_slope};
use qbm_core::state::wavefunctions;
use qbm_core::{DensityMatrix, Grid1D, PhysicalParams, ThermalEnvironment1D};

fn params(m: f64, gamma: f64, kt: f64) -> PhysicalParams {
    PhysicalParams::builder()
        .system_mass(m)
        .env_mass(0.01 * m)
        .dissipation(gamma)
        .temperature(kt)
        .build()
        .unwrap()
}

fn gaussian_state(g: Grid1D, x0: f64, p0: f64, sigma: f64) -> DensityMatrix {
    DensityMatrix::pure(g, &wavefunctions::gaussian(&g, x0, p0, sigma, 1.0)).unwrap()
}

#[test]
fn free_spreading_variance() {
    let g = Grid1D::centered(16.0, 256).unwrap();
    let (sigma, m, t) = (1.0, 1.0, 2.0);
    let rho0 = gaussian_state(g, 0.0, 0.0, sigma);
    let rho = evolve_free_decoherence(&rho0, m, 1.0, 0.0, t, 0.05).unwrap();
    let (_, var) = rho.position_moments();
    let want = sigma * sigma + (t / (2.0 * m * sigma)).powi(2);
    assert!((var - want).abs() < 1e-6, "{var} vs {want}");
}

/// Cat state coherence at `(d/2, -d/2)` from the Fourier solution of the
/// free-decoherence equation in `X = (x+y)/2`, `xi = x - y`.
fn cat_coherence_oracle(d: f64, sigma: f64, m: f64, dd: f64, t: f64) -> f64 {
    let norm2 = 1.0 / ((2.0 * PI).sqrt() * sigma * 2.0 * (1.0 + (-d * d / (8.0 * sigma * sigma)).exp()));
    let xi = d;
    let mut acc = Complex64::new(0.0, 0.0);
    // Trapezoid in K on a wide symmetric interval (integrand is Gaussian).
    let n = 4001;
    let kmax = 12.0 / sigma;
    let dk = 2.0 * kmax / (n - 1) as f64;
    for i in 0..n {
        let k = -kmax + i as f64 * dk;
        let v = k / m;
        let shifted = xi - v * t;
        let mut rho_hat = Complex64::new(0.0, 0.0);
        for a in [-0.5 * d, 0.5 * d] {
            for b in [-0.5 * d, 0.5 * d] {
                let c = 0.5 * (a + b);
                rho_hat += Complex64::from_polar(1.0, -k * c)
                    * ((2.0 * PI).sqrt() * sigma)
                    * (-0.5 * sigma * sigma * k * k).exp()
                    * (-(shifted - (a - b)).powi(2) / (8.0 * sigma * sigma)).exp();
            }
        }
        let damp = (-dd * (xi * xi * t - xi * v * t * t + v * v * t.powi(3) / 3.0)).exp();
        acc += rho_hat * damp * dk;
    }
    norm2 * acc.re / (2.0 * PI)
}

#[test]
fn cat_coherence_matches_fourier_solution() {
    let g = Grid1D::centered(12.8, 128).unwrap();
    let (d, sigma, m, dd) = (10.0, 0.5, 10.0, 0.01);
    let rho0 = DensityMatrix::pure(g, &wavefunctions::cat(&g, d, sigma, 1.0)).unwrap();
    let (i, j) = (g.nearest_index(0.5 * d), g.nearest_index(-0.5 * d));
    assert!((g.point(i) - 0.5 * d).abs() < 1e-12);
    let want0 = cat_coherence_oracle(d, sigma, m, dd, 0.0);
    assert!((rho0.get(i, j).re - want0).abs() < 1e-9 * want0);
    for t in [0.5, 1.0] {
        let rho = evolve_free_decoherence(&rho0, m, 1.0, dd, t, 0.01).unwrap();
        let want = cat_coherence_oracle(d, sigma, m, dd, t);
        let got = rho.get(i, j);
        assert!((got.re - want).abs() < 1e-6 * want, "t = {t}: {got} vs {want}");
    }
}

#[test]
fn frozen_kinetics_and_dephasing_closed_forms() {
    let g = Grid1D::centered(8.0, 64).unwrap();
    let rho0 = DensityMatrix::pure(g, &wavefunctions::cat(&g, 4.0, 0.8, 1.0)).unwrap();
    let x = g.points();
    // H = 0, L = sqrt(kappa) x: rho0 exp(-kappa t (x - y)^2 / 2).
    let kappa: f64 = 0.4;
    let h = ndarray::Array2::zeros((64, 64));
    let l = LindbladOperator::new(Complex64::new(kappa.sqrt(), 0.0), Complex64::new(0.0, 0.0));
    let t = 0.7;
    let rho = evolve_lindblad(&rho0, &h, &[l], 1.0, t, 0.001).unwrap();
    for a in 0..64 {
        for b in 0..64 {
            let want = rho0.get(a, b) * (-0.5 * kappa * t * (x[a] - x[b]).powi(2)).exp();
            assert!((rho.get(a, b) - want).norm() < 1e-8);
        }
    }
}

#[test]
fn split_step_is_second_order() {
    let g = Grid1D::centered(10.0, 64).unwrap();
    let rho0 = DensityMatrix::pure(g, &wavefunctions::cat(&g, 4.0, 0.7, 1.0)).unwrap();
    let run = |dt: f64| evolve_free_decoherence(&rho0, 1.0, 1.0, 0.3, 1.0, dt).unwrap();
    let (a, b, c) = (run(0.1), run(0.05), run(0.025));
    let ratio = a.sup_distance(&b) / b.sup_distance(&c);
    assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
}

#[test]
fn rk4_trace_drift_shrinks_at_fourth_order() {
    let g = Grid1D::centered(8.0, 64).unwrap();
    let p = params(1.0, 0.3, 1.0);
    let rho0 = gaussian_state(g, 0.5, 1.0, 0.7);
    let gen = QbmGenerator::caldeira_leggett(&p, g).unwrap();
    let run = |dt: f64| {
        evolve_rk4(&gen, &rho0, 0.5, dt, 0, &mut |_, _| Ok(())).unwrap()
    };
    let fine = run(0.00125);
    let e1 = run(0.01).sup_distance(&fine);
    let e2 = run(0.005).sup_distance(&fine);
    assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
}

#[test]
fn hermiticity_and_trace_every_step() {
    let g = Grid1D::centered(8.0, 64).unwrap();
    let p = params(1.0, 0.2, 0.5);
    let rho0 = gaussian_state(g, 0.0, 1.0, 0.6);
    let check = |gen: &dyn Fn(&ndarray::Array2<Complex64>) -> ndarray::Array2<Complex64>| {
        let mut rho = rho0.matrix().to_owned();
        for _ in 0..50 {
            rho = gen(&rho);
            let dm = DensityMatrix::new(g, rho.clone()).unwrap();
            assert!(dm.hermiticity_deviation() < 1e-10);
            assert!((trace(&dm).unwrap() - 1.0).abs() < 1e-8);
        }
    };
    let cl = QbmGenerator::caldeira_leggett(&p, g).unwrap();
    check(&|r| rk4_step(&cl, r, 0.002));
    let lind = completed_lindblad_generator(&p, g).unwrap();
    check(&|r| rk4_step(&lind, r, 0.002));
    let mut rho = rho0.clone();
    for _ in 0..20 {
        rho = evolve_free_decoherence(&rho, 1.0, 1.0, 0.5, 0.05, 0.05).unwrap();
        assert!(rho.hermiticity_deviation() < 1e-10);
        assert!((trace(&rho).unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn caldeira_leggett_reductions() {
    let g = Grid1D::centered(8.0, 64).unwrap();
    let rho0 = DensityMatrix::pure(g, &wavefunctions::cat(&g, 3.0, 0.6, 1.0)).unwrap();
    // gamma = 0: pure free evolution.
    let free = evolve_free_decoherence(&rho0, 1.0, 1.0, 0.0, 0.5, 0.01).unwrap();
    let cl = evolve_caldeira_leggett(&rho0, &params(1.0, 0.0, 1.0), 0.5, 0.002).unwrap();
    assert!(free.sup_distance(&cl) < 1e-8);
    // small gamma, high T: free decoherence with D = 2 M gamma kT, up to O(gamma t).
    let p = params(1.0, 0.005, 20.0);
    let t = 0.3;
    let fd = evolve_free_decoherence(&rho0, 1.0, 1.0, p.localization_rate(), t, 0.01).unwrap();
    let cl = evolve_caldeira_leggett(&rho0, &p, t, 0.002).unwrap();
    let scale = rho0.matrix().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(fd.sup_distance(&cl) < 5.0 * p.dissipation() * t * scale);
}

#[test]
fn positivity_violation_only_without_lindblad_form() {
    let g = Grid1D::centered(8.0, 64).unwrap();
    let p = params(1.0, 0.1, 0.1);
    let rho0 = gaussian_state(g, 0.0, 0.0, 0.5);
    let cl = evolve_caldeira_leggett(&rho0, &p, 1.0, 0.002).unwrap();
    assert!(min_eigenvalue(&cl).unwrap() < -1e-6);
    let gen = completed_lindblad_generator(&p, g).unwrap();
    let mut series = DiagnosticsSeries::default();
    evolve_rk4(&gen, &rho0, 1.0, 0.002, 25, &mut |t, r| series.record(t, r, 1.0)).unwrap();
    assert!(series.min_eig.iter().all(|&e| e >= -1e-7));
    assert!(series.trace.iter().all(|&tr| (tr - 1.0).abs() < 1e-8));
    assert!(series.to_csv().starts_with("t,trace,purity,min_eig,offdiag_peak\n"));
    assert!(snapshot_csv(&cl, 8).starts_with("x,y,re_rho,im_rho\n"));
}

#[test]
fn unitary_limit_keeps_purity() {
    let g = Grid1D::centered(8.0, 64).unwrap();
    let rho0 = gaussian_state(g, 0.5, 0.5, 0.8);
    let h = kinetic_hamiltonian(&g, 1.0, 1.0);
    let out = evolve_lindblad(&rho0, &h, &[], 1.0, 1.0, 0.005).unwrap();
    assert!((purity(&out) - 1.0).abs() < 1e-8);
}

#[test]
fn completion_difference_scales_as_inverse_temperature() {
    let g = Grid1D::centered(6.0, 64).unwrap();
    let rho = gaussian_state(g, 0.3, 0.8, 0.7).into_matrix();
    let mut pts = Vec::new();
    for kt in [1.0, 2.0, 4.0, 10.0] {
        let p = params(1.0, 0.2, kt);
        let lind = completed_lindblad_generator(&p, g).unwrap();
        let cl = QbmGenerator::caldeira_leggett(&p, g).unwrap();
        let diff = Difference(&lind, &cl).apply(&rho);
        pts.push((kt.ln(), frobenius(&diff).ln()));
    }
    let slope = fit_slope(&pts).unwrap();
    assert!((slope + 1.0).abs() < 1e-6, "slope {slope}");
}

#[test]
fn literal_operator_leaves_temperature_independent_remainder() {
    // With x_coeff * |p_coeff| = sqrt(2) gamma the dissipative cross term no
    // longer matches, so the difference stops falling as 1/T.
    let g = Grid1D::centered(6.0, 64).unwrap();
    let rho = gaussian_state(g, 0.3, 0.8, 0.7).into_matrix();
    let norms: Vec<f64> = [10.0, 100.0]
        .iter()
        .map(|&kt| {
            let p = params(1.0, 0.2, kt);
            let lind = qbm_lindblad_generator(&p, g).unwrap();
            let cl = QbmGenerator::caldeira_leggett(&p, g).unwrap();
            frobenius(&Difference(&lind, &cl).apply(&rho))
        })
        .collect();
    assert!(norms[1] > 0.5 * norms[0]);
    let l = build_qbm_lindblad(&params(1.0, 0.2, 10.0)).unwrap();
    assert!((l.x_coeff.re * l.p_coeff.im - 2f64.sqrt() * 0.2).abs() < 1e-14);
}

#[test]
fn collision_map_matches_free_decoherence_at_small_separation() {
    // Short-distance collision decoherence and the D (x-y)^2 term agree for
    // the off-diagonal decay rate when 2 <p^2> (x-y)^2 / hbar^2 << 1.
    let g = Grid1D::centered(0.05, 32).unwrap();
    let env = ThermalEnvironment1D::new(0.01, 1.0, 1.0).unwrap();
    let rate = 2.0;
    let rho0 = gaussian_state(g, 0.0, 0.0, 0.008);
    let dt = 0.01;
    let coll = apply_collision_decoherence(&rho0, &env, rate, 1.0, dt).unwrap();
    let d = 2.0 * env.mass() * rate * env.temperature();
    let fd = evolve_free_decoherence(&rho0, f64::INFINITY, 1.0, d, dt, dt).unwrap();
    let (i, j) = (2, 29);
    let r1 = -(coll.get(i, j).norm() / rho0.get(i, j).norm()).ln() / dt;
    let r2 = -(fd.get(i, j).norm() / rho0.get(i, j).norm()).ln() / dt;
    assert!(((r1 - r2) / r2).abs() < 0.02, "{r1} vs {r2}");
}
