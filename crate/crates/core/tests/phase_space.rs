// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

use qbm_core::evolvers::evolve_caldeira_leggett;
use qbm_core::kinematics::CollisionCoefficients;
use qbm_core::state::wavefunctions;
use qbm_core::wigner::{
    boltzmann_step, evolve_fokker_planck, inverse_wigner_transform, stream, wigner_transform, BoltzmannOperator,
    FokkerPlanckScheme,
};
use qbm_core::{DensityMatrix, Grid1D, PhysicalParams, WignerFunction};

fn hermitian(n: usize, entries: &[(f64, f64)]) -> Array2<Complex64> {
    let mut a = Array2::zeros((n, n));
    let mut it = entries.iter().cycle();
    for i in 0..n {
        let (re, _) = it.next().unwrap();
        a[[i, i]] = Complex64::new(*re, 0.0);
        for j in 0..i {
            let (re, im) = it.next().unwrap();
            a[[i, j]] = Complex64::new(*re, *im);
            a[[j, i]] = Complex64::new(*re, -*im);
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_and_marginals(
        log_n in 3u32..7,
        half_width in 1.0f64..20.0,
        hbar in 0.2f64..3.0,
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64..256),
    ) {
        let n = 1usize << log_n;
        let g = Grid1D::centered(half_width, n).unwrap();
        let rho = DensityMatrix::new(g, hermitian(n, &entries)).unwrap();
        let scale = rho.matrix().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let w = wigner_transform(&rho, hbar).unwrap();
        let back = inverse_wigner_transform(&w, hbar).unwrap();
        prop_assert!(back.sup_distance(&rho) < 1e-10 * scale);

        for (i, m) in w.position_marginal().iter().enumerate() {
            prop_assert!((m - rho.get(i, i).re).abs() < 1e-8 * scale);
        }
        let x = g.points();
        let dx = g.dx();
        let unit = dx * dx / (2.0 * PI * hbar);
        for (k, m) in w.momentum_marginal().iter().enumerate() {
            let p = w.p_grid().point(k);
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    s += rho.get(a, b) * Complex64::from_polar(1.0, -p * (x[a] - x[b]) / hbar);
                }
            }
            prop_assert!((m - s.re * unit).abs() < 1e-8 * scale * n as f64 * unit);
        }
    }
}

#[test]
fn streaming_shifts_by_p_t_over_m() {
    // With P on the grid's conjugate lattice the shift is a whole number of
    // cells, so free streaming is an exact permutation.
    let xg = Grid1D::centered(8.0, 32).unwrap();
    let pg = Grid1D::centered(4.0, 8).unwrap();
    let w = WignerFunction::gaussian(xg, pg, -2.0, 0.0, 1.0, 2.0).unwrap();
    let (mass, dt) = (2.0, 1.0);
    let out = stream(&w, mass, dt);
    let v = w.values();
    for j in 0..pg.len() {
        let shift = pg.point(j) * dt / mass / xg.dx();
        let s = shift.round() as isize;
        assert!((shift - s as f64).abs() < 1e-12);
        for i in 0..xg.len() {
            let src = (i as isize - s).rem_euclid(32) as usize;
            assert!((out[[i, j]] - v[[src, j]]).abs() < 1e-12);
        }
    }
}

#[test]
fn collision_integral_moments() {
    // d<P>/dt = -Gamma (1 - a) <P>, and the Euler step multiplies by
    // 1 - Gamma (1 - a) dt exactly up to interpolation error.
    let params = PhysicalParams::builder()
        .system_mass(1.0)
        .env_mass(0.02)
        .temperature(1.0)
        .collision_rate(5.0)
        .build()
        .unwrap();
    let xg = Grid1D::centered(1.0, 8).unwrap();
    let pg = Grid1D::centered(10.0, 128).unwrap();
    let w0 = WignerFunction::uniform_in_x(xg, pg, |p| (-2.0 * (p - 2.0) * (p - 2.0)).exp()).unwrap();
    let op = BoltzmannOperator::new(&params, pg).unwrap();
    let a = CollisionCoefficients::from_params(&params).a();
    let dt = 0.004;
    let mut w = w0.clone();
    for _ in 0..250 {
        w = boltzmann_step(&w, &op, dt).unwrap();
    }
    let expected = w0.mean_p() * (1.0 - 5.0 * (1.0 - a) * dt).powi(250);
    assert!((w.mean_p() / expected - 1.0).abs() < 1e-6, "{} vs {expected}", w.mean_p());
    assert!((w.norm() - 1.0).abs() < 1e-8);
}

#[test]
fn fokker_planck_fixed_point() {
    let params = PhysicalParams::builder()
        .system_mass(2.0)
        .temperature(0.5)
        .dissipation(1.0)
        .build()
        .unwrap();
    let xg = Grid1D::centered(4.0, 16).unwrap();
    let pg = Grid1D::centered(6.0, 64).unwrap();
    let w0 = WignerFunction::gaussian(xg, pg, 0.0, 1.5, 1.0, 0.3).unwrap();
    let (w, series) = evolve_fokker_planck(&w0, &params, 6.0, 0.005, FokkerPlanckScheme::CenteredEuler, 100).unwrap();
    assert!((w.mean_p2() - 1.0).abs() < 1e-4);
    assert!(w.min_value() > -1e-12);
    assert!(series.to_csv().starts_with("t,mean_P,var_P,norm\n"));
}

#[test]
fn wigner_evolution_commutes_with_density_matrix_evolution() {
    let params = PhysicalParams::builder()
        .system_mass(1.0)
        .temperature(1.0)
        .dissipation(0.5)
        .build()
        .unwrap();
    let g = Grid1D::centered(10.0, 64).unwrap();
    let rho0 = DensityMatrix::pure(g, &wavefunctions::gaussian(&g, 0.0, 1.0, 0.7, 1.0)).unwrap();
    let (t, dt) = (0.5, 0.005);
    let rho_t = evolve_caldeira_leggett(&rho0, &params, t, dt).unwrap();
    let a = wigner_transform(&rho_t, 1.0).unwrap();
    let w0 = wigner_transform(&rho0, 1.0).unwrap();
    let (b, _) = evolve_fokker_planck(&w0, &params, t, dt, FokkerPlanckScheme::SpectralRk4, 0).unwrap();
    assert!(a.sup_distance(&b) < 1e-6, "{}", a.sup_distance(&b));
}
