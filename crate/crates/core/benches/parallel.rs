// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! One worker against the default pool on the parallel hot spots. Build
//! with `--no-default-features` to time the sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qbm_core::kernel::{kernel_brute_force, GasParams, OracleResolution, Potential};
use qbm_core::kinematics::{run_collision_ensemble, Ensemble};
use qbm_core::state::wavefunctions;
use qbm_core::wigner::wigner_transform;
use qbm_core::{par, DensityMatrix, Grid1D, PhysicalParams};

fn workers() -> [(&'static str, usize); 2] {
    [("1", 1), ("auto", 0)]
}

fn bench(c: &mut Criterion) {
    let g = Grid1D::centered(10.0, 256).unwrap();
    let rho = DensityMatrix::pure(g, &wavefunctions::cat(&g, 6.0, 0.7, 1.0)).unwrap();
    let mut group = c.benchmark_group("wigner_transform_256");
    for (name, n) in workers() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(n, || wigner_transform(&rho, 1.0).unwrap()))
        });
    }
    group.finish();

    let params = PhysicalParams::builder()
        .system_mass(100.0)
        .env_mass(1.0)
        .collision_rate(1.0)
        .build()
        .unwrap();
    let ens = Ensemble::uniform(20_000, 5.0, 1, params).unwrap();
    let mut group = c.benchmark_group("collision_ensemble_20k");
    group.sample_size(10);
    for (name, n) in workers() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(n, || run_collision_ensemble(&ens, 20.0, 20).unwrap()))
        });
    }
    group.finish();

    let pot = Potential::gaussian(1.0, 1.0).unwrap();
    let gas = GasParams::boltzmann(1.0, 1.0, -1.0).unwrap();
    let res = OracleResolution::for_inputs(&pot, &gas);
    let mut group = c.benchmark_group("kernel_brute_force");
    group.sample_size(10);
    for (name, n) in workers() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(n, || kernel_brute_force(1.0, &pot, &gas, &res).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
