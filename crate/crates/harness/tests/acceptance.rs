// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 3-8 run the named experiments with their default configuration
//! on a single worker; criterion 10 runs every experiment a second time and
//! compares the CSV bytes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

use qbm_core::kinematics::{decoherence_factor, elastic_collision, particle_rng, CollisionCoefficients};
use qbm_core::wigner::{inverse_wigner_transform, wigner_transform};
use qbm_core::{par, DensityMatrix, Grid1D, PhysicalParams, ThermalEnvironment1D};
use qbm_harness::{run, Config, Experiment, RunManifest};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn collision_conservation() -> Verdict {
    let mut rng = particle_rng(7, 0);
    let (mut worst_p, mut worst_e, mut worst_id): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..1_000_000 {
        let big_m = 10f64.powf(rng.random_range(0.0..3.0));
        let m = big_m * 10f64.powf(rng.random_range(-3.0..0.0));
        let params = PhysicalParams::builder()
            .system_mass(big_m)
            .env_mass(m)
            .build()
            .expect("valid masses");
        let big_p = rng.random_range(-50.0..50.0);
        let p = rng.random_range(-5.0..5.0);
        let (big_q, q) = elastic_collision(big_p, p, &params);
        worst_p = worst_p.max((big_q + q - big_p - p).abs() / (big_p.abs() + p.abs()));
        let e0 = big_p * big_p / (2.0 * big_m) + p * p / (2.0 * m);
        let e1 = big_q * big_q / (2.0 * big_m) + q * q / (2.0 * m);
        worst_e = worst_e.max(((e1 - e0) / e0).abs());
        if k % 100 == 0 {
            let c = CollisionCoefficients::new(big_m, m).expect("valid masses");
            worst_id = worst_id.max(c.identity_residual().abs());
        }
    }
    verdict(
        worst_p < 1e-12 && worst_e < 1e-12 && worst_id < 1e-14,
        format!("momentum {worst_p:.2e}, energy {worst_e:.2e}, a^2+bc-1 {worst_id:.2e}"),
    )
}

fn decoherence_coefficient() -> Verdict {
    let (m, kt, gamma, hbar) = (0.37, 1.9, 2.3, 0.8);
    let env = ThermalEnvironment1D::new(m, kt, 1.0).expect("valid environment");
    // Small-separation coefficient of F by Richardson extrapolation of F/u^2.
    let c = |u: f64| decoherence_factor(u, 0.0, &env, gamma, hbar) / (u * u);
    let u = 1e-3;
    let coeff = (4.0 * c(0.5 * u) - c(u)) / 3.0;
    let closed = 2.0 * m * gamma * kt / (hbar * hbar);
    // <p^2> of the Maxwell-Boltzmann density by the trapezoid rule, which is
    // spectrally accurate for a Gaussian on a wide interval.
    let s = (m * kt).sqrt();
    let n = 4001;
    let h = 24.0 * s / (n - 1) as f64;
    let p2: f64 = (0..n)
        .map(|i| {
            let p = -12.0 * s + i as f64 * h;
            p * p * (-p * p / (2.0 * s * s)).exp() / (2.0 * PI * s * s).sqrt() * h
        })
        .sum();
    let quad = 2.0 * gamma * p2 / (hbar * hbar);
    let (e1, e2) = (((coeff - closed) / closed).abs(), ((coeff - quad) / quad).abs());
    verdict(
        e1 < 1e-6 && e2 < 1e-8,
        format!("closed form {e1:.2e}, quadrature oracle {e2:.2e}"),
    )
}

fn random_hermitian(g: Grid1D, seed: u64) -> DensityMatrix {
    let mut rng = particle_rng(seed, 1);
    let n = g.len();
    let mut a = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        a[[i, i]] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in 0..i {
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            a[[i, j]] = v;
            a[[j, i]] = v.conj();
        }
    }
    DensityMatrix::new(g, a).expect("Hermitian input")
}

fn transform_fidelity() -> Verdict {
    let hbar = 0.7;
    let (mut round, mut pos, mut mom): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (seed, (hw, n)) in [(3.0, 16), (5.0, 32), (8.0, 64), (4.0, 128)].into_iter().enumerate() {
        let g = Grid1D::centered(hw, n).expect("grid");
        let rho = random_hermitian(g, seed as u64);
        let scale = rho.matrix().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let w = wigner_transform(&rho, hbar).expect("transform");
        let back = inverse_wigner_transform(&w, hbar).expect("inverse");
        round = round.max(back.sup_distance(&rho) / scale);
        let x = g.points();
        let dx = g.dx();
        for (i, m) in w.position_marginal().iter().enumerate() {
            pos = pos.max((m - rho.get(i, i).re).abs() / scale);
        }
        // Momentum representation <P|rho|P> on the Wigner momentum grid.
        let pg = w.p_grid();
        for (k, m) in w.momentum_marginal().iter().enumerate() {
            let p = pg.point(k);
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    s += rho.get(a, b) * Complex64::from_polar(1.0, -p * (x[a] - x[b]) / hbar);
                }
            }
            let oracle = s.re * dx * dx / (2.0 * PI * hbar);
            mom = mom.max((m - oracle).abs() / (scale * n as f64 * dx * dx / (2.0 * PI * hbar)));
        }
    }
    verdict(
        round < 1e-10 && pos < 1e-8 && mom < 1e-8,
        format!("round trip {round:.2e}, position marginal {pos:.2e}, momentum marginal {mom:.2e}"),
    )
}

fn checks_pass(m: &RunManifest, names: &[&str]) -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in names {
        match m.checks.iter().find(|c| c.name == *name) {
            Some(c) => {
                ok &= c.passed;
                parts.push(format!("{}={:.3e}", c.name, c.value));
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    verdict(ok, parts.join(", "))
}

fn all_checks(m: &RunManifest) -> Verdict {
    let names: Vec<&str> = m.checks.iter().map(|c| c.name.as_str()).collect();
    checks_pass(m, &names)
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).expect("output directory") {
        let path = entry.expect("entry").path();
        if path.extension().is_some_and(|e| e == "csv") {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            out.insert(name, fs::read(&path).expect("csv"));
        }
    }
    out
}

fn main() -> ExitCode {
    let root = tempfile::tempdir().expect("temporary directory");
    let mut manifests = BTreeMap::new();
    let mut errors = Vec::new();
    par::with_threads(1, || {
        for e in Experiment::ALL {
            match run(e, &Config::defaults(e.schema()), &root.path().join("a").join(e.name())) {
                Ok(m) => {
                    manifests.insert(e.name(), m);
                }
                Err(err) => errors.push(format!("{}: {err}", e.name())),
            }
        }
    });
    let by_name = |name: &str, f: &dyn Fn(&RunManifest) -> Verdict| match manifests.get(name) {
        Some(m) => f(m),
        None => verdict(false, format!("{name} did not complete: {errors:?}")),
    };

    let mut results: Vec<(&str, Verdict)> = vec![
        ("collision conservation", collision_conservation()),
        ("decoherence coefficient", decoherence_coefficient()),
        ("micro-macro link", by_name("crosscheck-collisions", &all_checks)),
        (
            "thermalization",
            by_name("thermalization", &|m| {
                checks_pass(m, &["fokker_planck_terminal_p2", "stationarity_refinement_order"])
            }),
        ),
        (
            "representation equivalence",
            by_name("equivalence", &|m| checks_pass(m, &["commuting_diagram_sup"])),
        ),
        ("free-decoherence oracle", by_name("decoherence-rate", &all_checks)),
        ("Lindblad structure", by_name("positivity", &all_checks)),
        (
            "kernel route equivalence",
            by_name("kernel", &|m| {
                checks_pass(m, &["kernel_route_gap", "localization_route_gap", "low_density_deviation"])
            }),
        ),
        ("transform fidelity", transform_fidelity()),
    ];

    let mut identical = true;
    let mut detail = Vec::new();
    par::with_threads(1, || {
        for e in Experiment::ALL {
            let b = root.path().join("b").join(e.name());
            if let Err(err) = run(e, &Config::defaults(e.schema()), &b) {
                identical = false;
                detail.push(format!("{}: {err}", e.name()));
                continue;
            }
            let first = csv_files(&root.path().join("a").join(e.name()));
            let second = csv_files(&b);
            if first.is_empty() || first != second {
                identical = false;
                detail.push(format!("{} differs", e.name()));
            }
        }
    });
    if detail.is_empty() {
        detail.push("all experiment CSVs byte-identical on re-run".into());
    }
    results.push(("determinism", verdict(identical, detail.join("; "))));

    let mut all = true;
    for (k, (name, v)) in results.iter().enumerate() {
        all &= v.passed;
        println!(
            "{} criterion {:>2} ({name}): {}",
            if v.passed { "PASS" } else { "FAIL" },
            k + 1,
            v.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
