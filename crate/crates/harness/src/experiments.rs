// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! The named experiments. Each one reads its whole configuration (and so
//! runs every constructor's validation) before it computes anything.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::json;

use qbm_core::diagnostics::{self, check_leakage, min_eigenvalue};
use qbm_core::evolvers::{
    completed_lindblad_generator, evolve_free_decoherence, evolve_free_decoherence_observed, evolve_rk4,
    frobenius, qbm_lindblad_generator, snapshot_csv, DiagnosticsSeries, Difference, Generator, QbmGenerator,
};
use qbm_core::io::csv_string;
use qbm_core::kernel::{
    kernel_brute_force, kernel_low_density, localization_rate, localization_rate_fit, max_occupation,
    number_density, number_density_quadrature, tabulate, GasParams, OracleResolution, Potential, PotentialKind,
    Route, Statistics, LOW_DENSITY_LIMIT,
};
use qbm_core::kinematics::{
    apply_collision_decoherence, fit_decay_rate, fit_slope, run_collision_ensemble, Ensemble,
};
use qbm_core::state::wavefunctions;
use qbm_core::wigner::{
    boltzmann_step, centered_momentum_rhs, centered_step_bound, evolve_fokker_planck, inverse_wigner_transform,
    step_count, wigner_csv, wigner_transform, BoltzmannOperator, FokkerPlanckScheme, MomentSeries,
    MAX_COLLISION_STEP,
};
use qbm_core::{par, DensityMatrix, Grid1D, PhysicalParams, ThermalEnvironment1D, WignerFunction};

use crate::config::{Config, KeySpec};
use crate::error::{Context, HarnessError, Result};
use crate::manifest::{write_atomic, Check, OutputDir, RunManifest};

const fn key(key: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec { key, default, help }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    DecoherenceRate,
    Thermalization,
    CrosscheckCollisions,
    Positivity,
    Kernel,
    Equivalence,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::DecoherenceRate,
        Experiment::Thermalization,
        Experiment::CrosscheckCollisions,
        Experiment::Positivity,
        Experiment::Kernel,
        Experiment::Equivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::DecoherenceRate => "decoherence-rate",
            Experiment::Thermalization => "thermalization",
            Experiment::CrosscheckCollisions => "crosscheck-collisions",
            Experiment::Positivity => "positivity",
            Experiment::Kernel => "kernel",
            Experiment::Equivalence => "equivalence",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment `{name}` (try `qbm list`)")))
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::DecoherenceRate => "off-diagonal decay of a two-Gaussian superposition against D d^2",
            Experiment::Thermalization => "Fokker-Planck and collision-integral relaxation of a displaced packet",
            Experiment::CrosscheckCollisions => "Monte Carlo collision ensemble against the collision integral",
            Experiment::Positivity => "Caldeira-Leggett versus Lindblad evolution of a squeezed low-T state",
            Experiment::Kernel => "scattering kernel F(r) by both routes and the localization rate D",
            Experiment::Equivalence => "collision map versus master equation; Wigner commuting diagram",
        }
    }

    pub fn schema(self) -> &'static [KeySpec] {
        match self {
            Experiment::DecoherenceRate => DECOHERENCE_KEYS,
            Experiment::Thermalization => THERMALIZATION_KEYS,
            Experiment::CrosscheckCollisions => CROSSCHECK_KEYS,
            Experiment::Positivity => POSITIVITY_KEYS,
            Experiment::Kernel => KERNEL_KEYS,
            Experiment::Equivalence => EQUIVALENCE_KEYS,
        }
    }

    fn execute(self, cfg: &Config, out: &mut OutputDir) -> Result<Outcome> {
        match self {
            Experiment::DecoherenceRate => decoherence_rate(cfg, out),
            Experiment::Thermalization => thermalization(cfg, out),
            Experiment::CrosscheckCollisions => crosscheck_collisions(cfg, out),
            Experiment::Positivity => positivity(cfg, out),
            Experiment::Kernel => kernel(cfg, out),
            Experiment::Equivalence => equivalence(cfg, out),
        }
    }
}

/// Checks and a free-form summary produced by one experiment.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub summary: serde_json::Value,
}

/// Runs `experiment` with `cfg`, writing its outputs and `manifest.json`
/// under `out_dir`.
pub fn run(experiment: Experiment, cfg: &Config, out_dir: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    let mut out = OutputDir::create(out_dir)?;
    let outcome = experiment.execute(cfg, &mut out)?;
    let mut seen = std::collections::BTreeSet::new();
    for c in &outcome.checks {
        assert!(seen.insert(c.name.as_str()), "check `{}` recorded twice", c.name);
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: experiment.name().to_string(),
        config: cfg.values().clone(),
        threads: par::current_threads(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        outputs: out.written().to_vec(),
        passed: outcome.checks.iter().all(|c| c.passed),
        checks: outcome.checks,
        summary: outcome.summary,
    };
    let bytes = serde_json::to_vec_pretty(&manifest)?;
    write_atomic(&out_dir.join("manifest.json"), &bytes)?;
    Ok(manifest)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn grid(cfg: &Config, half_width: &str, n: &str) -> Result<Grid1D> {
    Grid1D::centered(cfg.f64(half_width)?, cfg.usize(n)?).context(half_width)
}

fn pure_state(grid: Grid1D, psi: &[Complex64]) -> Result<DensityMatrix> {
    let rho = DensityMatrix::pure(grid, psi).context("initial state")?;
    check_leakage(&rho).context("initial state")?;
    Ok(rho)
}

fn max_abs_deviation(values: &[f64], target: f64) -> f64 {
    values.iter().map(|v| (v - target).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------

const DECOHERENCE_KEYS: &[KeySpec] = &[
    key("physics.system_mass", "10", "system mass M"),
    key("physics.temperature", "1", "environment temperature (kB = 1)"),
    key("physics.dissipation", "0.0005", "dissipation rate gamma; D = 2 M gamma kT / hbar^2"),
    key("physics.hbar", "1", "Planck constant"),
    key("state.separation", "10", "distance d between the two packets"),
    key("state.sigma", "0.5", "position width of each packet"),
    key("grid.half_width", "12.8", "grid covers [-w, w)"),
    key("grid.n", "128", "grid points (power of two)"),
    key("run.t", "1", "evolution time"),
    key("run.dt", "0.01", "time step"),
    key("run.record_every", "5", "steps between recorded rows"),
    key("spreading.mass", "1", "mass for the D = 0 spreading check"),
    key("spreading.sigma", "1", "initial width for the spreading check"),
    key("spreading.t", "2", "spreading time"),
    key("spreading.dt", "0.05", "spreading time step"),
    key("spreading.half_width", "16", "spreading grid half width"),
    key("spreading.n", "256", "spreading grid points"),
];

fn decoherence_rate(cfg: &Config, out: &mut OutputDir) -> Result<Outcome> {
    let params = PhysicalParams::builder()
        .system_mass(cfg.f64("physics.system_mass")?)
        .temperature(cfg.f64("physics.temperature")?)
        .dissipation(cfg.f64("physics.dissipation")?)
        .hbar(cfg.f64("physics.hbar")?)
        .build()
        .context("physical parameters")?;
    let sep = cfg.f64("state.separation")?;
    let sigma = cfg.f64("state.sigma")?;
    let g = grid(cfg, "grid.half_width", "grid.n")?;
    let (t, dt) = (cfg.f64("run.t")?, cfg.f64("run.dt")?);
    let every = cfg.usize("run.record_every")?.max(1);
    step_count(t, dt).context("run")?;
    let sp_mass = cfg.f64("spreading.mass")?;
    let sp_sigma = cfg.f64("spreading.sigma")?;
    let (sp_t, sp_dt) = (cfg.f64("spreading.t")?, cfg.f64("spreading.dt")?);
    step_count(sp_t, sp_dt).context("spreading")?;
    let sp_grid = grid(cfg, "spreading.half_width", "spreading.n")?;
    let hbar = params.hbar();
    let mass = params.system_mass();
    let d = params.localization_rate();
    let rho0 = pure_state(g, &wavefunctions::cat(&g, sep, sigma, hbar))?;
    let sp0 = pure_state(sp_grid, &wavefunctions::gaussian(&sp_grid, 0.0, 0.0, sp_sigma, hbar))?;
    if sep <= 0.0 || sep.is_nan() {
        return Err(HarnessError::Config("state.separation must be positive".into()));
    }
    let (i, j) = (g.nearest_index(0.5 * sep), g.nearest_index(-0.5 * sep));
    let dist = g.point(i) - g.point(j);

    let mut series = DiagnosticsSeries::default();
    let mut coherence = Vec::new();
    let rho_t = evolve_free_decoherence_observed(&rho0, mass, hbar, d, t, dt, every, &mut |t, r| {
        coherence.push((t, r.get(i, j).norm()));
        series.record(t, r, 0.5 * sep)
    })
    .context("decoherence run")?;
    let mut reference = Vec::new();
    evolve_free_decoherence_observed(&rho0, mass, hbar, 0.0, t, dt, every, &mut |_, r| {
        reference.push(r.get(i, j).norm());
        Ok(())
    })
    .context("reference run")?;

    // The kinetic flow is common to both runs, so the ratio isolates the
    // exp(-D (x - y)^2 t) factor.
    let pts: Vec<(f64, f64)> = coherence
        .iter()
        .zip(&reference)
        .map(|(&(t, c), &r)| (t, (c / r).ln()))
        .collect();
    let rate = -fit_slope(&pts).context("rate fit")?;
    let expected = d * dist * dist;

    let sp_t_final = evolve_free_decoherence(&sp0, sp_mass, hbar, 0.0, sp_t, sp_dt).context("spreading run")?;
    let var = sp_t_final.position_moments().1;
    let spread = hbar * sp_t / (2.0 * sp_mass * sp_sigma);
    let var_expected = sp_sigma * sp_sigma + spread * spread;

    let checks = vec![
        Check::below(
            "offdiag_decay_rate",
            rel(rate, expected),
            0.05,
            format!("fitted {rate:.6e} against D d^2 = {expected:.6e}"),
        ),
        Check::below(
            "free_spreading_variance",
            (var - var_expected).abs(),
            1e-6,
            format!("variance {var:.10} against {var_expected:.10}"),
        ),
        Check::below(
            "trace_drift",
            max_abs_deviation(&series.trace, 1.0),
            1e-8,
            "max |Tr rho - 1| along the run",
        ),
        Check::below(
            "hermiticity",
            series.hermiticity.iter().copied().fold(0.0, f64::max),
            1e-10,
            "max |rho - rho^dagger| along the run",
        ),
    ];

    out.write("diagnostics.csv", &series.to_csv())?;
    let rows = coherence
        .iter()
        .zip(&reference)
        .map(|(&(t, c), &r)| [t, c, r, (-expected * t).exp()]);
    out.write("coherence.csv", &csv_string(&["t", "coherence", "reference", "analytic_ratio"], rows))?;
    out.write("snapshot.csv", &snapshot_csv(&rho_t, 2))?;

    Ok(Outcome {
        checks,
        summary: json!({
            "localization_rate": d,
            "separation": dist,
            "fitted_rate": rate,
            "expected_rate": expected,
            "relative_deviation": rel(rate, expected),
            "spreading_variance": var,
            "spreading_variance_expected": var_expected,
        }),
    })
}

// ---------------------------------------------------------------------------

const THERMALIZATION_KEYS: &[KeySpec] = &[
    key("physics.system_mass", "1", "system mass M"),
    key("physics.env_mass", "0.01", "environment particle mass m"),
    key("physics.temperature", "1", "environment temperature (kB = 1)"),
    key("physics.dissipation", "0.5", "gamma; the collision rate is (M/m) gamma"),
    key("state.p0", "3", "initial mean momentum"),
    key("state.sigma_x", "1", "initial position width"),
    key("state.sigma_p", "0.5", "initial momentum width"),
    key("grid.x_half_width", "8", "position grid half width"),
    key("grid.nx", "32", "position grid points"),
    key("grid.p_half_width", "8", "momentum grid half width"),
    key("grid.np", "64", "momentum grid points"),
    key("run.t", "10", "evolution time"),
    key("run.dt", "0.01", "Fokker-Planck time step"),
    key("run.record_every", "10", "steps between recorded rows"),
    key("boltzmann.dt", "0.001", "collision-integral time step"),
];

fn thermalization(cfg: &Config, out: &mut OutputDir) -> Result<Outcome> {
    let params = PhysicalParams::builder()
        .system_mass(cfg.f64("physics.system_mass")?)
        .env_mass(cfg.f64("physics.env_mass")?)
        .temperature(cfg.f64("physics.temperature")?)
        .dissipation(cfg.f64("physics.dissipation")?)
        .build()
        .context("physical parameters")?;
    let xg = grid(cfg, "grid.x_half_width", "grid.nx")?;
    let pg = grid(cfg, "grid.p_half_width", "grid.np")?;
    let p0 = cfg.f64("state.p0")?;
    let w0 = WignerFunction::gaussian(xg, pg, 0.0, p0, cfg.f64("state.sigma_x")?, cfg.f64("state.sigma_p")?)
        .context("initial state")?;
    let (t, dt) = (cfg.f64("run.t")?, cfg.f64("run.dt")?);
    let every = cfg.usize("run.record_every")?.max(1);
    let (_, h) = step_count(t, dt).context("run")?;
    let bound = centered_step_bound(&params, &pg);
    if h > bound {
        return Err(HarnessError::Config(format!("run.dt = {dt} exceeds the stability bound {bound}")));
    }
    let bdt = cfg.f64("boltzmann.dt")?;
    let (b_steps, bh) = step_count(t, bdt).context("boltzmann")?;
    if params.collision_rate() * bh >= MAX_COLLISION_STEP {
        return Err(HarnessError::Config(format!(
            "boltzmann.dt = {bdt} too large for collision rate {}",
            params.collision_rate()
        )));
    }
    let op = BoltzmannOperator::new(&params, pg).context("collision operator")?;
    let gamma = params.dissipation();
    let mkt = params.system_mass() * params.kt();
    let mass_ratio = params.mass_ratio();

    let (w_fp, fp) =
        evolve_fokker_planck(&w0, &params, t, dt, FokkerPlanckScheme::CenteredEuler, every).context("Fokker-Planck run")?;

    let mut bz = MomentSeries::default();
    bz.record(0.0, &w0);
    let mut w = w0.clone();
    for s in 1..=b_steps {
        w = boltzmann_step(&w, &op, bh).context("collision-integral run")?;
        if s % (every * ((h / bh).round() as usize).max(1)) == 0 || s == b_steps {
            bz.record(s as f64 * bh, &w);
        }
    }

    // Fit <P> while it is above a thousandth of its start.
    let floor = vec![1e-3 * p0.abs() / 3.0; fp.t.len()];
    let fp_rate = fit_decay_rate(&fp.t, &fp.mean_p, &floor).context("Fokker-Planck rate fit")?;
    let floor = vec![1e-3 * p0.abs() / 3.0; bz.t.len()];
    let bz_rate = fit_decay_rate(&bz.t, &bz.mean_p, &floor).context("collision rate fit")?;
    let fp_p2 = *fp.mean_p2.last().unwrap_or(&f64::NAN);
    let bz_p2 = *bz.mean_p2.last().unwrap_or(&f64::NAN);

    // Maxwell-Boltzmann residual of the centered stencil at dP and dP/2.
    let mb = |p_grid: Grid1D| -> Result<f64> {
        let w = WignerFunction::uniform_in_x(xg, p_grid, |p| (-p * p / (2.0 * mkt)).exp()).context("stationary state")?;
        let r = centered_momentum_rhs(&w, &params);
        let peak = w.values().iter().copied().fold(0.0, f64::max);
        Ok(r.iter().map(|v| v.abs()).fold(0.0, f64::max) / peak)
    };
    let coarse = mb(pg)?;
    let fine = mb(Grid1D::new(pg.x_min(), pg.x_max(), 2 * pg.len()).context("refined grid")?)?;
    let order = (coarse / fine).log2();

    let checks = vec![
        Check::below(
            "fokker_planck_terminal_p2",
            rel(fp_p2, mkt),
            0.01,
            format!("<P^2> = {fp_p2:.6} against M kT = {mkt}"),
        ),
        Check::below(
            "fokker_planck_mean_decay_rate",
            rel(fp_rate, 2.0 * gamma),
            0.02,
            format!("fitted {fp_rate:.6} against 2 gamma = {}", 2.0 * gamma),
        ),
        Check::below(
            "stationarity_refinement_order",
            (order - 2.0).abs(),
            0.25,
            format!("residual {coarse:.3e} -> {fine:.3e} on halving dP, order {order:.3}"),
        ),
        Check::below(
            "fokker_planck_norm",
            max_abs_deviation(&fp.norm, 1.0),
            1e-10,
            "max |norm - 1|",
        ),
        Check::below(
            "boltzmann_terminal_p2",
            rel(bz_p2, mkt),
            0.01,
            format!("<P^2> = {bz_p2:.6} against M kT = {mkt}"),
        ),
        Check::below(
            "boltzmann_mean_decay_rate",
            rel(bz_rate, 2.0 * gamma),
            2.0 * mass_ratio,
            format!("fitted {bz_rate:.6} against 2 gamma = {}, tolerance 2 m/M", 2.0 * gamma),
        ),
    ];

    out.write("moments_fokker_planck.csv", &fp.to_csv())?;
    out.write("moments_boltzmann.csv", &bz.to_csv())?;
    out.write("wigner_final.csv", &wigner_csv(&w_fp))?;

    Ok(Outcome {
        checks,
        summary: json!({
            "two_gamma": 2.0 * gamma,
            "fokker_planck_rate": fp_rate,
            "boltzmann_rate": bz_rate,
            "mkt": mkt,
            "fokker_planck_terminal_p2": fp_p2,
            "boltzmann_terminal_p2": bz_p2,
            "stationarity_residuals": [coarse, fine],
            "stationarity_order": order,
        }),
    })
}

// ---------------------------------------------------------------------------

const CROSSCHECK_KEYS: &[KeySpec] = &[
    key("physics.system_mass", "100", "system mass M"),
    key("physics.env_mass", "1", "environment particle mass m"),
    key("physics.temperature", "1", "environment temperature (kB = 1)"),
    key("physics.collision_rate", "1", "collision rate Gamma"),
    key("ensemble.particles", "100000", "Monte Carlo particles"),
    key("ensemble.p0", "20", "initial momentum of every particle"),
    key("ensemble.samples", "60", "sampling intervals over the run"),
    key("run.t", "60", "evolution time"),
    key("run.seed", "20240601", "ensemble seed"),
    key("boltzmann.p_half_width", "64", "momentum grid half width"),
    key("boltzmann.np", "512", "momentum grid points"),
    key("boltzmann.sigma_p", "0.5", "width of the initial momentum profile"),
    key("boltzmann.dt", "0.05", "coarse step; a second run uses dt/2"),
];

fn crosscheck_collisions(cfg: &Config, out: &mut OutputDir) -> Result<Outcome> {
    let params = PhysicalParams::builder()
        .system_mass(cfg.f64("physics.system_mass")?)
        .env_mass(cfg.f64("physics.env_mass")?)
        .temperature(cfg.f64("physics.temperature")?)
        .collision_rate(cfg.f64("physics.collision_rate")?)
        .build()
        .context("physical parameters")?;
    let n = cfg.usize("ensemble.particles")?;
    let p0 = cfg.f64("ensemble.p0")?;
    let samples = cfg.usize("ensemble.samples")?;
    let t = cfg.f64("run.t")?;
    let seed: u64 = cfg.get("run.seed")?;
    let ens = Ensemble::uniform(n, p0, seed, params).context("ensemble")?;
    let pg = grid(cfg, "boltzmann.p_half_width", "boltzmann.np")?;
    let xg = Grid1D::centered(1.0, 8).context("position grid")?;
    let sigma_p = cfg.f64("boltzmann.sigma_p")?;
    let w0 = WignerFunction::uniform_in_x(xg, pg, |p| (-0.5 * ((p - p0) / sigma_p).powi(2)).exp())
        .context("initial profile")?;
    let bdt = cfg.f64("boltzmann.dt")?;
    if samples == 0 {
        return Err(HarnessError::Config("ensemble.samples must be positive".into()));
    }
    let interval = t / samples as f64;
    // Steps must land on the sampling times for both runs.
    let per_interval = (interval / bdt - 1e-9).ceil().max(1.0) as usize;
    if params.collision_rate() * interval / per_interval as f64 >= MAX_COLLISION_STEP {
        return Err(HarnessError::Config(format!(
            "boltzmann.dt = {bdt} too large for collision rate {}",
            params.collision_rate()
        )));
    }
    let op = BoltzmannOperator::new(&params, pg).context("collision operator")?;
    let gamma = params.dissipation();
    let mass_ratio = params.mass_ratio();

    let mc = run_collision_ensemble(&ens, t, samples).context("Monte Carlo run")?;
    let mc_rate = fit_decay_rate(&mc.t, &mc.mean_p, &mc.stderr_p).context("Monte Carlo rate fit")?;
    let window = mc
        .mean_p
        .iter()
        .zip(&mc.stderr_p)
        .take_while(|(m, s)| **m > 0.0 && **m > 3.0 * **s)
        .count();

    let run_boltzmann = |sub: usize| -> Result<(MomentSeries, f64)> {
        let h = interval / sub as f64;
        let mut s = MomentSeries::default();
        s.record(0.0, &w0);
        let mut w = w0.clone();
        for k in 1..=samples {
            for _ in 0..sub {
                w = boltzmann_step(&w, &op, h).context("collision-integral run")?;
            }
            s.record(k as f64 * interval, &w);
        }
        let pts: Vec<(f64, f64)> = s.t.iter().zip(&s.mean_p).take(window).map(|(t, m)| (*t, m.ln())).collect();
        let rate = -fit_slope(&pts).context("collision rate fit")?;
        Ok((s, rate))
    };
    let (_, coarse) = run_boltzmann(per_interval)?;
    let (fine_series, fine) = run_boltzmann(2 * per_interval)?;
    let extrapolated = 2.0 * fine - coarse;

    let two_gamma = 2.0 * gamma;
    let checks = vec![
        Check::below(
            "ensemble_rate_vs_two_gamma",
            rel(mc_rate, two_gamma),
            0.1,
            format!("fitted {mc_rate:.6e} against 2 gamma = {two_gamma:.6e}"),
        ),
        Check::below(
            "boltzmann_rate_vs_ensemble",
            rel(extrapolated, mc_rate),
            0.02,
            format!("dt -> 0 rate {extrapolated:.6e} (from {coarse:.6e}, {fine:.6e}) against {mc_rate:.6e}"),
        ),
        Check::below(
            "boltzmann_rate_vs_two_gamma",
            rel(extrapolated, two_gamma),
            2.0 * mass_ratio,
            format!("{extrapolated:.6e} against {two_gamma:.6e}, tolerance 2 m/M"),
        ),
    ];

    out.write("ensemble.csv", &mc.to_csv())?;
    out.write("boltzmann.csv", &fine_series.to_csv())?;

    Ok(Outcome {
        checks,
        summary: json!({
            "two_gamma": two_gamma,
            "ensemble_rate": mc_rate,
            "boltzmann_rate_coarse": coarse,
            "boltzmann_rate_fine": fine,
            "boltzmann_rate_extrapolated": extrapolated,
            "fit_points": window,
            "collisions": mc.collisions,
            "mass_ratio": mass_ratio,
        }),
    })
}

// ---------------------------------------------------------------------------

const POSITIVITY_KEYS: &[KeySpec] = &[
    key("physics.system_mass", "1", "system mass M"),
    key("physics.temperature", "0.1", "environment temperature (kB = 1)"),
    key("physics.dissipation", "0.1", "dissipation rate gamma"),
    key("physics.hbar", "1", "Planck constant"),
    key("state.sigma", "0.5", "position width of the initial packet"),
    key("grid.half_width", "8", "grid covers [-w, w)"),
    key("grid.n", "64", "grid points (power of two)"),
    key("run.t", "1", "evolution time"),
    key("run.dt", "0.002", "RK4 time step"),
    key("run.record_every", "25", "steps between recorded rows"),
    key("scaling.t_min", "1", "lowest temperature of the generator scan"),
    key("scaling.t_max", "10", "highest temperature of the generator scan"),
    key("scaling.points", "5", "temperatures in the scan (log spaced)"),
];

fn positivity(cfg: &Config, out: &mut OutputDir) -> Result<Outcome> {
    let params = PhysicalParams::builder()
        .system_mass(cfg.f64("physics.system_mass")?)
        .temperature(cfg.f64("physics.temperature")?)
        .dissipation(cfg.f64("physics.dissipation")?)
        .hbar(cfg.f64("physics.hbar")?)
        .build()
        .context("physical parameters")?;
    let g = grid(cfg, "grid.half_width", "grid.n")?;
    let sigma = cfg.f64("state.sigma")?;
    let (t, dt) = (cfg.f64("run.t")?, cfg.f64("run.dt")?);
    let every = cfg.usize("run.record_every")?.max(1);
    step_count(t, dt).context("run")?;
    let (t_lo, t_hi) = (cfg.f64("scaling.t_min")?, cfg.f64("scaling.t_max")?);
    let points = cfg.usize("scaling.points")?;
    if !(t_lo > 0.0 && t_hi > t_lo) || points < 2 {
        return Err(HarnessError::Config("need 0 < scaling.t_min < scaling.t_max and scaling.points >= 2".into()));
    }
    let hbar = params.hbar();
    let rho0 = pure_state(g, &wavefunctions::gaussian(&g, 0.0, 0.0, sigma, hbar))?;
    let cl = QbmGenerator::caldeira_leggett(&params, g).context("Caldeira-Leggett generator")?;
    let lind = completed_lindblad_generator(&params, g).context("Lindblad generator")?;

    let mut cl_series = DiagnosticsSeries::default();
    evolve_rk4(&cl, &rho0, t, dt, every, &mut |t, r| cl_series.record(t, r, 1.0)).context("Caldeira-Leggett run")?;
    let mut l_series = DiagnosticsSeries::default();
    evolve_rk4(&lind, &rho0, t, dt, every, &mut |t, r| l_series.record(t, r, 1.0)).context("Lindblad run")?;
    let cl_min = cl_series.min_eig.iter().copied().fold(f64::INFINITY, f64::min);
    let l_min = l_series.min_eig.iter().copied().fold(f64::INFINITY, f64::min);

    let rho = rho0.matrix().to_owned();
    let mut rows = Vec::new();
    for k in 0..points {
        let temp = t_lo * (t_hi / t_lo).powf(k as f64 / (points - 1) as f64);
        let p = params.with_temperature(temp).context("temperature scan")?;
        let cl = QbmGenerator::caldeira_leggett(&p, g).context("temperature scan")?;
        let completed = completed_lindblad_generator(&p, g).context("temperature scan")?;
        let literal = qbm_lindblad_generator(&p, g).context("temperature scan")?;
        let a = frobenius(&Difference(&completed, &cl).apply(&rho));
        let b = frobenius(&Difference(&literal, &cl).apply(&rho));
        rows.push([temp, a, b]);
    }
    let log_pts = |col: usize| -> Vec<(f64, f64)> { rows.iter().map(|r| (r[0].ln(), r[col].ln())).collect() };
    let slope = fit_slope(&log_pts(1)).context("slope fit")?;
    let literal_slope = fit_slope(&log_pts(2)).context("slope fit")?;

    let checks = vec![
        Check::below(
            "caldeira_leggett_min_eigenvalue",
            cl_min,
            -1e-6,
            "positivity violation expected without Lindblad form",
        ),
        Check::at_least("lindblad_min_eigenvalue", l_min, -1e-7, "minimum over the run"),
        Check::below(
            "lindblad_trace_drift",
            max_abs_deviation(&l_series.trace, 1.0),
            1e-8,
            "max |Tr rho - 1|",
        ),
        Check::below(
            "caldeira_leggett_trace_drift",
            max_abs_deviation(&cl_series.trace, 1.0),
            1e-8,
            "max |Tr rho - 1|",
        ),
        Check::below(
            "generator_difference_slope",
            (slope + 1.0).abs(),
            0.05,
            format!("log-log slope {slope:.6} of |L_lindblad - L_CL| against T"),
        ),
    ];

    out.write("diagnostics_caldeira_leggett.csv", &cl_series.to_csv())?;
    out.write("diagnostics_lindblad.csv", &l_series.to_csv())?;
    out.write(
        "generator_difference.csv",
        &csv_string(&["T", "completed", "literal"], &rows),
    )?;

    Ok(Outcome {
        checks,
        summary: json!({
            "caldeira_leggett_min_eigenvalue": cl_min,
            "lindblad_min_eigenvalue": l_min,
            "generator_difference_slope": slope,
            "literal_operator_slope": literal_slope,
        }),
    })
}

// ---------------------------------------------------------------------------

const KERNEL_KEYS: &[KeySpec] = &[
    key("potential.kind", "gaussian", "gaussian, yukawa or contact"),
    key("potential.strength", "1", "potential strength"),
    key("potential.range", "1", "potential range (ignored for contact)"),
    key("gas.mass", "1", "gas particle mass m (hbar = 1)"),
    key("gas.beta", "1", "inverse temperature"),
    key("gas.mu", "-5.303304908059076", "chemical potential"),
    key("gas.statistics", "bose", "bose or boltzmann"),
    key("table.r_max", "8", "largest tabulated separation"),
    key("table.n_r", "33", "tabulated separations, including r = 0"),
    key("table.k_max", "8", "largest tabulated wavenumber"),
    key("table.n_k", "64", "tabulated wavenumbers"),
    key("oracle.r", "0.25,0.5,1,2,4", "separations checked by brute-force quadrature"),
];

fn kernel(cfg: &Config, out: &mut OutputDir) -> Result<Outcome> {
    let kind = match cfg.get_str("potential.kind")? {
        "gaussian" => PotentialKind::Gaussian,
        "yukawa" => PotentialKind::Yukawa,
        "contact" => PotentialKind::Contact,
        other => return Err(HarnessError::Config(format!("unknown potential kind `{other}`"))),
    };
    let statistics = match cfg.get_str("gas.statistics")? {
        "bose" => Statistics::Bose,
        "boltzmann" => Statistics::Boltzmann,
        other => return Err(HarnessError::Config(format!("unknown statistics `{other}`"))),
    };
    let pot = Potential::new(kind, cfg.f64("potential.strength")?, cfg.f64("potential.range")?).context("potential")?;
    let gas = GasParams::new(cfg.f64("gas.mass")?, cfg.f64("gas.beta")?, cfg.f64("gas.mu")?, statistics)
        .context("gas")?;
    let (r_max, n_r) = (cfg.f64("table.r_max")?, cfg.usize("table.n_r")?);
    let (k_max, n_k) = (cfg.f64("table.k_max")?, cfg.usize("table.n_k")?);
    if !(r_max > 0.0 && k_max > 0.0) || n_r < 2 || n_k < 1 {
        return Err(HarnessError::Config("table ranges must be positive with n_r >= 2, n_k >= 1".into()));
    }
    let oracle_r: Vec<f64> = cfg
        .get_str("oracle.r")?
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|r| *r > 0.0 && r.is_finite())
                .ok_or_else(|| HarnessError::Config(format!("oracle.r: bad separation `{s}`")))
        })
        .collect::<Result<_>>()?;
    let rs: Vec<f64> = (0..n_r).map(|i| r_max * i as f64 / (n_r - 1) as f64).collect();
    let ks: Vec<f64> = (1..=n_k).map(|j| k_max * j as f64 / n_k as f64).collect();
    let contact = kind == PotentialKind::Contact;

    let table = tabulate(&rs, &ks, &pot, &gas, Route::ViaCoefficient).context("kernel table")?;
    let direct = tabulate(&oracle_r, &[], &pot, &gas, Route::ViaCoefficient).context("kernel at oracle points")?;
    let res = OracleResolution::for_inputs(&pot, &gas);
    let brute: Vec<f64> = oracle_r
        .iter()
        .map(|&r| kernel_brute_force(r, &pot, &gas, &res).context("brute-force kernel"))
        .collect::<Result<_>>()?;
    let route_gap = direct
        .f_values
        .iter()
        .zip(&brute)
        .map(|(a, b)| rel(*b, *a))
        .fold(0.0, f64::max);

    let mut checks = vec![
        Check::below(
            "kernel_route_gap",
            route_gap,
            0.01,
            format!("max relative gap over {} separations", oracle_r.len()),
        ),
        Check::at_least(
            "kernel_nonnegative",
            table.f_values.iter().copied().fold(f64::INFINITY, f64::min),
            0.0,
            "min F(r) over the table",
        ),
    ];
    let density = number_density(&gas).context("number density")?;
    let density_q = number_density_quadrature(&gas).context("number density")?;
    checks.push(Check::below(
        "number_density_consistency",
        rel(density_q, density),
        1e-6,
        "closed form against quadrature",
    ));

    let mut summary = json!({
        "potential": pot,
        "gas": gas,
        "number_density": density,
        "oracle_r": oracle_r,
        "kernel_radial": direct.f_values,
        "kernel_brute_force": brute,
        "route_gap": route_gap,
    });

    if contact {
        summary["localization_rate"] = json!(null);
        summary["localization_note"] = json!("contact potential: D needs an explicit wavenumber cutoff");
    } else {
        let d = localization_rate(&pot, &gas).context("localization rate")?;
        let fit = localization_rate_fit(&pot, &gas).context("localization fit")?;
        let gap = rel(fit.d, d);
        checks.push(Check::below(
            "localization_route_gap",
            gap,
            0.005,
            format!("moment route {d:.8e}, fit route {:.8e} at r* = {:.3e}", fit.d, fit.r_star),
        ));
        summary["localization_rate"] = json!({
            "D_moment_route": d,
            "D_fit_route": fit.d,
            "relative_gap": gap,
            "fit_r_star": fit.r_star,
            "fit_quartic_correction": fit.quartic_correction,
        });
    }

    let n_max = max_occupation(&gas).context("occupation")?;
    summary["max_occupation"] = json!(n_max);
    if n_max < LOW_DENSITY_LIMIT {
        let mut worst: f64 = 0.0;
        for (&r, &full) in rs.iter().zip(&table.f_values).skip(1) {
            let low = kernel_low_density(r, &pot, &gas).context("low-density kernel")?;
            worst = worst.max((full - low) / full);
        }
        checks.push(Check::below(
            "low_density_deviation",
            worst,
            n_max,
            "max relative deviation of the low-density kernel against max n",
        ));
    } else {
        summary["low_density_note"] = json!("gas too dense for the low-density kernel; check skipped");
    }

    out.write("kernel.csv", &table.kernel_csv())?;
    out.write("coefficient.csv", &table.coefficient_csv())?;
    let rows = oracle_r.iter().zip(&brute).map(|(r, f)| [*r, *f]);
    out.write("kernel_bruteforce.csv", &csv_string(&["r", "F"], rows))?;
    out.write("summary.json", &serde_json::to_string_pretty(&summary)?)?;

    Ok(Outcome { checks, summary })
}

// ---------------------------------------------------------------------------

const EQUIVALENCE_KEYS: &[KeySpec] = &[
    key("physics.system_mass", "1", "system mass M"),
    key("physics.temperature", "1", "environment temperature (kB = 1)"),
    key("physics.dissipation", "0.5", "dissipation rate gamma"),
    key("physics.hbar", "1", "Planck constant"),
    key("state.p0", "2", "initial mean momentum"),
    key("state.sigma", "0.5", "initial position width"),
    key("grid.half_width", "12", "grid covers [-w, w)"),
    key("grid.n", "128", "grid points (power of two)"),
    key("run.t", "2", "evolution time (1/gamma by default)"),
    key("run.dt", "0.0025", "RK4 time step for both pictures"),
    key("collisions.env_mass", "0.01", "gas particle mass for the collision map"),
    key("collisions.rate", "2", "collision rate Gamma"),
    key("collisions.half_width", "0.05", "collision-map grid half width"),
    key("collisions.n", "32", "collision-map grid points"),
    key("collisions.sigma", "0.008", "collision-map packet width"),
    key("collisions.dt", "0.01", "collision-map time step"),
];

fn equivalence(cfg: &Config, out: &mut OutputDir) -> Result<Outcome> {
    let params = PhysicalParams::builder()
        .system_mass(cfg.f64("physics.system_mass")?)
        .temperature(cfg.f64("physics.temperature")?)
        .dissipation(cfg.f64("physics.dissipation")?)
        .hbar(cfg.f64("physics.hbar")?)
        .build()
        .context("physical parameters")?;
    let g = grid(cfg, "grid.half_width", "grid.n")?;
    let (t, dt) = (cfg.f64("run.t")?, cfg.f64("run.dt")?);
    step_count(t, dt).context("run")?;
    let hbar = params.hbar();
    let rho0 = pure_state(
        g,
        &wavefunctions::gaussian(&g, 0.0, cfg.f64("state.p0")?, cfg.f64("state.sigma")?, hbar),
    )?;
    let env = ThermalEnvironment1D::new(cfg.f64("collisions.env_mass")?, params.temperature(), params.kb())
        .context("collision environment")?;
    let c_rate = cfg.f64("collisions.rate")?;
    let cg = grid(cfg, "collisions.half_width", "collisions.n")?;
    let c_rho0 = pure_state(cg, &wavefunctions::gaussian(&cg, 0.0, 0.0, cfg.f64("collisions.sigma")?, hbar))?;
    let c_dt = cfg.f64("collisions.dt")?;
    if !(c_dt > 0.0 && c_rate >= 0.0) {
        return Err(HarnessError::Config("collisions.dt must be positive and collisions.rate non-negative".into()));
    }

    // Commuting diagram: evolve then transform against transform then evolve.
    let w0 = wigner_transform(&rho0, hbar).context("Wigner transform")?;
    let back = inverse_wigner_transform(&w0, hbar).context("inverse Wigner transform")?;
    let round_trip = back.sup_distance(&rho0) / rho0.matrix().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cl = QbmGenerator::caldeira_leggett(&params, g).context("Caldeira-Leggett generator")?;
    let rho_t = evolve_rk4(&cl, &rho0, t, dt, 0, &mut |_, _| Ok(())).context("density-matrix run")?;
    check_leakage(&rho_t).context("density-matrix run")?;
    let w_a = wigner_transform(&rho_t, hbar).context("Wigner transform")?;
    let (w_b, _) =
        evolve_fokker_planck(&w0, &params, t, dt, FokkerPlanckScheme::SpectralRk4, 0).context("phase-space run")?;
    let sup = w_a.sup_distance(&w_b);
    let diag: Vec<f64> = rho_t.diagonal();
    let marginal = w_a.position_marginal();
    let marginal_gap = diag.iter().zip(&marginal).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    // Collision map against the D (x - y)^2 term at short separation.
    let coll = apply_collision_decoherence(&c_rho0, &env, c_rate, hbar, c_dt).context("collision map")?;
    let d = 2.0 * env.mass() * c_rate * env.temperature() * params.kb() / (hbar * hbar);
    let fd = evolve_free_decoherence(&c_rho0, f64::INFINITY, hbar, d, c_dt, c_dt).context("free decoherence")?;
    let n = cg.len();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let j = n - 1 - i;
        if i == j || cg.point(i) <= cg.point(j) {
            continue;
        }
        let r0 = c_rho0.get(i, j).norm();
        let r1 = -(coll.get(i, j).norm() / r0).ln() / c_dt;
        let r2 = -(fd.get(i, j).norm() / r0).ln() / c_dt;
        worst = worst.max(rel(r1, r2));
        rows.push([cg.point(i) - cg.point(j), r1, r2]);
    }

    let checks = vec![
        Check::below(
            "commuting_diagram_sup",
            sup,
            1e-6,
            "sup |W[evolve(rho)] - evolve(W[rho])|",
        ),
        Check::below("wigner_round_trip", round_trip, 1e-10, "relative sup error of the inverse"),
        Check::below(
            "position_marginal",
            marginal_gap,
            1e-8,
            "sup |int W dP - rho(x, x)| at the final time",
        ),
        Check::below(
            "collision_map_rate_gap",
            worst,
            0.02,
            "max relative gap of off-diagonal decay rates, collision map against D (x - y)^2",
        ),
    ];

    out.write("wigner_from_density_matrix.csv", &wigner_csv(&w_a))?;
    out.write("wigner_from_fokker_planck.csv", &wigner_csv(&w_b))?;
    out.write(
        "collision_rates.csv",
        &csv_string(&["separation", "rate_collision_map", "rate_master_equation"], &rows),
    )?;

    Ok(Outcome {
        checks,
        summary: json!({
            "commuting_diagram_sup": sup,
            "wigner_round_trip": round_trip,
            "position_marginal": marginal_gap,
            "collision_rate_gap": worst,
            "final_min_eigenvalue": min_eigenvalue(&rho_t).context("diagnostics")?,
            "final_trace": diagnostics::trace(&rho_t).context("diagnostics")?,
        }),
    })
}
