// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Density-matrix master-equation integrators.

mod generator;
mod lindblad;

use ndarray::{Array2, Axis, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics;
use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;
use crate::io;
use crate::params::PhysicalParams;
use crate::spectral::Spectral;
use crate::state::DensityMatrix;
use crate::wigner::step_count;

pub use generator::{
    frobenius, kinetic_hamiltonian, momentum_matrix, position_matrix, rk4_step, Difference, Generator,
    LindbladGenerator, QbmGenerator,
};
pub use lindblad::{build_qbm_lindblad, caldeira_leggett_completion, LindbladCompletion, LindbladOperator};

/// Exact free propagation `rho -> U rho U^dag` over a fixed time, applied
/// spectrally along both indices.
#[derive(Debug, Clone)]
pub struct KineticPropagator {
    spectral: Spectral,
    left: Vec<Complex64>,
    right: Vec<Complex64>,
}

impl KineticPropagator {
    pub fn new(grid: &Grid1D, mass: f64, hbar: f64, tau: f64) -> Self {
        let spectral = Spectral::new(grid);
        // derivative_symbol(2) = -k^2 with the Nyquist mode removed, the same
        // operator the RK4 generators use.
        let c = hbar * tau / (2.0 * mass);
        let s2 = spectral.derivative_symbol(2);
        let left = s2.iter().map(|s| Complex64::from_polar(1.0, c * s.re)).collect();
        let right = s2.iter().map(|s| Complex64::from_polar(1.0, -c * s.re)).collect();
        Self {
            spectral,
            left,
            right,
        }
    }

    pub fn apply(&self, rho: &mut Array2<Complex64>) {
        self.spectral.filter(rho, Axis(0), |_, m| self.left[m]);
        self.spectral.filter(rho, Axis(1), |_, m| self.right[m]);
    }
}

/// Callback receiving `(t, state)` at recorded times.
pub type Observer<'a> = dyn FnMut(f64, &DensityMatrix) -> Result<()> + 'a;

fn no_observer(_: f64, _: &DensityMatrix) -> Result<()> {
    Ok(())
}

/// Strang split step for the free-decoherence equation: half kinetic step,
/// the exact factor `exp(-D (x - y)^2 dt)`, half kinetic step.
pub fn evolve_free_decoherence(
    rho0: &DensityMatrix,
    mass: f64,
    hbar: f64,
    d: f64,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    evolve_free_decoherence_observed(rho0, mass, hbar, d, t, dt, 0, &mut no_observer)
}

/// [`evolve_free_decoherence`] that reports the state every `every` steps
/// (0 = never) and checks for leakage after each step.
#[allow(clippy::too_many_arguments)]
pub fn evolve_free_decoherence_observed(
    rho0: &DensityMatrix,
    mass: f64,
    hbar: f64,
    d: f64,
    t: f64,
    dt: f64,
    every: usize,
    observer: &mut Observer<'_>,
) -> Result<DensityMatrix> {
    if !(mass > 0.0 && hbar > 0.0 && d >= 0.0) {
        return invalid("need mass > 0, hbar > 0 and D >= 0");
    }
    let (steps, h) = step_count(t, dt)?;
    let grid = *rho0.grid();
    let half = KineticPropagator::new(&grid, mass, hbar, 0.5 * h);
    let x = grid.points();
    let n = grid.len();
    let damp = Array2::from_shape_fn((n, n), |(i, j)| (-d * (x[i] - x[j]).powi(2) * h).exp());
    let mut rho = rho0.matrix().to_owned();
    if every > 0 {
        observer(0.0, rho0)?;
    }
    for s in 1..=steps {
        half.apply(&mut rho);
        Zip::from(&mut rho).and(&damp).for_each(|r, &f| *r *= f);
        half.apply(&mut rho);
        let state = DensityMatrix::from_parts(grid, rho);
        diagnostics::check_leakage(&state)?;
        if every > 0 && (s % every == 0 || s == steps) {
            observer(s as f64 * h, &state)?;
        }
        rho = state.into_matrix();
    }
    DensityMatrix::new(grid, rho)
}

const ANTI_HERMITIAN_LIMIT: f64 = 1e-9;

fn anti_hermitian(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += 2.0 * (a[[i, j]] - a[[j, i]].conj()).norm_sqr();
        }
        sum += (2.0 * a[[i, i]].im).powi(2);
    }
    0.5 * sum.sqrt()
}

/// Integrates `d rho/dt = g(rho)` with RK4 in `ceil(t/dt)` equal steps.
pub fn evolve_rk4(
    g: &impl Generator,
    rho0: &DensityMatrix,
    t: f64,
    dt: f64,
    every: usize,
    observer: &mut Observer<'_>,
) -> Result<DensityMatrix> {
    let (steps, h) = step_count(t, dt)?;
    let grid = *rho0.grid();
    let mut rho = rho0.matrix().to_owned();
    let limit = 1e6 * frobenius(&rho).max(1.0);
    if every > 0 {
        observer(0.0, rho0)?;
    }
    for s in 1..=steps {
        rho = rk4_step(g, &rho, h);
        let norm = frobenius(&rho);
        // An unstable step shows up first as growth of the anti-Hermitian
        // part, which the exact flow keeps at zero.
        if !norm.is_finite() || norm > limit || anti_hermitian(&rho) > ANTI_HERMITIAN_LIMIT * norm {
            return Err(Error::StepTooLarge { t: s as f64 * h });
        }
        if every > 0 && (s % every == 0 || s == steps) {
            let state = DensityMatrix::from_parts(grid, rho);
            observer(s as f64 * h, &state)?;
            rho = state.into_matrix();
        }
    }
    DensityMatrix::new(grid, rho)
}

/// RK4 integration of the Caldeira-Leggett equation. Positivity is not
/// preserved by this equation.
pub fn evolve_caldeira_leggett(
    rho0: &DensityMatrix,
    params: &PhysicalParams,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    let g = QbmGenerator::caldeira_leggett(params, *rho0.grid())?;
    evolve_rk4(&g, rho0, t, dt, 0, &mut no_observer)
}

/// RK4 integration of the Lindblad equation with Hamiltonian `h` (a
/// sample-space matrix) and operators `ls`.
pub fn evolve_lindblad(
    rho0: &DensityMatrix,
    h: &Array2<Complex64>,
    ls: &[LindbladOperator],
    hbar: f64,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    let grid = *rho0.grid();
    let mats = ls.iter().map(|l| l.to_matrix(&grid, hbar)).collect();
    let g = LindbladGenerator::new(h, mats, hbar)?;
    evolve_rk4(&g, rho0, t, dt, 0, &mut no_observer)
}

/// Generator of the Lindblad-completed QBM equation: kinetic energy plus
/// the `{x, p}` shift, with the completion operator.
pub fn completed_lindblad_generator(params: &PhysicalParams, grid: Grid1D) -> Result<LindbladGenerator> {
    let c = caldeira_leggett_completion(params)?;
    let hbar = params.hbar();
    let h = kinetic_hamiltonian(&grid, params.system_mass(), hbar) + c.hamiltonian_shift(&grid, hbar);
    LindbladGenerator::new(&h, vec![c.operator.to_matrix(&grid, hbar)], hbar)
}

/// Generator with the single literal QBM operator and the kinetic
/// Hamiltonian only.
pub fn qbm_lindblad_generator(params: &PhysicalParams, grid: Grid1D) -> Result<LindbladGenerator> {
    let l = build_qbm_lindblad(params)?;
    let hbar = params.hbar();
    let h = kinetic_hamiltonian(&grid, params.system_mass(), hbar);
    LindbladGenerator::new(&h, vec![l.to_matrix(&grid, hbar)], hbar)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    FreeDecoherence,
    CaldeiraLeggett,
    /// Lindblad-completed QBM equation (see [`caldeira_leggett_completion`]).
    Lindblad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    SplitStep,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolverConfig {
    model: Model,
    dt: f64,
    scheme: Scheme,
}

impl EvolverConfig {
    pub fn new(model: Model, dt: f64, scheme: Scheme) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return invalid(format!("time step must be positive, got {dt}"));
        }
        if scheme == Scheme::SplitStep && model != Model::FreeDecoherence {
            return invalid("the split-step scheme only applies to free decoherence");
        }
        Ok(Self { model, dt, scheme })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
}

/// Evolves `rho0` to time `t` under the configured model. Free decoherence
/// uses `D = 2 M gamma kT / hbar^2` from `params`.
pub fn evolve(
    rho0: &DensityMatrix,
    params: &PhysicalParams,
    cfg: &EvolverConfig,
    t: f64,
    every: usize,
    observer: &mut Observer<'_>,
) -> Result<DensityMatrix> {
    let grid = *rho0.grid();
    match (cfg.model, cfg.scheme) {
        (Model::FreeDecoherence, Scheme::SplitStep) => evolve_free_decoherence_observed(
            rho0,
            params.system_mass(),
            params.hbar(),
            params.localization_rate(),
            t,
            cfg.dt,
            every,
            observer,
        ),
        (Model::FreeDecoherence, Scheme::Rk4) => {
            let g = QbmGenerator::free_decoherence(
                grid,
                params.system_mass(),
                params.hbar(),
                params.localization_rate(),
            )?;
            evolve_rk4(&g, rho0, t, cfg.dt, every, observer)
        }
        (Model::CaldeiraLeggett, _) => {
            let g = QbmGenerator::caldeira_leggett(params, grid)?;
            evolve_rk4(&g, rho0, t, cfg.dt, every, observer)
        }
        (Model::Lindblad, _) => {
            let g = completed_lindblad_generator(params, grid)?;
            evolve_rk4(&g, rho0, t, cfg.dt, every, observer)
        }
    }
}

/// Diagnostics recorded along a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSeries {
    pub t: Vec<f64>,
    pub trace: Vec<f64>,
    pub purity: Vec<f64>,
    pub min_eig: Vec<f64>,
    pub offdiag_peak: Vec<f64>,
    pub hermiticity: Vec<f64>,
}

impl DiagnosticsSeries {
    /// Appends one row; `offdiag_separation` selects the coherences that
    /// count towards `offdiag_peak`.
    pub fn record(&mut self, t: f64, rho: &DensityMatrix, offdiag_separation: f64) -> Result<()> {
        self.t.push(t);
        self.trace.push(diagnostics::trace(rho)?);
        self.purity.push(diagnostics::purity(rho));
        self.min_eig.push(diagnostics::min_eigenvalue(rho)?);
        self.offdiag_peak.push(diagnostics::offdiag_peak(rho, offdiag_separation));
        self.hermiticity.push(rho.hermiticity_deviation());
        Ok(())
    }

    /// CSV with columns `t,trace,purity,min_eig,offdiag_peak`.
    pub fn to_csv(&self) -> String {
        let rows = (0..self.t.len()).map(|k| {
            [
                self.t[k],
                self.trace[k],
                self.purity[k],
                self.min_eig[k],
                self.offdiag_peak[k],
            ]
        });
        io::csv_string(&["t", "trace", "purity", "min_eig", "offdiag_peak"], rows)
    }
}

/// Snapshot CSV `x,y,re_rho,im_rho`, keeping every `stride`-th point.
pub fn snapshot_csv(rho: &DensityMatrix, stride: usize) -> String {
    let s = stride.max(1);
    let g = rho.grid();
    let m = rho.matrix();
    let rows = m
        .indexed_iter()
        .filter(|((i, j), _)| i % s == 0 && j % s == 0)
        .map(|((i, j), v)| [g.point(i), g.point(j), v.re, v.im]);
    io::csv_string(&["x", "y", "re_rho", "im_rho"], rows)
}
