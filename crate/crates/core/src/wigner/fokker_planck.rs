// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Phase-space Fokker-Planck equation
//! `dW/dt = -(P/M) dW/dX + 2 gamma d(PW)/dP + 2 M gamma kT d^2W/dP^2`.
//!
//! The default scheme streams exactly by a spectral shift in `X` and takes an
//! explicit Euler step of the momentum terms with centered differences (zero
//! outside the momentum grid). With that stencil the discrete moments obey
//! `d<P>/dt = -2 gamma <P>` and `d<P^2>/dt = -4 gamma <P^2> + 4 M gamma kT`
//! exactly. The spectral RK4 scheme evaluates every derivative spectrally and
//! is the phase-space image of the density-matrix evolver.

use ndarray::{Array2, Axis, Zip};

use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;
use crate::io;
use crate::params::PhysicalParams;
use crate::spectral::Spectral;
use crate::state::WignerFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FokkerPlanckScheme {
    #[default]
    CenteredEuler,
    SpectralRk4,
}

/// Stability bound on `dt` for the centered explicit step.
pub fn centered_step_bound(params: &PhysicalParams, p_grid: &Grid1D) -> f64 {
    let g = params.dissipation();
    if g == 0.0 {
        return f64::INFINITY;
    }
    let dp = p_grid.dx();
    let diff = 2.0 * params.system_mass() * g * params.kt();
    (dp * dp / (2.0 * diff)).min(1.0 / (2.0 * g))
}

/// Momentum part of the generator with centered differences.
pub fn centered_momentum_rhs(w: &WignerFunction, params: &PhysicalParams) -> Array2<f64> {
    let v = w.values();
    let pg = w.p_grid();
    let (nx, np) = v.dim();
    let dp = pg.dx();
    let g = params.dissipation();
    let diff = 2.0 * params.system_mass() * g * params.kt();
    let p: Vec<f64> = pg.points();
    let at = |i: usize, j: isize| -> f64 {
        if j < 0 || j >= np as isize {
            0.0
        } else {
            v[[i, j as usize]]
        }
    };
    let pw = |i: usize, j: isize| -> f64 {
        if j < 0 || j >= np as isize {
            0.0
        } else {
            p[j as usize] * v[[i, j as usize]]
        }
    };
    Array2::from_shape_fn((nx, np), |(i, j)| {
        let j = j as isize;
        let drift = (pw(i, j + 1) - pw(i, j - 1)) / (2.0 * dp);
        let curv = (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (dp * dp);
        2.0 * g * drift + diff * curv
    })
}

/// Exact free streaming over `dt` by a spectral shift of every `P` column.
pub fn stream(w: &WignerFunction, mass: f64, dt: f64) -> Array2<f64> {
    let mut v = w.values().to_owned();
    let sx = Spectral::new(w.x_grid());
    let pg = *w.p_grid();
    sx.filter_real(&mut v, Axis(0), |j, m| sx.shift_symbol(m, pg.point(j) * dt / mass));
    v
}

/// One centered-difference step (streaming, then explicit Euler in `P`).
pub fn fokker_planck_step(w: &WignerFunction, params: &PhysicalParams, dt: f64) -> Result<WignerFunction> {
    if !(dt > 0.0 && dt.is_finite()) {
        return invalid("time step must be positive");
    }
    let bound = centered_step_bound(params, w.p_grid());
    if dt > bound {
        return Err(Error::CflViolation { dt, bound });
    }
    let streamed = stream(w, params.system_mass(), dt);
    let sw = WignerFunction::from_parts(*w.x_grid(), *w.p_grid(), streamed);
    let rhs = centered_momentum_rhs(&sw, params);
    let mut v = sw.into_values();
    v.scaled_add(dt, &rhs);
    WignerFunction::new(*w.x_grid(), *w.p_grid(), v)
}

/// Spectral evaluation of the full generator.
#[derive(Debug, Clone)]
pub struct SpectralFokkerPlanck {
    params: PhysicalParams,
    x_grid: Grid1D,
    p_grid: Grid1D,
    sx: Spectral,
    sp: Spectral,
}

impl SpectralFokkerPlanck {
    pub fn new(params: &PhysicalParams, x_grid: Grid1D, p_grid: Grid1D) -> Self {
        Self {
            params: *params,
            x_grid,
            p_grid,
            sx: Spectral::new(&x_grid),
            sp: Spectral::new(&p_grid),
        }
    }

    pub fn rhs(&self, v: &Array2<f64>) -> Array2<f64> {
        let m = self.params.system_mass();
        let g = self.params.dissipation();
        let diff = 2.0 * m * g * self.params.kt();
        let p = self.p_grid.points();
        let dx_w = self.sx.derivative_real(v, Axis(0), 1);
        let mut pw = v.clone();
        for (j, mut col) in pw.axis_iter_mut(Axis(1)).enumerate() {
            col *= p[j];
        }
        let drift = self.sp.derivative_real(&pw, Axis(1), 1);
        let curv = self.sp.derivative_real(v, Axis(1), 2);
        let mut out = Array2::zeros(v.dim());
        Zip::indexed(&mut out)
            .and(&dx_w)
            .and(&drift)
            .and(&curv)
            .for_each(|(_, j), o, &a, &b, &c| {
                *o = -p[j] / m * a + 2.0 * g * b + diff * c;
            });
        out
    }

    pub fn rk4_step(&self, v: &Array2<f64>, dt: f64) -> Array2<f64> {
        let k1 = self.rhs(v);
        let k2 = self.rhs(&(v + &(&k1 * (0.5 * dt))));
        let k3 = self.rhs(&(v + &(&k2 * (0.5 * dt))));
        let k4 = self.rhs(&(v + &(&k3 * dt)));
        v + &((&k1 + &(&k2 * 2.0) + &(&k3 * 2.0) + &k4) * (dt / 6.0))
    }

    pub fn x_grid(&self) -> &Grid1D {
        &self.x_grid
    }
}

/// Moment record of a phase-space run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentSeries {
    pub t: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub var_p: Vec<f64>,
    pub mean_p2: Vec<f64>,
    pub norm: Vec<f64>,
}

impl MomentSeries {
    pub fn record(&mut self, t: f64, w: &WignerFunction) {
        self.t.push(t);
        self.mean_p.push(w.mean_p());
        self.var_p.push(w.var_p());
        self.mean_p2.push(w.mean_p2());
        self.norm.push(w.norm());
    }

    /// CSV with columns `t,mean_P,var_P,norm`.
    pub fn to_csv(&self) -> String {
        let rows = (0..self.t.len()).map(|k| [self.t[k], self.mean_p[k], self.var_p[k], self.norm[k]]);
        io::csv_string(&["t", "mean_P", "var_P", "norm"], rows)
    }
}

/// Integrates to time `t` in `ceil(t/dt)` equal steps, recording moments
/// every `record_every` steps (and at both ends).
pub fn evolve_fokker_planck(
    w0: &WignerFunction,
    params: &PhysicalParams,
    t: f64,
    dt: f64,
    scheme: FokkerPlanckScheme,
    record_every: usize,
) -> Result<(WignerFunction, MomentSeries)> {
    let (steps, h) = step_count(t, dt)?;
    let every = record_every.max(1);
    let mut series = MomentSeries::default();
    series.record(0.0, w0);
    let mut w = w0.clone();
    match scheme {
        FokkerPlanckScheme::CenteredEuler => {
            for s in 1..=steps {
                w = fokker_planck_step(&w, params, h)?;
                if s % every == 0 || s == steps {
                    series.record(s as f64 * h, &w);
                }
            }
        }
        FokkerPlanckScheme::SpectralRk4 => {
            let fp = SpectralFokkerPlanck::new(params, *w0.x_grid(), *w0.p_grid());
            let mut v = w0.values().to_owned();
            for s in 1..=steps {
                v = fp.rk4_step(&v, h);
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::StepTooLarge { t: s as f64 * h });
                }
                if s % every == 0 || s == steps {
                    let snap = WignerFunction::from_parts(*w0.x_grid(), *w0.p_grid(), v.clone());
                    series.record(s as f64 * h, &snap);
                }
            }
            w = WignerFunction::new(*w0.x_grid(), *w0.p_grid(), v)?;
        }
    }
    Ok((w, series))
}

/// Number of equal steps covering `[0, t]` with step at most `dt`, and the
/// step actually used.
pub fn step_count(t: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t >= 0.0 && t.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return invalid(format!("need t >= 0 and dt > 0, got t = {t}, dt = {dt}"));
    }
    if t == 0.0 {
        return Ok((0, dt));
    }
    let steps = (t / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((steps, t / steps as f64))
}

/// Wigner snapshot as `X,P,W` rows.
pub fn wigner_csv(w: &WignerFunction) -> String {
    let xg = w.x_grid();
    let pg = w.p_grid();
    let v = w.values();
    let rows = v
        .indexed_iter()
        .map(|((i, j), &val)| [xg.point(i), pg.point(j), val]);
    io::csv_string(&["X", "P", "W"], rows)
}
