// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Boltzmann-type collision integrator for the system Wigner function.
//!
//! Each collision maps the system momentum `P -> aP + bp`; inverting for the
//! pre-collision momentum gives the gain term
//! `Gamma int dp g(p) (1/a) W(P/a - (b/a) p, X)`. The environment average
//! runs over Gauss-Hermite nodes matched to the Maxwell-Boltzmann density,
//! and the shifted, stretched momentum argument is interpolated from the
//! grid. The whole collision term is linear in `W` along `P`, so it is
//! assembled once into an `n_p x n_p` matrix.

use std::f64::consts::PI;

use ndarray::{Array2, Axis};

use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;
use crate::kinematics::CollisionCoefficients;
use crate::params::{PhysicalParams, ThermalEnvironment1D};
use crate::quadrature::gauss_hermite;
use crate::spectral::Spectral;
use crate::state::WignerFunction;

/// Largest `m/M` accepted; the rewritten gain term is singular at `a = 0`.
pub const MAX_MASS_RATIO: f64 = 0.1;

/// Largest `Gamma dt` for the explicit collision step.
pub const MAX_COLLISION_STEP: f64 = 0.1;

pub const DEFAULT_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Periodic band-limited (trigonometric) interpolation.
    #[default]
    Spectral,
    /// Piecewise linear; a cross-check for the spectral mode.
    Linear,
}

#[derive(Debug, Clone)]
pub struct BoltzmannOperator {
    params: PhysicalParams,
    env: ThermalEnvironment1D,
    coeff: CollisionCoefficients,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    p_grid: Grid1D,
    interpolation: Interpolation,
    matrix: Array2<f64>,
}

impl BoltzmannOperator {
    /// Operator on momentum grid `p_grid` with the default 32-node rule and
    /// spectral interpolation.
    pub fn new(params: &PhysicalParams, p_grid: Grid1D) -> Result<Self> {
        Self::with_options(params, p_grid, DEFAULT_NODES, Interpolation::Spectral)
    }

    pub fn with_options(
        params: &PhysicalParams,
        p_grid: Grid1D,
        n_nodes: usize,
        interpolation: Interpolation,
    ) -> Result<Self> {
        if params.mass_ratio() >= MAX_MASS_RATIO {
            return invalid(format!(
                "Boltzmann evolver needs m/M < {MAX_MASS_RATIO}, got {}",
                params.mass_ratio()
            ));
        }
        if n_nodes < 2 {
            return invalid("need at least two quadrature nodes");
        }
        let env = ThermalEnvironment1D::from_params(params);
        let (t, w) = gauss_hermite(n_nodes);
        // g(p) dp with <p^2> = s^2: p = sqrt(2) s t, weight w / sqrt(pi).
        let s = (2.0 * env.p2_mean()).sqrt();
        let nodes = t.iter().map(|t| s * t).collect();
        let weights = w.iter().map(|w| w / PI.sqrt()).collect();
        let mut op = Self {
            params: *params,
            env,
            coeff: CollisionCoefficients::from_params(params),
            nodes,
            weights,
            p_grid,
            interpolation,
            matrix: Array2::zeros((0, 0)),
        };
        op.matrix = op.assemble();
        Ok(op)
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn environment(&self) -> &ThermalEnvironment1D {
        &self.env
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn p_grid(&self) -> &Grid1D {
        &self.p_grid
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    /// Collision generator as a matrix acting on a momentum profile.
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    fn assemble(&self) -> Array2<f64> {
        let n = self.p_grid.len();
        let (a, b) = (self.coeff.a(), self.coeff.b());
        let gamma = self.params.collision_rate();
        let mut c = Array2::<f64>::zeros((n, n));
        let mut row = vec![0.0; n];
        for j in 0..n {
            let pj = self.p_grid.point(j);
            for (p, w) in self.nodes.iter().zip(&self.weights) {
                let u = pj / a - (b / a) * p;
                self.interpolation_weights(u, &mut row);
                for l in 0..n {
                    c[[j, l]] += gamma * w / a * row[l];
                }
            }
            c[[j, j]] -= gamma;
        }
        c
    }

    /// Weights `s_l` with `f(u) ~ sum_l s_l f_l`; zero outside the grid.
    fn interpolation_weights(&self, u: f64, out: &mut [f64]) {
        out.fill(0.0);
        let g = &self.p_grid;
        if u < g.x_min() || u > g.x_max() - g.dx() {
            return;
        }
        let n = g.len();
        let t = (u - g.x_min()) / g.dx();
        match self.interpolation {
            Interpolation::Linear => {
                let i = (t.floor() as usize).min(n - 2);
                let f = t - i as f64;
                out[i] = 1.0 - f;
                out[i + 1] = f;
            }
            Interpolation::Spectral => {
                let nf = n as f64;
                for (l, o) in out.iter_mut().enumerate() {
                    let theta = 2.0 * PI * (t - l as f64) / nf;
                    let half = 0.5 * theta;
                    *o = if half.sin().abs() < 1e-14 {
                        1.0
                    } else {
                        (0.5 * nf * theta).sin() / (nf * half.tan())
                    };
                }
            }
        }
    }
}

fn stream(w: &mut Array2<f64>, x_grid: &Grid1D, p_grid: &Grid1D, mass: f64, dt: f64) {
    let sx = Spectral::new(x_grid);
    sx.filter_real(w, Axis(0), |j, m| sx.shift_symbol(m, p_grid.point(j) * dt / mass));
}

/// One step of the collision-plus-streaming equation. Free streaming is
/// applied exactly by a spectral shift in `X`; the collision term then takes
/// an explicit Euler step, which requires `Gamma dt < 0.1`.
pub fn boltzmann_step(w: &WignerFunction, op: &BoltzmannOperator, dt: f64) -> Result<WignerFunction> {
    if !(dt > 0.0 && dt.is_finite()) {
        return invalid("time step must be positive");
    }
    if w.p_grid() != op.p_grid() {
        return invalid("Wigner function and operator use different momentum grids");
    }
    let gamma = op.params.collision_rate();
    if gamma * dt >= MAX_COLLISION_STEP {
        return Err(Error::CflViolation {
            dt,
            bound: MAX_COLLISION_STEP / gamma,
        });
    }
    let mut v = w.values().to_owned();
    stream(&mut v, w.x_grid(), w.p_grid(), op.params.system_mass(), dt);
    let gain = v.dot(&op.matrix.t());
    v.scaled_add(dt, &gain);
    WignerFunction::new(*w.x_grid(), *w.p_grid(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ratio: f64, rate: f64) -> PhysicalParams {
        PhysicalParams::builder()
            .system_mass(1.0 / ratio)
            .env_mass(1.0)
            .collision_rate(rate)
            .build()
            .unwrap()
    }

    #[test]
    fn quadrature_is_normalized_and_symmetric() {
        let pg = Grid1D::centered(20.0, 64).unwrap();
        let op = BoltzmannOperator::new(&params(0.01, 1.0), pg).unwrap();
        let s: f64 = op.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-10);
        let m2: f64 = op.nodes().iter().zip(op.weights()).map(|(p, w)| w * p * p).sum();
        assert!((m2 - op.environment().p2_mean()).abs() < 1e-10);
        let n = op.nodes().len();
        for i in 0..n {
            assert_eq!(op.nodes()[i], -op.nodes()[n - 1 - i]);
        }
    }

    #[test]
    fn rejects_comparable_masses() {
        let pg = Grid1D::centered(20.0, 64).unwrap();
        assert!(BoltzmannOperator::new(&params(1.0, 1.0), pg).is_err());
        assert!(BoltzmannOperator::new(&params(0.2, 1.0), pg).is_err());
    }

    #[test]
    fn no_collisions_leave_homogeneous_state() {
        let xg = Grid1D::centered(5.0, 8).unwrap();
        let pg = Grid1D::centered(20.0, 64).unwrap();
        let op = BoltzmannOperator::new(&params(0.01, 0.0), pg).unwrap();
        let w = WignerFunction::uniform_in_x(xg, pg, |p| (-(p - 2.0).powi(2)).exp()).unwrap();
        let out = boltzmann_step(&w, &op, 0.1).unwrap();
        assert!(out.sup_distance(&w) < 1e-14);
    }

    #[test]
    fn large_steps_are_rejected() {
        let xg = Grid1D::centered(5.0, 8).unwrap();
        let pg = Grid1D::centered(20.0, 64).unwrap();
        let op = BoltzmannOperator::new(&params(0.01, 2.0), pg).unwrap();
        let w = WignerFunction::uniform_in_x(xg, pg, |p| (-p * p).exp()).unwrap();
        assert!(matches!(
            boltzmann_step(&w, &op, 0.06),
            Err(Error::CflViolation { .. })
        ));
    }

    #[test]
    fn spectral_interpolation_reproduces_smooth_profile() {
        let pg = Grid1D::centered(20.0, 128).unwrap();
        let op = BoltzmannOperator::new(&params(0.01, 1.0), pg).unwrap();
        let f: Vec<f64> = pg.points().iter().map(|p| (-p * p / 8.0).exp()).collect();
        let mut s = vec![0.0; 128];
        for u in [-3.3, 0.01, 2.7] {
            op.interpolation_weights(u, &mut s);
            let v: f64 = s.iter().zip(&f).map(|(a, b)| a * b).sum();
            assert!((v - (-u * u / 8.0f64).exp()).abs() < 1e-12);
        }
    }
}
