// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Right-hand sides of the density-matrix master equations and a fixed-step
//! RK4 driver.
//!
//! Operators act on the kernel `rho[i][j]` by plain matrix products with
//! sample-space matrices: `x` is diagonal and `p = -i hbar D`, where `D` is
//! the spectral first derivative with the Nyquist mode removed (real and
//! antisymmetric, so `p` is Hermitian).

use ndarray::{Array2, Axis, Zip};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;
use crate::params::PhysicalParams;
use crate::spectral::Spectral;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Linear map `rho -> d rho / dt`.
pub trait Generator: Sync {
    fn apply(&self, rho: &Array2<Complex64>) -> Array2<Complex64>;
}

/// `(i hbar/2M)(d_x^2 - d_y^2) rho - gamma (x - y)(d_x - d_y) rho - D (x - y)^2 rho`.
///
/// With `gamma = 0` this is the free-decoherence equation; with
/// `D = 2 M gamma kT / hbar^2` it is the Caldeira-Leggett equation. The
/// dissipative term equals `-(i gamma/hbar)[x, {p, rho}]`.
#[derive(Debug, Clone)]
pub struct QbmGenerator {
    grid: Grid1D,
    spectral: Spectral,
    kinetic: f64,
    dissipation: f64,
    localization: f64,
}

impl QbmGenerator {
    pub fn new(grid: Grid1D, mass: f64, hbar: f64, dissipation: f64, localization: f64) -> Result<Self> {
        if !(mass > 0.0 && hbar > 0.0) {
            return invalid("mass and hbar must be positive");
        }
        if !(dissipation >= 0.0 && localization >= 0.0) {
            return invalid("dissipation and localization rate must be non-negative");
        }
        Ok(Self {
            grid,
            spectral: Spectral::new(&grid),
            kinetic: hbar / (2.0 * mass),
            dissipation,
            localization,
        })
    }

    /// Caldeira-Leggett generator for `params`.
    pub fn caldeira_leggett(params: &PhysicalParams, grid: Grid1D) -> Result<Self> {
        Self::new(
            grid,
            params.system_mass(),
            params.hbar(),
            params.dissipation(),
            params.localization_rate(),
        )
    }

    /// Free-particle decoherence generator with localization rate `d`.
    pub fn free_decoherence(grid: Grid1D, mass: f64, hbar: f64, d: f64) -> Result<Self> {
        Self::new(grid, mass, hbar, 0.0, d)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }
}

impl Generator for QbmGenerator {
    fn apply(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let s = &self.spectral;
        let d2x = s.derivative(rho, Axis(0), 2);
        let d2y = s.derivative(rho, Axis(1), 2);
        let x = self.grid.points();
        let mut out = Array2::zeros(rho.dim());
        let kin = I * self.kinetic;
        if self.dissipation > 0.0 {
            let d1x = s.derivative(rho, Axis(0), 1);
            let d1y = s.derivative(rho, Axis(1), 1);
            let n = rho.nrows();
            out = Array2::from_shape_fn((n, n), |(i, j)| {
                let xi = x[i] - x[j];
                kin * (d2x[[i, j]] - d2y[[i, j]])
                    - (d1x[[i, j]] - d1y[[i, j]]) * (self.dissipation * xi)
                    - rho[[i, j]] * (self.localization * xi * xi)
            });
        } else {
            Zip::indexed(&mut out)
                .and(rho)
                .and(&d2x)
                .and(&d2y)
                .for_each(|(i, j), o, &r, &a, &b| {
                    let xi = x[i] - x[j];
                    *o = kin * (a - b) - r * (self.localization * xi * xi);
                });
        }
        out
    }
}

/// `-(i/hbar)[H, rho] + sum_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2)`.
///
/// With `hbar = 1` this is the textbook GKSL form; for other values `H`
/// keeps energy units and the `L_k` carry rate units.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    h_eff: Array2<Complex64>,
    h_eff_dag: Array2<Complex64>,
    ls: Vec<Array2<Complex64>>,
    ls_dag: Vec<Array2<Complex64>>,
    hbar: f64,
}

impl LindbladGenerator {
    pub fn new(h: &Array2<Complex64>, ls: Vec<Array2<Complex64>>, hbar: f64) -> Result<Self> {
        let n = h.nrows();
        if h.dim() != (n, n) || ls.iter().any(|l| l.dim() != (n, n)) {
            return invalid("Hamiltonian and Lindblad matrices must be square and equally sized");
        }
        let scale = h.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let mut deviation = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                deviation = deviation.max((h[[i, j]] - h[[j, i]].conj()).norm());
            }
        }
        if deviation > 1e-10 * scale {
            return Err(Error::NonHermitian { deviation });
        }
        let ls_dag: Vec<_> = ls.iter().map(|l| l.t().mapv(|v| v.conj())).collect();
        // H_eff = H - (i hbar/2) sum L^dag L
        let mut h_eff = h.clone();
        for (l, ld) in ls.iter().zip(&ls_dag) {
            h_eff.scaled_add(-0.5 * hbar * I, &ld.dot(l));
        }
        let h_eff_dag = h_eff.t().mapv(|v| v.conj());
        Ok(Self {
            h_eff,
            h_eff_dag,
            ls,
            ls_dag,
            hbar,
        })
    }
}

impl Generator for LindbladGenerator {
    fn apply(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        // -(i/hbar)(H_eff rho - rho H_eff^dag)
        let c = Complex64::new(0.0, -1.0 / self.hbar);
        let mut out = (self.h_eff.dot(rho) - rho.dot(&self.h_eff_dag)) * c;
        for (l, ld) in self.ls.iter().zip(&self.ls_dag) {
            out += &l.dot(rho).dot(ld);
        }
        out
    }
}

/// Sum of generators, e.g. to compare two equations term by term.
pub struct Difference<'a, A: Generator, B: Generator>(pub &'a A, pub &'a B);

impl<A: Generator, B: Generator> Generator for Difference<'_, A, B> {
    fn apply(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        self.0.apply(rho) - self.1.apply(rho)
    }
}

/// Classical fourth-order Runge-Kutta step.
pub fn rk4_step(g: &impl Generator, rho: &Array2<Complex64>, dt: f64) -> Array2<Complex64> {
    let h = Complex64::new(dt, 0.0);
    let k1 = g.apply(rho);
    let k2 = g.apply(&(rho + &(&k1 * (h * 0.5))));
    let k3 = g.apply(&(rho + &(&k2 * (h * 0.5))));
    let k4 = g.apply(&(rho + &(&k3 * h)));
    rho + &((&k1 + &(&k2 * Complex64::new(2.0, 0.0)) + &(&k3 * Complex64::new(2.0, 0.0)) + &k4)
        * (h / 6.0))
}

/// Frobenius norm.
pub fn frobenius(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Position operator `x` as a diagonal matrix.
pub fn position_matrix(grid: &Grid1D) -> Array2<Complex64> {
    let mut m = Array2::zeros((grid.len(), grid.len()));
    for (i, x) in grid.points().into_iter().enumerate() {
        m[[i, i]] = Complex64::new(x, 0.0);
    }
    m
}

/// Momentum operator `p = -i hbar D`.
pub fn momentum_matrix(grid: &Grid1D, hbar: f64) -> Array2<Complex64> {
    Spectral::new(grid)
        .derivative_matrix()
        .mapv(|v| Complex64::new(0.0, -hbar * v))
}

/// Free Hamiltonian `p^2 / 2M`.
pub fn kinetic_hamiltonian(grid: &Grid1D, mass: f64, hbar: f64) -> Array2<Complex64> {
    let p = momentum_matrix(grid, hbar);
    p.dot(&p) / Complex64::new(2.0 * mass, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{wavefunctions, DensityMatrix};

    #[test]
    fn qbm_generator_matches_operator_form() {
        // -(i gamma/hbar)[x,{p,rho}] - (D)[x,[x,rho]] - (i/hbar)[p^2/2M, rho]
        let g = Grid1D::centered(6.0, 32).unwrap();
        let (m, hbar, gamma, d) = (1.3, 0.7, 0.4, 0.9);
        let psi = wavefunctions::gaussian(&g, 0.3, 0.8, 0.9, hbar);
        let rho = DensityMatrix::pure(g, &psi).unwrap().into_matrix();
        let gen = QbmGenerator::new(g, m, hbar, gamma, d).unwrap();
        let x = position_matrix(&g);
        let p = momentum_matrix(&g, hbar);
        let h = kinetic_hamiltonian(&g, m, hbar);
        let comm = |a: &Array2<Complex64>, b: &Array2<Complex64>| a.dot(b) - b.dot(a);
        let anti = |a: &Array2<Complex64>, b: &Array2<Complex64>| a.dot(b) + b.dot(a);
        let expect = comm(&x, &anti(&p, &rho)) * Complex64::new(0.0, -gamma / hbar)
            - comm(&x, &comm(&x, &rho)) * Complex64::new(d, 0.0)
            + comm(&h, &rho) * Complex64::new(0.0, -1.0 / hbar);
        let got = gen.apply(&rho);
        assert!(frobenius(&(got - &expect)) < 1e-9 * frobenius(&expect));
    }

    #[test]
    fn lindblad_rejects_non_hermitian_h() {
        let mut h = Array2::zeros((8, 8));
        h[[0, 1]] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            LindbladGenerator::new(&h, vec![], 1.0),
            Err(Error::NonHermitian { .. })
        ));
    }
}
