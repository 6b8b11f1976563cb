// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Position-space density matrices and phase-space Wigner functions.

use ndarray::{Array2, ArrayView2, Axis};
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::Grid1D;

/// `rho[i][j] ~ rho(x_i, y_j)` on a periodic position grid.
///
/// `rho` is a kernel density: the trace is `dx * sum_i rho[i][i]` and the
/// discrete operator is `dx * rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    grid: Grid1D,
    rho: Array2<Complex64>,
}

impl DensityMatrix {
    pub fn new(grid: Grid1D, rho: Array2<Complex64>) -> Result<Self> {
        let n = grid.len();
        if rho.dim() != (n, n) {
            return invalid(format!(
                "density matrix shape {:?} does not match grid size {n}",
                rho.dim()
            ));
        }
        if rho.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return invalid("density matrix has non-finite entries");
        }
        Ok(Self { grid, rho })
    }

    pub(crate) fn from_parts(grid: Grid1D, rho: Array2<Complex64>) -> Self {
        debug_assert_eq!(rho.dim(), (grid.len(), grid.len()));
        Self { grid, rho }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        let n = grid.len();
        Self {
            grid,
            rho: Array2::zeros((n, n)),
        }
    }

    /// `|psi><psi|`, with `psi` normalized so that `dx * sum |psi|^2 = 1`.
    pub fn pure(grid: Grid1D, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != grid.len() {
            return invalid("wavefunction length does not match grid");
        }
        let norm2: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dx();
        if !(norm2.is_finite() && norm2 > 0.0) {
            return invalid("wavefunction has zero or non-finite norm");
        }
        let s = 1.0 / norm2.sqrt();
        let n = grid.len();
        let rho = Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj() * s * s);
        Ok(Self { grid, rho })
    }

    /// Convex combination `sum_k w_k rho_k` of states on a common grid.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return invalid("mixture needs at least one component");
        };
        let grid = first.grid;
        let mut rho = Array2::zeros(first.rho.dim());
        for (w, d) in parts {
            if d.grid != grid {
                return invalid("mixture components live on different grids");
            }
            rho.scaled_add(Complex64::new(*w, 0.0), &d.rho);
        }
        Ok(Self { grid, rho })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn matrix(&self) -> ArrayView2<'_, Complex64> {
        self.rho.view()
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[[i, j]]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            rho: self.rho.mapv(|v| v * factor),
        }
    }

    /// `max |rho[i][j] - conj(rho[j][i])|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.rho[[i, j]] - self.rho[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Real part of the diagonal, i.e. the position density.
    pub fn diagonal(&self) -> Vec<f64> {
        self.rho.diag().iter().map(|v| v.re).collect()
    }

    /// Mean and variance of position.
    pub fn position_moments(&self) -> (f64, f64) {
        let dx = self.grid.dx();
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (i, p) in self.diagonal().into_iter().enumerate() {
            let x = self.grid.point(i);
            m0 += p * dx;
            m1 += p * x * dx;
            m2 += p * x * x * dx;
        }
        let mean = m1 / m0;
        (mean, m2 / m0 - mean * mean)
    }

    /// `max |rho_a - rho_b|` over all entries.
    pub fn sup_distance(&self, other: &DensityMatrix) -> f64 {
        self.rho
            .iter()
            .zip(other.rho.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Real phase-space function `w[[ix, jp]] ~ W(X_ix, P_jp)`.
///
/// Normalized as a density: `dX * dP * sum w = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFunction {
    x_grid: Grid1D,
    p_grid: Grid1D,
    w: Array2<f64>,
}

impl WignerFunction {
    pub fn new(x_grid: Grid1D, p_grid: Grid1D, w: Array2<f64>) -> Result<Self> {
        if w.dim() != (x_grid.len(), p_grid.len()) {
            return invalid(format!(
                "Wigner array shape {:?} does not match grids ({}, {})",
                w.dim(),
                x_grid.len(),
                p_grid.len()
            ));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return invalid("Wigner function has non-finite entries");
        }
        Ok(Self { x_grid, p_grid, w })
    }

    pub(crate) fn from_parts(x_grid: Grid1D, p_grid: Grid1D, w: Array2<f64>) -> Self {
        Self { x_grid, p_grid, w }
    }

    /// Product of Gaussians in `X` and `P`, normalized on the grid.
    pub fn gaussian(
        x_grid: Grid1D,
        p_grid: Grid1D,
        x0: f64,
        p0: f64,
        sigma_x: f64,
        sigma_p: f64,
    ) -> Result<Self> {
        if !(sigma_x > 0.0 && sigma_p > 0.0) {
            return invalid("Gaussian widths must be positive");
        }
        let w = Array2::from_shape_fn((x_grid.len(), p_grid.len()), |(i, j)| {
            let x = (x_grid.point(i) - x0) / sigma_x;
            let p = (p_grid.point(j) - p0) / sigma_p;
            (-0.5 * (x * x + p * p)).exp()
        });
        Self::new(x_grid, p_grid, w)?.normalized()
    }

    /// Spatially uniform state with momentum profile `f(P)`, normalized.
    pub fn uniform_in_x(
        x_grid: Grid1D,
        p_grid: Grid1D,
        profile: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let w = Array2::from_shape_fn((x_grid.len(), p_grid.len()), |(_, j)| {
            profile(p_grid.point(j))
        });
        Self::new(x_grid, p_grid, w)?.normalized()
    }

    pub fn zeros(x_grid: Grid1D, p_grid: Grid1D) -> Self {
        Self {
            x_grid,
            p_grid,
            w: Array2::zeros((x_grid.len(), p_grid.len())),
        }
    }

    fn normalized(self) -> Result<Self> {
        let norm = self.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return invalid("cannot normalize a Wigner function with zero integral");
        }
        Ok(Self {
            w: self.w.mapv(|v| v / norm),
            ..self
        })
    }

    pub fn x_grid(&self) -> &Grid1D {
        &self.x_grid
    }

    pub fn p_grid(&self) -> &Grid1D {
        &self.p_grid
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.w.view()
    }

    pub fn into_values(self) -> Array2<f64> {
        self.w
    }

    /// `dX * dP * sum w`.
    pub fn norm(&self) -> f64 {
        self.w.sum() * self.x_grid.dx() * self.p_grid.dx()
    }

    /// `int dP W(P, X)` at every `X`.
    pub fn position_marginal(&self) -> Vec<f64> {
        let dp = self.p_grid.dx();
        self.w.sum_axis(Axis(1)).iter().map(|v| v * dp).collect()
    }

    /// `int dX W(P, X)` at every `P`.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        let dx = self.x_grid.dx();
        self.w.sum_axis(Axis(0)).iter().map(|v| v * dx).collect()
    }

    fn p_moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        let dp = self.p_grid.dx();
        self.momentum_marginal()
            .iter()
            .enumerate()
            .map(|(j, m)| m * f(self.p_grid.point(j)) * dp)
            .sum()
    }

    /// `<P>` normalized by the current integral.
    pub fn mean_p(&self) -> f64 {
        self.p_moment(|p| p) / self.norm()
    }

    /// `<P^2>` normalized by the current integral.
    pub fn mean_p2(&self) -> f64 {
        self.p_moment(|p| p * p) / self.norm()
    }

    pub fn var_p(&self) -> f64 {
        let m = self.mean_p();
        self.mean_p2() - m * m
    }

    pub fn mean_x(&self) -> f64 {
        let dx = self.x_grid.dx();
        let s: f64 = self
            .position_marginal()
            .iter()
            .enumerate()
            .map(|(i, m)| m * self.x_grid.point(i) * dx)
            .sum();
        s / self.norm()
    }

    /// Smallest entry; negative values signal non-classical states.
    pub fn min_value(&self) -> f64 {
        self.w.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_distance(&self, other: &WignerFunction) -> f64 {
        self.w
            .iter()
            .zip(other.w.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Wavefunction builders on a grid. None of these normalize; pass the result
/// to [`DensityMatrix::pure`].
pub mod wavefunctions {
    use super::*;

    /// `exp(-(x - x0)^2 / (4 sigma^2) + i p0 x / hbar)`; `sigma` is the
    /// position standard deviation of `|psi|^2`.
    pub fn gaussian(grid: &Grid1D, x0: f64, p0: f64, sigma: f64, hbar: f64) -> Vec<Complex64> {
        grid.points()
            .into_iter()
            .map(|x| {
                let u = (x - x0) / sigma;
                Complex64::from_polar((-0.25 * u * u).exp(), p0 * x / hbar)
            })
            .collect()
    }

    /// Even superposition of two Gaussians centred at `+-separation/2`.
    pub fn cat(grid: &Grid1D, separation: f64, sigma: f64, hbar: f64) -> Vec<Complex64> {
        let a = gaussian(grid, 0.5 * separation, 0.0, sigma, hbar);
        let b = gaussian(grid, -0.5 * separation, 0.0, sigma, hbar);
        a.into_iter().zip(b).map(|(u, v)| u + v).collect()
    }
}
