// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad operators linear in `x` and `p`.
//!
//! For `L = alpha x + i beta p` (real `alpha`, `beta`) the dissipator is
//! `-(alpha^2/2)[x,[x,rho]] - (beta^2/2)[p,[p,rho]] - i alpha beta [x,{p,rho}]
//!  + (i alpha beta/2)[{x,p},rho]`,
//! an identity that holds for any matrices and so survives discretization.
//! Matching the Caldeira-Leggett dissipation needs `alpha beta = gamma/hbar`
//! and a Hamiltonian shift `(gamma/2){x,p}` to cancel the last term; the
//! remainder `-(beta^2/2)[p,[p,rho]]` is then proportional to `1/T`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::evolvers::generator::{momentum_matrix, position_matrix};
use crate::grid::Grid1D;
use crate::params::PhysicalParams;

/// `L = x_coeff * x + p_coeff * p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladOperator {
    pub x_coeff: Complex64,
    pub p_coeff: Complex64,
}

impl LindbladOperator {
    pub fn new(x_coeff: Complex64, p_coeff: Complex64) -> Self {
        Self { x_coeff, p_coeff }
    }

    pub fn is_zero(&self) -> bool {
        self.x_coeff == Complex64::new(0.0, 0.0) && self.p_coeff == Complex64::new(0.0, 0.0)
    }

    /// Matrix on `grid`, with `x` diagonal and `p` spectral.
    pub fn to_matrix(&self, grid: &Grid1D, hbar: f64) -> Array2<Complex64> {
        position_matrix(grid) * self.x_coeff + momentum_matrix(grid, hbar) * self.p_coeff
    }
}

/// The single QBM Lindblad operator
/// `L = (4 M gamma kT/hbar^2)^{1/2} x + i (gamma/2 M kT)^{1/2} p`.
pub fn build_qbm_lindblad(params: &PhysicalParams) -> Result<LindbladOperator> {
    let kt = params.kt();
    if !(kt > 0.0) {
        return invalid("temperature must be positive");
    }
    let m = params.system_mass();
    let g = params.dissipation();
    let hbar = params.hbar();
    Ok(LindbladOperator {
        x_coeff: Complex64::new((4.0 * m * g * kt / (hbar * hbar)).sqrt(), 0.0),
        p_coeff: Complex64::new(0.0, (g / (2.0 * m * kt)).sqrt()),
    })
}

/// Lindblad operator whose dissipator reproduces the Caldeira-Leggett
/// generator up to a `1/T` term, with the Hamiltonian shift that goes with it.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladCompletion {
    pub operator: LindbladOperator,
    /// Coefficient `c` of the Hamiltonian shift `c {x, p}`.
    pub anticommutator_coeff: f64,
}

impl LindbladCompletion {
    /// `c {x, p}` on `grid`.
    pub fn hamiltonian_shift(&self, grid: &Grid1D, hbar: f64) -> Array2<Complex64> {
        let x = position_matrix(grid);
        let p = momentum_matrix(grid, hbar);
        (x.dot(&p) + p.dot(&x)) * Complex64::new(self.anticommutator_coeff, 0.0)
    }
}

/// `L = (4 M gamma kT/hbar^2)^{1/2} x + i (gamma/4 M kT)^{1/2} p` and the
/// shift `(gamma/2){x, p}`.
pub fn caldeira_leggett_completion(params: &PhysicalParams) -> Result<LindbladCompletion> {
    let kt = params.kt();
    if !(kt > 0.0) {
        return invalid("temperature must be positive");
    }
    let m = params.system_mass();
    let g = params.dissipation();
    let hbar = params.hbar();
    Ok(LindbladCompletion {
        operator: LindbladOperator {
            x_coeff: Complex64::new((4.0 * m * g * kt / (hbar * hbar)).sqrt(), 0.0),
            p_coeff: Complex64::new(0.0, (g / (4.0 * m * kt)).sqrt()),
        },
        anticommutator_coeff: 0.5 * g,
    })
}
