// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar diagnostics of density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Largest tolerated imaginary part of the trace.
pub const TRACE_IMAG_TOL: f64 = 1e-10;

/// Largest tolerated `|rho - rho^dagger|` entry for eigenvalue diagnostics.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Probability allowed in the outer grid margin before [`check_leakage`] fails.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

/// `dx * sum_i Re rho[i][i]`.
pub fn trace(rho: &DensityMatrix) -> Result<f64> {
    let dx = rho.grid().dx();
    let s: Complex64 = rho.matrix().diag().sum() * dx;
    if s.im.abs() > TRACE_IMAG_TOL {
        return Err(Error::NonHermitianTrace { imag: s.im });
    }
    Ok(s.re)
}

/// `dx^2 * sum |rho[i][j]|^2`, i.e. `Tr (dx rho)^2`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let dx = rho.grid().dx();
    rho.matrix().iter().map(|v| v.norm_sqr()).sum::<f64>() * dx * dx
}

/// All eigenvalues of the Hermitian operator `dx * rho`, ascending.
pub fn eigenvalues(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let deviation = rho.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitian { deviation });
    }
    let n = rho.grid().len();
    let dx = rho.grid().dx();
    let m = rho.matrix();
    // Symmetrize so round-off asymmetry cannot leak into the spectrum.
    let a = DMatrix::from_fn(n, n, |i, j| (m[[i, j]] + m[[j, i]].conj()) * (0.5 * dx));
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Smallest eigenvalue of `dx * rho`.
pub fn min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    Ok(eigenvalues(rho)?[0])
}

/// Fraction of position probability on the outer 10% of the grid (5% per
/// side, at least one point each).
pub fn leakage_fraction(rho: &DensityMatrix) -> f64 {
    let n = rho.grid().len();
    let margin = (n / 20).max(1);
    let dx = rho.grid().dx();
    let diag = rho.diagonal();
    let edge: f64 = diag[..margin].iter().chain(&diag[n - margin..]).sum();
    let total: f64 = diag.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    (edge * dx / (total * dx)).abs()
}

/// Fails with [`Error::Leakage`] if more than [`LEAKAGE_LIMIT`] of the
/// probability sits near the periodic boundary.
pub fn check_leakage(rho: &DensityMatrix) -> Result<()> {
    let fraction = leakage_fraction(rho);
    if fraction > LEAKAGE_LIMIT {
        return Err(Error::Leakage {
            fraction,
            limit: LEAKAGE_LIMIT,
        });
    }
    Ok(())
}

/// Largest `|rho[i][j]|` over entries with `|x_i - y_j| >= min_separation`.
pub fn offdiag_peak(rho: &DensityMatrix, min_separation: f64) -> f64 {
    let g = rho.grid();
    let m = rho.matrix();
    let mut peak = 0.0f64;
    for ((i, j), v) in m.indexed_iter() {
        if (g.point(i) - g.point(j)).abs() >= min_separation {
            peak = peak.max(v.norm());
        }
    }
    peak
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::state::wavefunctions;
    use ndarray::Array2;

    fn gaussian_state(g: Grid1D, x0: f64) -> DensityMatrix {
        DensityMatrix::pure(g, &wavefunctions::gaussian(&g, x0, 0.0, 0.7, 1.0)).unwrap()
    }

    #[test]
    fn trace_is_linear() {
        let g = Grid1D::centered(10.0, 64).unwrap();
        let rho = gaussian_state(g, 0.0);
        assert!((trace(&rho).unwrap() - 1.0).abs() < 1e-10);
        assert!((trace(&rho.scaled(2.0)).unwrap() - 2.0).abs() < 1e-10);
        assert_eq!(trace(&DensityMatrix::zeros(g)).unwrap(), 0.0);
    }

    #[test]
    fn complex_trace_is_rejected() {
        let g = Grid1D::centered(1.0, 8).unwrap();
        let mut a = Array2::zeros((8, 8));
        a[[0, 0]] = Complex64::new(0.0, 1.0);
        let rho = DensityMatrix::new(g, a).unwrap();
        assert!(matches!(trace(&rho), Err(Error::NonHermitianTrace { .. })));
        assert!(matches!(min_eigenvalue(&rho), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn pure_and_mixed_purity() {
        let g = Grid1D::centered(12.0, 128).unwrap();
        let a = gaussian_state(g, -4.0);
        let b = gaussian_state(g, 4.0);
        assert!((purity(&a) - 1.0).abs() < 1e-8);
        let mix = DensityMatrix::mixture(&[(0.5, a.clone()), (0.5, b)]).unwrap();
        assert!((purity(&mix) - 0.5).abs() < 1e-8);
        assert!(min_eigenvalue(&a).unwrap() > -1e-10);
    }

    #[test]
    fn maximally_mixed_spectrum() {
        let g = Grid1D::centered(4.0, 16).unwrap();
        let dx = g.dx();
        let mut a = Array2::zeros((16, 16));
        for i in 0..16 {
            a[[i, i]] = Complex64::new(1.0 / (16.0 * dx), 0.0);
        }
        let rho = DensityMatrix::new(g, a).unwrap();
        let ev = eigenvalues(&rho).unwrap();
        assert!(ev.iter().all(|e| (e - 1.0 / 16.0).abs() < 1e-14));
    }

    #[test]
    fn leakage_detects_edge_mass() {
        let g = Grid1D::centered(10.0, 128).unwrap();
        assert!(check_leakage(&gaussian_state(g, 0.0)).is_ok());
        assert!(matches!(
            check_leakage(&gaussian_state(g, 9.0)),
            Err(Error::Leakage { .. })
        ));
    }
}
