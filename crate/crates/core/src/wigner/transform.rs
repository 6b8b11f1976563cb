// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Discrete Wigner transform on a periodic grid.
//!
//! For centre index `k` and separation `d` in `[-n/2, n/2)` the sample
//! `R_k(d) = rho(X + d dx/2, X - d dx/2)` is read directly off the grid when
//! `d` is even. Odd separations land on the half-shifted centre
//! `x_k + dx/2`; those columns are moved back by half a sample with a
//! band-limited shift along `k`. The unpaired column `d = -n/2` is stored as
//! `Re + Im`, which the pairing `R_{k+n/2}(-n/2) = conj R_k(-n/2)` lets the
//! inverse undo. A DFT over `d` then gives `W` on the momentum grid
//! `P_j = (j - n/2) 2 pi hbar / L`. Both marginals hold exactly and the
//! pair is a bijection on Hermitian matrices.

use std::f64::consts::PI;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;
use crate::par;
use crate::state::{DensityMatrix, WignerFunction};

/// Relative Hermiticity tolerance for [`wigner_transform`] inputs.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;

fn sign(i: usize) -> f64 {
    if i.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Half-sample shift symbol along the centre index; `forward` moves odd
/// columns from `x_k + dx/2` back to `x_k`.
fn half_shift(n: usize, m: usize, forward: bool) -> Complex64 {
    if m == n / 2 {
        return Complex64::new(1.0, 0.0);
    }
    let signed = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
    let phase = PI * signed / n as f64;
    Complex64::from_polar(1.0, if forward { -phase } else { phase })
}

/// Index pair `(i, j)` holding `R_k(d)` for `d_idx = d + n/2`.
fn source_index(n: usize, k: usize, d_idx: usize) -> (usize, usize) {
    let d = d_idx as isize - (n / 2) as isize;
    let p = d.rem_euclid(2);
    let n = n as isize;
    let k = k as isize;
    let i = (k + (d + p) / 2).rem_euclid(n) as usize;
    let j = (k - (d - p) / 2).rem_euclid(n) as usize;
    (i, j)
}

fn shift_odd_columns(r: &mut Array2<Complex64>, forward: bool) {
    let n = r.nrows();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let scale = 1.0 / n as f64;
    // Lanes along axis 0 are the columns; even d (even d_idx) stays put.
    par::for_each_lane(r, Axis(0), |d_idx, mut col| {
        if d_idx % 2 == 0 {
            return;
        }
        let mut buf: Vec<Complex64> = col.iter().copied().collect();
        fwd.process(&mut buf);
        for (m, v) in buf.iter_mut().enumerate() {
            *v *= half_shift(n, m, forward) * scale;
        }
        inv.process(&mut buf);
        for (dst, src) in col.iter_mut().zip(buf) {
            *dst = src;
        }
    });
}

/// `W(X, P) = (1/2 pi hbar) int dxi exp(-i P xi / hbar) rho(X + xi/2, X - xi/2)`
/// on the grid `x_grid x x_grid.conjugate_momentum(hbar)`.
pub fn wigner_transform(rho: &DensityMatrix, hbar: f64) -> Result<WignerFunction> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return invalid("hbar must be positive");
    }
    let scale = rho.matrix().iter().map(|v| v.norm()).fold(1.0, f64::max);
    let deviation = rho.hermiticity_deviation();
    if deviation > HERMITIAN_INPUT_TOL * scale {
        return Err(Error::NonHermitian { deviation });
    }
    let grid = *rho.grid();
    let n = grid.len();
    let m = rho.matrix();
    let mut r = Array2::from_shape_fn((n, n), |(k, d_idx)| {
        let (i, j) = source_index(n, k, d_idx);
        m[[i, j]]
    });
    shift_odd_columns(&mut r, true);
    for k in 0..n {
        let v = r[[k, 0]];
        r[[k, 0]] = Complex64::new(v.re + v.im, 0.0);
    }

    let fft = FftPlanner::new().plan_fft_forward(n);
    let c = grid.dx() / (2.0 * PI * hbar);
    let mut w = Array2::<f64>::zeros((n, n));
    par::for_each_lane(&mut w, Axis(1), |k, mut row| {
        let mut buf: Vec<Complex64> = (0..n).map(|d| r[[k, d]] * sign(d)).collect();
        fft.process(&mut buf);
        for (j, v) in row.iter_mut().enumerate() {
            *v = c * sign(j) * buf[j].re;
        }
    });
    WignerFunction::new(grid, grid.conjugate_momentum(hbar), w)
}

/// Inverse of [`wigner_transform`]. `W` must live on a position grid and its
/// conjugate momentum grid for the given `hbar`.
pub fn inverse_wigner_transform(w: &WignerFunction, hbar: f64) -> Result<DensityMatrix> {
    let grid = *w.x_grid();
    let n = grid.len();
    let expected = grid.conjugate_momentum(hbar);
    let pg = w.p_grid();
    if pg.len() != n
        || (pg.x_min() - expected.x_min()).abs() > 1e-12 * expected.x_max().abs()
        || (pg.x_max() - expected.x_max()).abs() > 1e-12 * expected.x_max().abs()
    {
        return invalid("momentum grid is not conjugate to the position grid");
    }
    let c = grid.dx() / (2.0 * PI * hbar);
    let vals = w.values();
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    let mut r = Array2::<Complex64>::zeros((n, n));
    par::for_each_lane(&mut r, Axis(1), |k, mut row| {
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(vals[[k, j]] * sign(j) / c, 0.0))
            .collect();
        ifft.process(&mut buf);
        for (d, v) in row.iter_mut().enumerate() {
            *v = buf[d] * (sign(d) / n as f64);
        }
    });
    let half = n / 2;
    let nyq: Vec<f64> = (0..n).map(|k| r[[k, 0]].re).collect();
    for k in 0..n {
        let a = nyq[k];
        let b = nyq[(k + half) % n];
        r[[k, 0]] = Complex64::new(0.5 * (a + b), 0.5 * (a - b));
    }
    shift_odd_columns(&mut r, false);

    let mut rho = Array2::<Complex64>::zeros((n, n));
    for k in 0..n {
        for d_idx in 0..n {
            let (i, j) = source_index(n, k, d_idx);
            rho[[i, j]] = r[[k, d_idx]];
        }
    }
    // Enforce exact Hermiticity; the two halves differ only by round-off.
    let herm = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (rho[[i, j]] + rho[[j, i]].conj()));
    DensityMatrix::new(grid, herm)
}

/// Momentum grid used by [`wigner_transform`] for a position grid.
pub fn wigner_momentum_grid(x_grid: &Grid1D, hbar: f64) -> Grid1D {
    x_grid.conjugate_momentum(hbar)
}
