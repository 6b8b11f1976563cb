// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Fourier-space operators on periodic grids.
//!
//! Odd-order derivative symbols vanish on the Nyquist mode so that the
//! derivative matrix is real and antisymmetric; even orders are powers of the
//! same symbol. With this convention `p = -i hbar D` is Hermitian and
//! `D^2 = D * D` exactly.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid1D;
use crate::par;

#[derive(Clone)]
pub struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid1D) -> Self {
        let n = grid.len();
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            k: (0..n).map(|m| grid.wavenumber(m)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Angular wavenumbers in FFT order; the Nyquist entry is `-pi/dx`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Wavenumber with the Nyquist mode set to zero.
    pub fn derivative_wavenumber(&self, m: usize) -> f64 {
        if m == self.nyquist() {
            0.0
        } else {
            self.k[m]
        }
    }

    /// Symbol of `d^order/du^order`.
    pub fn derivative_symbol(&self, order: u32) -> Vec<Complex64> {
        (0..self.n)
            .map(|m| Complex64::new(0.0, self.derivative_wavenumber(m)).powu(order))
            .collect()
    }

    /// In-place `lane <- IFFT(mult(m) * FFT(lane))`.
    pub fn filter_lane(&self, lane: &mut [Complex64], mult: impl Fn(usize) -> Complex64) {
        debug_assert_eq!(lane.len(), self.n);
        self.forward.process(lane);
        let scale = 1.0 / self.n as f64;
        for (m, v) in lane.iter_mut().enumerate() {
            *v *= mult(m) * scale;
        }
        self.inverse.process(lane);
    }

    /// Applies a Fourier multiplier to every lane of `a` along `axis`.
    /// `mult(lane_index, mode)` may vary from lane to lane.
    pub fn filter<F>(&self, a: &mut Array2<Complex64>, axis: Axis, mult: F)
    where
        F: Fn(usize, usize) -> Complex64 + Sync + Send,
    {
        par::for_each_lane(a, axis, |i, mut lane| {
            let mut buf: Vec<Complex64> = lane.iter().copied().collect();
            self.filter_lane(&mut buf, |m| mult(i, m));
            for (dst, src) in lane.iter_mut().zip(buf) {
                *dst = src;
            }
        });
    }

    /// Same as [`Spectral::filter`] for real data; the imaginary part of the
    /// result is discarded.
    pub fn filter_real<F>(&self, a: &mut Array2<f64>, axis: Axis, mult: F)
    where
        F: Fn(usize, usize) -> Complex64 + Sync + Send,
    {
        par::for_each_lane(a, axis, |i, mut lane| {
            let mut buf: Vec<Complex64> = lane.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            self.filter_lane(&mut buf, |m| mult(i, m));
            for (dst, src) in lane.iter_mut().zip(buf) {
                *dst = src.re;
            }
        });
    }

    /// Derivative of order `order` along `axis`, returned as a new array.
    pub fn derivative(&self, a: &Array2<Complex64>, axis: Axis, order: u32) -> Array2<Complex64> {
        let sym = self.derivative_symbol(order);
        let mut out = a.clone();
        self.filter(&mut out, axis, |_, m| sym[m]);
        out
    }

    pub fn derivative_real(&self, a: &Array2<f64>, axis: Axis, order: u32) -> Array2<f64> {
        let sym = self.derivative_symbol(order);
        let mut out = a.clone();
        self.filter_real(&mut out, axis, |_, m| sym[m]);
        out
    }

    /// Multiplier that translates a band-limited lane by `shift` (physical
    /// units): `f(u) -> f(u - shift)`. The Nyquist mode keeps a real factor so
    /// real data stays real.
    pub fn shift_symbol(&self, m: usize, shift: f64) -> Complex64 {
        if m == self.nyquist() {
            Complex64::new((self.k[m] * shift).cos(), 0.0)
        } else {
            Complex64::from_polar(1.0, -self.k[m] * shift)
        }
    }

    /// Dense matrix of the first-derivative operator (real, antisymmetric).
    pub fn derivative_matrix(&self) -> Array2<f64> {
        let mut d = Array2::<Complex64>::zeros((self.n, self.n));
        for j in 0..self.n {
            d[[j, j]] = Complex64::new(1.0, 0.0);
        }
        let sym = self.derivative_symbol(1);
        self.filter(&mut d, Axis(0), |_, m| sym[m]);
        d.mapv(|v| v.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn differentiates_a_sine() {
        let g = Grid1D::new(0.0, 2.0 * PI, 32).unwrap();
        let s = Spectral::new(&g);
        let mut a = Array2::<Complex64>::zeros((1, 32));
        for i in 0..32 {
            a[[0, i]] = Complex64::new((3.0 * g.point(i)).sin(), 0.0);
        }
        let d = s.derivative(&a, Axis(1), 1);
        for i in 0..32 {
            assert!((d[[0, i]].re - 3.0 * (3.0 * g.point(i)).cos()).abs() < 1e-12);
        }
        let d2 = s.derivative(&a, Axis(1), 2);
        for i in 0..32 {
            assert!((d2[[0, i]].re + 9.0 * a[[0, i]].re).abs() < 1e-11);
        }
    }

    #[test]
    fn derivative_matrix_is_antisymmetric() {
        let g = Grid1D::new(-3.0, 3.0, 16).unwrap();
        let d = Spectral::new(&g).derivative_matrix();
        for i in 0..16 {
            for j in 0..16 {
                assert!((d[[i, j]] + d[[j, i]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_translates_gaussian() {
        let g = Grid1D::new(-10.0, 10.0, 128).unwrap();
        let s = Spectral::new(&g);
        let mut a = Array2::<f64>::zeros((128, 1));
        for i in 0..128 {
            a[[i, 0]] = (-g.point(i).powi(2)).exp();
        }
        s.filter_real(&mut a, Axis(0), |_, m| s.shift_symbol(m, 0.37));
        for i in 0..128 {
            let x = g.point(i) - 0.37;
            assert!((a[[i, 0]] - (-x * x).exp()).abs() < 1e-12);
        }
    }
}
