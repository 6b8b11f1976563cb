// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform periodic grid `x_i = x_min + i*dx`, `i = 0..n`, `dx = (x_max - x_min)/n`.
///
/// `n` is a power of two no smaller than 8 so that every axis admits
/// radix-2 spectral operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return invalid(format!("grid needs x_max > x_min, got [{x_min}, {x_max})"));
        }
        if n < 8 || !n.is_power_of_two() {
            return invalid(format!("grid size must be a power of two >= 8, got {n}"));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid of `n` points centred on zero with half-width `half_width`.
    pub fn centered(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    /// Period of the grid.
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Angular wavenumber of FFT mode `m` (standard FFT ordering), with the
    /// unpaired Nyquist mode reported as `-pi/dx`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let n = self.n as isize;
        let m = m as isize;
        let signed = if m < n / 2 { m } else { m - n };
        2.0 * PI * signed as f64 / self.length()
    }

    /// Index of the grid point nearest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.dx()).round();
        i.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Momentum grid conjugate to this position grid, as used by the
    /// discrete Wigner transform: `n` points spaced `2 pi hbar / L`,
    /// spanning `[-pi hbar/dx, pi hbar/dx)`.
    pub fn conjugate_momentum(&self, hbar: f64) -> Grid1D {
        let p_max = PI * hbar / self.dx();
        Grid1D {
            x_min: -p_max,
            x_max: p_max,
            n: self.n,
        }
    }

    /// Same grid with `n` doubled and `dx` halved.
    pub fn refined(&self) -> Grid1D {
        Grid1D {
            n: self.n * 2,
            ..*self
        }
    }
}
