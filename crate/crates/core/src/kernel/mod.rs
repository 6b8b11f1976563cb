// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Many-body decoherence kernel of a particle scattering a thermal gas.
//!
//! Units have `hbar = 1` throughout this module: momenta are wavenumbers and
//! `omega_q = q^2 / 2m` is an energy.
//!
//! `C(k)` is normalized so that the one-particle kernel is
//! `F(r) = (2 pi)^{-3} int d^3k C(k) (1 - exp(i k.r))`. The `(x - y)^2`
//! coefficient of `F` is the localization rate `D`. Terms proportional to the
//! gas particle number and the energy shift commute with the one-particle
//! density operator and are not represented.

mod coefficient;
mod oracle;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use coefficient::{
    kernel_direct, kernel_low_density, kernel_with, lindblad_coefficient, lindblad_coefficient_with,
    localization_rate, localization_rate_fit, localization_rate_with_cutoff, max_occupation, number_density,
    number_density_quadrature, summarize, tabulate, FitRoute, KernelResult, KernelSummary, Route, Weighting,
    LOW_DENSITY_LIMIT,
};
pub use oracle::{kernel_brute_force, on_shell_point, OracleResolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Gaussian,
    Yukawa,
    Contact,
}

/// Isotropic two-body potential, described by its Fourier transform `nu(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub kind: PotentialKind,
    pub strength: f64,
    /// Ignored for contact potentials.
    pub range: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind, strength: f64, range: f64) -> Result<Self> {
        if !strength.is_finite() {
            return invalid("potential strength must be finite");
        }
        if kind != PotentialKind::Contact && !(range > 0.0 && range.is_finite()) {
            return invalid(format!("potential range must be positive, got {range}"));
        }
        Ok(Self { kind, strength, range })
    }

    pub fn gaussian(strength: f64, range: f64) -> Result<Self> {
        Self::new(PotentialKind::Gaussian, strength, range)
    }

    pub fn yukawa(strength: f64, range: f64) -> Result<Self> {
        Self::new(PotentialKind::Yukawa, strength, range)
    }

    pub fn contact(strength: f64) -> Result<Self> {
        Self::new(PotentialKind::Contact, strength, 0.0)
    }

    /// `nu(k)`.
    pub fn fourier(&self, k: f64) -> f64 {
        match self.kind {
            PotentialKind::Gaussian => self.strength * (-0.5 * k * k * self.range * self.range).exp(),
            PotentialKind::Yukawa => self.strength / (k * k + 1.0 / (self.range * self.range)),
            PotentialKind::Contact => self.strength,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            strength: self.strength * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bose,
    Boltzmann,
}

/// Ideal thermal gas of environment particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    pub m: f64,
    pub beta: f64,
    pub mu: f64,
    pub statistics: Statistics,
}

impl GasParams {
    pub fn new(m: f64, beta: f64, mu: f64, statistics: Statistics) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return invalid(format!("gas mass must be positive, got {m}"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return invalid(format!("beta must be positive, got {beta}"));
        }
        if !mu.is_finite() {
            return invalid("chemical potential must be finite");
        }
        if statistics == Statistics::Bose && mu >= 0.0 {
            return invalid(format!("Bose gas needs mu < 0, got {mu}"));
        }
        Ok(Self { m, beta, mu, statistics })
    }

    pub fn bose(m: f64, beta: f64, mu: f64) -> Result<Self> {
        Self::new(m, beta, mu, Statistics::Bose)
    }

    pub fn boltzmann(m: f64, beta: f64, mu: f64) -> Result<Self> {
        Self::new(m, beta, mu, Statistics::Boltzmann)
    }

    /// `omega_q = q^2 / 2m`.
    pub fn omega(&self, q: f64) -> f64 {
        q * q / (2.0 * self.m)
    }

    /// Thermal wavenumber `sqrt(m / beta)`.
    pub fn thermal_wavenumber(&self) -> f64 {
        (self.m / self.beta).sqrt()
    }
}

/// Mean occupation of the mode with wavenumber `q`.
pub fn occupation(q: f64, gas: &GasParams) -> Result<f64> {
    let x = gas.beta * (gas.omega(q) - gas.mu);
    match gas.statistics {
        Statistics::Bose => {
            if x <= 0.0 {
                return Err(Error::DivergentOccupation { exponent: x });
            }
            Ok(1.0 / x.exp_m1())
        }
        Statistics::Boltzmann => Ok((-x).exp()),
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// First-order (Born) amplitude `f(k, k') = (m / 2 pi) nu(k - k')`.
pub fn born_amplitude(k: [f64; 3], k_prime: [f64; 3], pot: &Potential, m: f64) -> f64 {
    m / (2.0 * std::f64::consts::PI) * pot.fourier(norm3(sub3(k, k_prime)))
}

/// Amplitude density for scattering `k0 -> kf` off a static point particle
/// at `x0`: `(i / 2V) nu(kf - k0) exp(-i (kf - k0).x0)`. The phase is the
/// Fourier transform of the system's number density.
pub fn classical_scattering_amplitude(
    k0: [f64; 3],
    kf: [f64; 3],
    x0: [f64; 3],
    pot: &Potential,
    volume: f64,
) -> Result<Complex64> {
    if !(volume > 0.0) {
        return invalid("volume must be positive");
    }
    let (a, b) = (norm3(k0), norm3(kf));
    if (a - b).abs() > 1e-12 * a.max(b).max(f64::MIN_POSITIVE) {
        return Err(Error::OffShell { k0: a, kf: b });
    }
    let dk = sub3(kf, k0);
    let phase = -(dk[0] * x0[0] + dk[1] * x0[1] + dk[2] * x0[2]);
    Ok(Complex64::new(0.0, 0.5 / volume) * pot.fourier(norm3(dk)) * Complex64::from_polar(1.0, phase))
}
