// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Physical parameters shared by every model.
//!
//! All quantities are dimensionless in user-chosen units. `hbar` and `kb`
//! default to one but stay explicit so that formulas carrying them can be
//! exercised with non-unit values.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Relative tolerance on the `gamma = (m/M) Gamma` identity when both rates
/// are supplied.
pub const RATE_CONSISTENCY_TOL: f64 = 1e-12;

/// Masses, temperature, rates and unit constants.
///
/// Construct through [`PhysicalParams::builder`]. When only one of the
/// collision rate `Gamma` and the dissipation `gamma` is given the other is
/// derived from `gamma = (m/M) Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    system_mass: f64,
    env_mass: f64,
    temperature: f64,
    collision_rate: f64,
    dissipation: f64,
    hbar: f64,
    kb: f64,
    chemical_potential: f64,
}

impl PhysicalParams {
    pub fn builder() -> PhysicalParamsBuilder {
        PhysicalParamsBuilder::default()
    }

    /// System mass `M`.
    pub fn system_mass(&self) -> f64 {
        self.system_mass
    }

    /// Environment particle mass `m`.
    pub fn env_mass(&self) -> f64 {
        self.env_mass
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Thermal energy `kB T`.
    pub fn kt(&self) -> f64 {
        self.kb * self.temperature
    }

    /// Collision rate `Gamma` (events per unit time).
    pub fn collision_rate(&self) -> f64 {
        self.collision_rate
    }

    /// Dissipation rate `gamma`.
    pub fn dissipation(&self) -> f64 {
        self.dissipation
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn kb(&self) -> f64 {
        self.kb
    }

    pub fn chemical_potential(&self) -> f64 {
        self.chemical_potential
    }

    /// `m / M`.
    pub fn mass_ratio(&self) -> f64 {
        self.env_mass / self.system_mass
    }

    /// Localization rate `2 M gamma kT / hbar^2` of the high-temperature
    /// master equation.
    pub fn localization_rate(&self) -> f64 {
        2.0 * self.system_mass * self.dissipation * self.kt() / (self.hbar * self.hbar)
    }

    /// Same parameters with a different temperature.
    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        let mut b = self.to_builder();
        b.temperature = Some(temperature);
        b.build()
    }

    /// Same parameters with a different dissipation; the collision rate is
    /// re-derived from it.
    pub fn with_dissipation(&self, dissipation: f64) -> Result<Self> {
        let mut b = self.to_builder();
        b.collision_rate = None;
        b.dissipation = Some(dissipation);
        b.build()
    }

    fn to_builder(self) -> PhysicalParamsBuilder {
        PhysicalParamsBuilder {
            system_mass: Some(self.system_mass),
            env_mass: Some(self.env_mass),
            temperature: Some(self.temperature),
            collision_rate: Some(self.collision_rate),
            dissipation: None,
            hbar: self.hbar,
            kb: self.kb,
            chemical_potential: self.chemical_potential,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhysicalParamsBuilder {
    system_mass: Option<f64>,
    env_mass: Option<f64>,
    temperature: Option<f64>,
    collision_rate: Option<f64>,
    dissipation: Option<f64>,
    hbar: f64,
    kb: f64,
    chemical_potential: f64,
}

impl Default for PhysicalParamsBuilder {
    fn default() -> Self {
        Self {
            system_mass: None,
            env_mass: None,
            temperature: None,
            collision_rate: None,
            dissipation: None,
            hbar: 1.0,
            kb: 1.0,
            chemical_potential: 0.0,
        }
    }
}

impl PhysicalParamsBuilder {
    pub fn system_mass(mut self, v: f64) -> Self {
        self.system_mass = Some(v);
        self
    }

    pub fn env_mass(mut self, v: f64) -> Self {
        self.env_mass = Some(v);
        self
    }

    pub fn temperature(mut self, v: f64) -> Self {
        self.temperature = Some(v);
        self
    }

    pub fn collision_rate(mut self, v: f64) -> Self {
        self.collision_rate = Some(v);
        self
    }

    pub fn dissipation(mut self, v: f64) -> Self {
        self.dissipation = Some(v);
        self
    }

    pub fn hbar(mut self, v: f64) -> Self {
        self.hbar = v;
        self
    }

    pub fn kb(mut self, v: f64) -> Self {
        self.kb = v;
        self
    }

    pub fn chemical_potential(mut self, v: f64) -> Self {
        self.chemical_potential = v;
        self
    }

    pub fn build(self) -> Result<PhysicalParams> {
        let system_mass = self.system_mass.unwrap_or(1.0);
        let env_mass = self.env_mass.unwrap_or(system_mass);
        let temperature = self.temperature.unwrap_or(1.0);
        positive("system mass", system_mass)?;
        positive("environment mass", env_mass)?;
        positive("temperature", temperature)?;
        positive("hbar", self.hbar)?;
        positive("kb", self.kb)?;
        if !self.chemical_potential.is_finite() {
            return invalid("chemical potential must be finite");
        }
        let ratio = env_mass / system_mass;
        let (collision_rate, dissipation) = match (self.collision_rate, self.dissipation) {
            (None, None) => (0.0, 0.0),
            (Some(g), None) => (g, ratio * g),
            (None, Some(d)) => (d / ratio, d),
            (Some(g), Some(d)) => {
                let expected = ratio * g;
                let scale = expected.abs().max(d.abs());
                if (expected - d).abs() > RATE_CONSISTENCY_TOL * scale {
                    return invalid(format!(
                        "dissipation {d} is inconsistent with (m/M)*Gamma = {expected}"
                    ));
                }
                (g, d)
            }
        };
        non_negative("collision rate", collision_rate)?;
        non_negative("dissipation", dissipation)?;
        Ok(PhysicalParams {
            system_mass,
            env_mass,
            temperature,
            collision_rate,
            dissipation,
            hbar: self.hbar,
            kb: self.kb,
            chemical_potential: self.chemical_potential,
        })
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {v}"))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be non-negative and finite, got {v}"))
    }
}

/// One-dimensional thermal gas of environment particles.
///
/// The momentum distribution is Maxwell-Boltzmann with zero mean and
/// `<p^2> = m kB T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalEnvironment1D {
    mass: f64,
    temperature: f64,
    kb: f64,
}

impl ThermalEnvironment1D {
    pub fn new(mass: f64, temperature: f64, kb: f64) -> Result<Self> {
        positive("environment mass", mass)?;
        positive("temperature", temperature)?;
        positive("kb", kb)?;
        Ok(Self {
            mass,
            temperature,
            kb,
        })
    }

    pub fn from_params(p: &PhysicalParams) -> Self {
        Self {
            mass: p.env_mass(),
            temperature: p.temperature(),
            kb: p.kb(),
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// First momentum moment; zero for a gas at rest.
    pub fn mean_p(&self) -> f64 {
        0.0
    }

    /// `<p^2> = m kB T`.
    pub fn p2_mean(&self) -> f64 {
        self.mass * self.kb * self.temperature
    }

    /// Maxwell-Boltzmann density `g(p)`.
    pub fn density(&self, p: f64) -> f64 {
        let var = self.p2_mean();
        (-0.5 * p * p / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
    }
}
