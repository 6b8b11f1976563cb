// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by constructors, evolvers and quadratures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("trace has imaginary part {imag:e}")]
    NonHermitianTrace { imag: f64 },

    #[error("matrix is not Hermitian (max |rho - rho^dagger| = {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("probability {fraction:e} sits in the outer grid margin (limit {limit:e})")]
    Leakage { fraction: f64, limit: f64 },

    #[error("ensemble has no particles")]
    EmptyEnsemble,

    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("explicit integrator diverged at t = {t:e}; reduce the step")]
    StepTooLarge { t: f64 },

    #[error("momenta are off shell: |k0| = {k0}, |kf| = {kf}")]
    OffShell { k0: f64, kf: f64 },

    #[error("quadrature failed: estimate {estimate:e} with error {error:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailure {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("Bose occupation diverges: beta*(omega - mu) = {exponent:e} <= 0")]
    DivergentOccupation { exponent: f64 },

    #[error("contact potential needs an explicit wavenumber cutoff for this quantity")]
    CutoffRequired,

    #[error("maximum occupation {max_occupation:e} is too high for the low-density kernel (limit {limit:e})")]
    DensityTooHigh { max_occupation: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
