// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Phase-space picture: the discrete Wigner transform pair and the two
//! phase-space evolvers (collision integral and its Fokker-Planck limit).

mod boltzmann;
mod fokker_planck;
mod transform;

pub use boltzmann::{
    boltzmann_step, BoltzmannOperator, Interpolation, DEFAULT_NODES, MAX_COLLISION_STEP, MAX_MASS_RATIO,
};
pub use fokker_planck::{
    centered_momentum_rhs, centered_step_bound, evolve_fokker_planck, fokker_planck_step, step_count, stream,
    wigner_csv, FokkerPlanckScheme, MomentSeries, SpectralFokkerPlanck,
};
pub use transform::{inverse_wigner_transform, wigner_momentum_grid, wigner_transform, HERMITIAN_INPUT_TOL};
