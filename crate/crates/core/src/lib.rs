// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

// `!(x > 0.0)` is the house idiom for rejecting NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod evolvers;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod kinematics;
pub mod par;
pub mod params;
pub mod quadrature;
pub mod spectral;
pub mod state;
pub mod wigner;

pub use error::{Error, Result};
pub use grid::Grid1D;
pub use params::{PhysicalParams, ThermalEnvironment1D};
pub use state::{DensityMatrix, WignerFunction};
