// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Named experiments, configuration and run records behind the `qbm` CLI.

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;

pub use config::{Config, KeySpec};
pub use error::{HarnessError, Result};
pub use experiments::{run, Experiment, Outcome};
pub use manifest::{Check, RunManifest};
