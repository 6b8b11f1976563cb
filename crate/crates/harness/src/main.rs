// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use qbm_core::par;
use qbm_harness::{run, Config, Experiment, HarnessError, Result, RunManifest};

/// Quantum Brownian motion experiments.
#[derive(Debug, Parser)]
#[command(name = "qbm", version, about)]
struct Cli {
    /// Experiment name, `list` or `validate`.
    command: String,

    /// INI file with `[section]` / `key = value` entries.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override one key, e.g. `--set run.dt=0.005`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory (for `validate`, one subdirectory per experiment).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn threads_from_env() -> Result<usize> {
    match std::env::var("QBM_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| HarnessError::Config(format!("QBM_THREADS must be a non-negative integer, got `{v}`"))),
        _ => Ok(0),
    }
}

fn report(m: &RunManifest, dir: &Path) {
    for c in &m.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {:.6e} (threshold {:.3e}) {}", c.name, c.value, c.threshold, c.detail);
    }
    println!(
        "{} {} in {:.2} s, outputs in {}",
        if m.passed { "PASS" } else { "FAIL" },
        m.experiment,
        m.wall_clock_seconds,
        dir.display()
    );
}

fn execute(cli: &Cli) -> Result<bool> {
    match cli.command.as_str() {
        "list" => {
            for e in Experiment::ALL {
                println!("{:<22} {}", e.name(), e.description());
                for k in e.schema() {
                    println!("    {:<26} {:<20} {}", k.key, k.default, k.help);
                }
            }
            Ok(true)
        }
        "validate" => {
            if cli.config.is_some() || !cli.set.is_empty() {
                return Err(HarnessError::Config("`validate` runs every experiment with its defaults".into()));
            }
            let root = cli
                .out
                .clone()
                .unwrap_or_else(|| std::env::temp_dir().join(format!("qbm-validate-{}", std::process::id())));
            let mut all = true;
            for e in Experiment::ALL {
                let dir = root.join(e.name());
                let m = run(e, &Config::defaults(e.schema()), &dir)?;
                report(&m, &dir);
                all &= m.passed;
            }
            Ok(all)
        }
        name => {
            let e = Experiment::from_name(name)?;
            let cfg = Config::load(e.schema(), cli.config.as_deref(), &cli.set)?;
            let dir = cli
                .out
                .clone()
                .ok_or_else(|| HarnessError::Config("--out DIR is required".into()))?;
            let m = run(e, &cfg, &dir)?;
            report(&m, &dir);
            Ok(m.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = threads_from_env().and_then(|threads| par::with_threads(threads, || execute(&cli)));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("qbm: {e}");
            ExitCode::FAILURE
        }
    }
}
