// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Flat `section.key = value` configuration.
//!
//! Each experiment declares its keys and defaults. Values come from the
//! defaults, then the INI file, then `--set` overrides; any key the
//! experiment does not declare is rejected.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::error::{HarnessError, Result};

/// One declared key with its default value.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Defaults only.
    pub fn defaults(schema: &[KeySpec]) -> Self {
        Self {
            values: schema
                .iter()
                .map(|s| (s.key.to_string(), s.default.to_string()))
                .collect(),
        }
    }

    /// Defaults, overlaid by `file` (if any), overlaid by `overrides`
    /// (`section.key=value`).
    pub fn load(schema: &[KeySpec], file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut cfg = Self::defaults(schema);
        if let Some(path) = file {
            let ini = Ini::load_from_file(path)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            for (section, props) in ini.iter() {
                for (k, v) in props.iter() {
                    let key = match section {
                        Some(s) => format!("{s}.{k}"),
                        None => k.to_string(),
                    };
                    cfg.set(&key, v)?;
                }
            }
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("override `{o}` is not of the form key=value")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(HarnessError::Config(format!("unknown key `{key}`"))),
        }
    }

    pub fn get_str(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| HarnessError::Config(format!("missing key `{key}`")))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.get_str(key)?;
        raw.parse()
            .map_err(|_| HarnessError::Config(format!("`{key}`: cannot parse `{raw}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v: f64 = self.get(key)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(HarnessError::Config(format!("`{key}` must be finite")))
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.get(key)
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    const SCHEMA: &[KeySpec] = &[
        KeySpec {
            key: "physics.mass",
            default: "1",
            help: "",
        },
        KeySpec {
            key: "run.dt",
            default: "0.1",
            help: "",
        },
    ];

    #[test]
    fn precedence() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "[physics]\nmass = 2\n[run]\ndt = 0.5").unwrap();
        let cfg = Config::load(SCHEMA, Some(f.path()), &["run.dt=0.25".into()]).unwrap();
        assert_eq!(cfg.f64("physics.mass").unwrap(), 2.0);
        assert_eq!(cfg.f64("run.dt").unwrap(), 0.25);
        assert_eq!(Config::defaults(SCHEMA).f64("run.dt").unwrap(), 0.1);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::load(SCHEMA, None, &["physics.colour=red".into()]).is_err());
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "[grid]\nn = 3").unwrap();
        assert!(Config::load(SCHEMA, Some(f.path()), &[]).is_err());
        assert!(Config::load(SCHEMA, None, &["run.dt".into()]).is_err());
    }

    #[test]
    fn bad_numbers_rejected() {
        let cfg = Config::load(SCHEMA, None, &["run.dt=fast".into()]).unwrap();
        assert!(cfg.f64("run.dt").is_err());
        let cfg = Config::load(SCHEMA, None, &["run.dt=inf".into()]).unwrap();
        assert!(cfg.f64("run.dt").is_err());
    }
}
