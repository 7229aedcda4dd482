//! Flat `key = value` configuration files. No nesting, no quoting; `#`
//! starts a comment. Unknown keys are hard errors so that typos cannot
//! silently corrupt an experiment.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    map: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!("line {}: empty key or value", lineno + 1)));
            }
            if map.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!("duplicate key `{key}`")));
            }
        }
        Ok(RawConfig { map })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Every present key must be in the allowed list.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown key `{key}` (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not a number"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not an integer"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not an integer"))),
        }
    }

    pub fn string_or(&self, key: &str, default: &str) -> String {
        self.map
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }
}

/// Keys understood by the 1D solver and sweep commands.
pub const SOLVER_KEYS: &[&str] = &[
    "grid.n",
    "domain.length",
    "time.dt",
    "time.tmax",
    "physics.c",
    "physics.entropy",
    "init.amplitude",
    "init.velocity_amplitude",
    "init.mode",
    "init.first_order_amplitude",
    "seed",
    "output.path",
];

/// Keys understood by the curl-div command.
pub const CURL_DIV_KEYS: &[&str] = &["grid.n", "physics.nbar", "init.amplitude", "output.path"];

/// Shared 1D experiment configuration with spec defaults.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub grid_n: usize,
    pub length: f64,
    pub dt: f64,
    pub t_max: f64,
    pub c: f64,
    pub entropy: f64,
    pub amplitude: f64,
    pub velocity_amplitude: f64,
    pub mode: usize,
    pub first_order_amplitude: f64,
    pub seed: u64,
    pub output: String,
}

impl SolverConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        raw.check_keys(SOLVER_KEYS)?;
        Ok(SolverConfig {
            grid_n: raw.usize_or("grid.n", 512)?,
            length: raw.f64_or("domain.length", 2.0 * std::f64::consts::PI)?,
            dt: raw.f64_or("time.dt", 0.0)?, // 0 → choose from CFL
            t_max: raw.f64_or("time.tmax", 0.5)?,
            c: raw.f64_or("physics.c", 10.0)?,
            entropy: raw.f64_or("physics.entropy", 0.0)?,
            amplitude: raw.f64_or("init.amplitude", 0.02)?,
            velocity_amplitude: raw.f64_or("init.velocity_amplitude", 0.01)?,
            mode: raw.usize_or("init.mode", 1)?,
            first_order_amplitude: raw.f64_or("init.first_order_amplitude", 0.05)?,
            seed: raw.u64_or("seed", 1)?,
            output: raw.string_or("output.path", "out.csv"),
        })
    }

    pub fn defaults() -> Self {
        Self::from_raw(&RawConfig::default()).expect("defaults are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs_with_comments() {
        let cfg = RawConfig::parse("grid.n = 64\n# comment\ntime.dt = 1e-3 # inline\n").unwrap();
        assert_eq!(cfg.usize_or("grid.n", 0).unwrap(), 64);
        assert_eq!(cfg.f64_or("time.dt", 0.0).unwrap(), 1e-3);
        assert_eq!(cfg.f64_or("missing", 7.0).unwrap(), 7.0);
    }

    #[test]
    fn unknown_keys_are_hard_errors() {
        let cfg = RawConfig::parse("grid.m = 64\n").unwrap();
        assert!(cfg.check_keys(SOLVER_KEYS).is_err());
        let ok = RawConfig::parse("grid.n = 64\n").unwrap();
        assert!(ok.check_keys(SOLVER_KEYS).is_ok());
    }

    #[test]
    fn rejects_malformed_lines_and_duplicates() {
        assert!(RawConfig::parse("just a line\n").is_err());
        assert!(RawConfig::parse("a = 1\na = 2\n").is_err());
        assert!(RawConfig::parse("a =\n").is_err());
        let cfg = RawConfig::parse("grid.n = sixty\n").unwrap();
        assert!(cfg.usize_or("grid.n", 0).is_err());
    }
}
