//! Flat `key = value` run configuration. Command-line flags win over file
//! values; keys unknown to every command are rejected.

use crate::error::{CliError, CliResult};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

pub const KEYS: &[&str] = &[
    "dgp",
    "n",
    "seed",
    "family",
    "task",
    "out",
    "table",
    "replications",
    "eval_size",
    "data",
    "model",
    "metrics",
    "z_true",
    "step",
    "mc_samples",
    "max_iter",
    "grad_tol",
    "pooling",
    "decay",
];

#[derive(Debug, Default, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", i + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(CliError::Usage(format!("config line {}: unknown key `{k}`", i + 1)));
            }
            if values.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("config line {}: duplicate key `{k}`", i + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    /// `flag`, else the file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing --{} (or `{key}` in the config file)", key.replace('_', "-"))))
    }
}
