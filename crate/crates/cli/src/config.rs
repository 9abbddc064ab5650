//! TOML run configuration. Keys are addressed as `section.key`.

use std::path::Path;

use kinspec::spectral::TorusGrid;
use kinspec::trajectory::WeightParams;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

pub struct Config {
    root: Table,
    /// SHA-256 of the config file bytes.
    pub hash: String,
}

#[derive(Debug, Clone, Copy)]
pub struct Equation {
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    pub horizon: f64,
}

impl Equation {
    pub fn weights(&self) -> CliResult<WeightParams> {
        Ok(WeightParams::new(self.p, self.q, self.mu, self.horizon)?)
    }
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Config("config is not UTF-8".into()))?;
        Self::parse(&text, &bytes)
    }

    fn parse(text: &str, bytes: &[u8]) -> CliResult<Self> {
        let root: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        Ok(Self {
            root,
            hash: format!("{:x}", Sha256::digest(bytes)),
        })
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        let mut parts = key.split('.');
        let mut cur = self.root.get(parts.next()?)?;
        for p in parts {
            cur = cur.as_table()?.get(p)?;
        }
        Some(cur)
    }

    fn require(&self, key: &str) -> CliResult<&Value> {
        self.get(key).ok_or_else(|| CliError::MissingKey(key.to_string()))
    }

    pub fn has(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        as_f64(key, self.require(key)?)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        self.get(key).map_or(Ok(default), |v| as_f64(key, v))
    }

    pub fn usize(&self, key: &str) -> CliResult<usize> {
        as_usize(key, self.require(key)?)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        self.get(key).map_or(Ok(default), |v| as_usize(key, v))
    }

    pub fn u64(&self, key: &str) -> CliResult<u64> {
        match self.require(key)? {
            Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            _ => Err(wrong_type(key, "a nonnegative integer")),
        }
    }

    pub fn str(&self, key: &str) -> CliResult<&str> {
        self.require(key)?.as_str().ok_or_else(|| wrong_type(key, "a string"))
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> CliResult<&'a str> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_str().ok_or_else(|| wrong_type(key, "a string")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> CliResult<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| wrong_type(key, "a boolean")),
        }
    }

    pub fn f64_list(&self, key: &str) -> CliResult<Vec<f64>> {
        list(key, self.require(key)?)?.iter().map(|v| as_f64(key, v)).collect()
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        if self.has(key) {
            self.f64_list(key)
        } else {
            Ok(default.to_vec())
        }
    }

    pub fn usize_list_or(&self, key: &str, default: &[usize]) -> CliResult<Vec<usize>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => list(key, v)?.iter().map(|x| as_usize(key, x)).collect(),
        }
    }

    pub fn table(&self, key: &str) -> CliResult<&Table> {
        self.require(key)?.as_table().ok_or_else(|| wrong_type(key, "a table"))
    }

    pub fn scenario(&self) -> Option<&str> {
        self.root.get("scenario").and_then(Value::as_str)
    }

    pub fn grid(&self) -> CliResult<TorusGrid> {
        Ok(TorusGrid::new(
            self.usize("grid.n")?,
            self.usize("grid.nx")?,
            self.usize("grid.nv")?,
            self.f64("grid.lx")?,
            self.f64("grid.lv")?,
        )?)
    }

    pub fn weights(&self) -> CliResult<WeightParams> {
        Ok(WeightParams::new(
            self.f64("equation.p")?,
            self.f64("equation.q")?,
            self.f64("equation.mu")?,
            self.f64("equation.T")?,
        )?)
    }

    pub fn equation(&self) -> CliResult<Equation> {
        Ok(Equation {
            beta: self.f64("equation.beta")?,
            p: self.f64("equation.p")?,
            q: self.f64("equation.q")?,
            mu: self.f64("equation.mu")?,
            horizon: self.f64("equation.T")?,
        })
    }
}

fn wrong_type(key: &str, want: &str) -> CliError {
    CliError::Config(format!("config key `{key}` must be {want}"))
}

fn as_f64(key: &str, v: &Value) -> CliResult<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(wrong_type(key, "a number")),
    }
}

fn as_usize(key: &str, v: &Value) -> CliResult<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(wrong_type(key, "a nonnegative integer")),
    }
}

fn list<'a>(key: &str, v: &'a Value) -> CliResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| wrong_type(key, "an array"))
}
