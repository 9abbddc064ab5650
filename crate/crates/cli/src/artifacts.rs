//! Output files of one run. Every CSV row and every JSON document carries the
//! config hash and the seed.

use std::path::{Path, PathBuf};

use kinspec::spectral::snapshot::write_field;
use kinspec::spectral::Field;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: String,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= limit,
            value,
            bound: format!("<= {limit}"),
        }
    }

    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= lo && value <= hi,
            value,
            bound: format!("in [{lo}, {hi}]"),
        }
    }

    pub fn holds(name: &str, ok: bool) -> Self {
        Self {
            name: name.into(),
            passed: ok,
            value: if ok { 1.0 } else { 0.0 },
            bound: "true".into(),
        }
    }
}

pub struct Artifacts {
    dir: PathBuf,
    pub scenario: String,
    pub hash: String,
    pub seed: u64,
    files: Vec<String>,
    checks: Vec<Check>,
}

/// Shortest round-trip representation; stable across runs.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

impl Artifacts {
    pub fn create(dir: &Path, scenario: &str, hash: &str, seed: u64) -> CliResult<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            scenario: scenario.into(),
            hash: hash.into(),
            seed,
            files: Vec::new(),
            checks: Vec::new(),
        })
    }

    fn stamp(&self, artifact: &str, mut body: Map<String, Value>) -> Value {
        body.insert("artifact".into(), json!(artifact));
        body.insert("scenario".into(), json!(self.scenario));
        body.insert("config_sha256".into(), json!(self.hash));
        body.insert("seed".into(), json!(self.seed));
        Value::Object(body)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        let mut head: Vec<&str> = header.to_vec();
        head.extend(["config_sha256", "seed"]);
        w.write_record(&head)?;
        let seed = self.seed.to_string();
        for r in rows {
            let mut rec = r.clone();
            rec.push(self.hash.clone());
            rec.push(seed.clone());
            w.write_record(&rec)?;
        }
        w.flush()?;
        self.files.push(name.into());
        Ok(())
    }

    /// Writes `data` (serialized) under the key `data` of a stamped envelope.
    pub fn json(&mut self, name: &str, artifact: &str, data: &impl Serialize) -> CliResult<()> {
        let mut body = Map::new();
        body.insert("data".into(), serde_json::to_value(data)?);
        let v = self.stamp(artifact, body);
        write_json(&self.dir.join(name), &v)?;
        self.files.push(name.into());
        Ok(())
    }

    /// Physical snapshot `<stem>.bin` + `<stem>.json`; the sidecar is stamped.
    pub fn snapshot(&mut self, stem: &str, f: &Field) -> CliResult<()> {
        let path = self.dir.join(stem);
        write_field(&path, f)?;
        let sidecar = path.with_extension("json");
        let header: Map<String, Value> = serde_json::from_str(&std::fs::read_to_string(&sidecar)?)?;
        // the reader expects the header fields at top level
        let v = self.stamp("snapshot", header);
        write_json(&sidecar, &v)?;
        self.files.push(format!("{stem}.bin"));
        self.files.push(format!("{stem}.json"));
        Ok(())
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Writes `run.json` listing every artifact and check.
    pub fn finish(mut self, summary: Value) -> CliResult<Value> {
        self.files.sort();
        let mut body = Map::new();
        body.insert("artifacts".into(), json!(self.files));
        body.insert("checks".into(), serde_json::to_value(&self.checks)?);
        body.insert("passed".into(), json!(self.checks.iter().all(|c| c.passed)));
        body.insert("summary".into(), summary);
        let v = self.stamp("run", body);
        write_json(&self.dir.join("run.json"), &v)?;
        Ok(v)
    }
}

pub fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
