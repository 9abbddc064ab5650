use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub grid_size: usize,
    pub worst_ratio: f64,
}

/// Measured ratios of one diagnostic over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub samples: Vec<Sample>,
    pub worst_ratio: f64,
    pub refinement_trend: Vec<TrendPoint>,
    #[serde(default)]
    pub skipped: Vec<Skipped>,
}

impl DiagnosticReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            parameters: BTreeMap::new(),
            samples: Vec::new(),
            worst_ratio: 0.0,
            refinement_trend: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.set_param(key, value);
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_string(), v);
    }

    pub fn push(&mut self, id: impl Into<String>, ratio: f64) {
        if self.samples.is_empty() || ratio > self.worst_ratio {
            self.worst_ratio = ratio;
        }
        self.samples.push(Sample { id: id.into(), ratio });
    }

    pub fn skip(&mut self, id: impl Into<String>, reason: impl Into<String>) {
        self.skipped.push(Skipped {
            id: id.into(),
            reason: reason.into(),
        });
    }

    /// Concatenates samples and skips; parameters of `self` win on conflict.
    pub fn merge(mut self, other: DiagnosticReport) -> Self {
        for s in other.samples {
            self.push(s.id, s.ratio);
        }
        self.skipped.extend(other.skipped);
        for (k, v) in other.parameters {
            self.parameters.entry(k).or_insert(v);
        }
        self.refinement_trend.extend(other.refinement_trend);
        self.refinement_trend.sort_by_key(|p| p.grid_size);
        self
    }

    pub fn min_ratio(&self) -> f64 {
        self.samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min)
    }

    /// `max / min` over the samples.
    pub fn band_width(&self) -> f64 {
        self.worst_ratio / self.min_ratio()
    }

    /// Errors when every corpus element was skipped.
    pub fn finish(self) -> Result<Self> {
        if self.samples.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(self)
    }

    /// Largest relative change of `worst_ratio` between successive trend points.
    pub fn refinement_drift(&self) -> f64 {
        self.refinement_trend
            .windows(2)
            .map(|w| ((w[1].worst_ratio - w[0].worst_ratio) / w[0].worst_ratio).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plot-ready `parameter,ratio` rows, one per sample.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["parameter", "ratio"]).map_err(csv_err)?;
        for s in &self.samples {
            w.write_record([s.id.clone(), format!("{:e}", s.ratio)]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Runs `diagnose` on every grid (coarse to fine) and returns the finest report
/// with the worst ratios of all levels as its refinement trend.
pub fn refine<G, F>(grids: &[G], size: impl Fn(&G) -> usize, mut diagnose: F) -> Result<DiagnosticReport>
where
    F: FnMut(&G) -> Result<DiagnosticReport>,
{
    let mut trend = Vec::with_capacity(grids.len());
    let mut last = None;
    for g in grids {
        let r = diagnose(g)?;
        trend.push(TrendPoint {
            grid_size: size(g),
            worst_ratio: r.worst_ratio,
        });
        last = Some(r);
    }
    let mut out = last.ok_or(Error::EmptyCorpus)?;
    trend.sort_by_key(|p| p.grid_size);
    out.refinement_trend = trend;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_is_max_and_merge_is_associative() {
        let mut a = DiagnosticReport::new("x");
        a.push("a", 0.5);
        let mut b = DiagnosticReport::new("x");
        b.push("b", 2.0);
        let mut c = DiagnosticReport::new("x");
        c.push("c", 1.0);
        let left = a.clone().merge(b.clone()).merge(c.clone());
        let right = a.merge(b.merge(c));
        assert_eq!(left, right);
        assert_eq!(left.worst_ratio, 2.0);
        assert_eq!(left.min_ratio(), 0.5);
    }

    #[test]
    fn csv_and_json() {
        let mut r = DiagnosticReport::new("demo").param("beta", 1.5);
        r.push("g0", 0.25);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "parameter,ratio\ng0,2.5e-1\n");
        let back: DiagnosticReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(DiagnosticReport::new("e").finish().is_err());
    }

    #[test]
    fn trend_sorted_by_size() {
        let r = refine(&[256usize, 64, 128], |g| *g, |g| {
            let mut r = DiagnosticReport::new("t");
            r.push("s", 1.0 + *g as f64 / 1000.0);
            Ok(r)
        })
        .unwrap();
        let sizes: Vec<usize> = r.refinement_trend.iter().map(|p| p.grid_size).collect();
        assert_eq!(sizes, vec![64, 128, 256]);
    }
}
