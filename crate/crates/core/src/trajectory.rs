use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{forward, SpectralField, TorusGrid, Field};

/// Parameters of the weighted space `L^p_mu((0,T); L^q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl WeightParams {
    pub fn new(p: f64, q: f64, mu: f64, horizon: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p={p} must lie in (1, inf)")));
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q={q} must lie in (1, inf)")));
        }
        if !(mu > 1.0 / p && mu <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "mu={mu} must lie in (1/p, 1] = ({}, 1]",
                1.0 / p
            )));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("T={horizon} must be finite and positive")));
        }
        Ok(Self { p, q, mu, horizon })
    }

    /// Unweighted counterpart (`mu = 1`).
    pub fn unweighted(&self) -> Self {
        Self { mu: 1.0, ..*self }
    }
}

/// Time-sampled spectral fields on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
    pub weights: WeightParams,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>, weights: WeightParams) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(Error::InvalidTimeGrid(format!(
                "{} times for {} fields",
                times.len(),
                fields.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::InvalidTimeGrid("no samples".into()));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidTimeGrid("times must be finite and >= 0".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimeGrid("times must be strictly increasing".into()));
        }
        let grid = *fields[0].grid();
        for f in &fields[1..] {
            f.check_grid(&grid)?;
        }
        Ok(Self {
            times,
            fields,
            weights,
        })
    }

    pub fn from_fields(times: Vec<f64>, fields: &[Field], weights: WeightParams) -> Result<Self> {
        let spectral = fields.iter().map(forward).collect::<Result<Vec<_>>>()?;
        Self::new(times, spectral, weights)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn grid(&self) -> &TorusGrid {
        self.fields[0].grid()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &SpectralField {
        self.fields.last().expect("trajectory is non-empty")
    }

    /// Drops samples at `t = 0` (weighted norms live on the open interval).
    pub fn without_initial(&self) -> Result<Self> {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.times[i] > 0.0).collect();
        if keep.is_empty() {
            return Err(Error::InvalidTimeGrid("no positive sample times".into()));
        }
        Ok(Self {
            times: keep.iter().map(|&i| self.times[i]).collect(),
            fields: keep.iter().map(|&i| self.fields[i].clone()).collect(),
            weights: self.weights,
        })
    }

    pub fn map<F: FnMut(f64, &SpectralField) -> Result<SpectralField>>(&self, mut f: F) -> Result<Self> {
        let fields = self
            .times
            .iter()
            .zip(&self.fields)
            .map(|(&t, s)| f(t, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.times.clone(), fields, self.weights)
    }

    pub fn with_weights(mut self, weights: WeightParams) -> Self {
        self.weights = weights;
        self
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<SpectralField>, WeightParams) {
        (self.times, self.fields, self.weights)
    }
}

/// `t_j = T (j/M)^gamma` for `j = 1..=M`.
pub fn graded_times(horizon: f64, m: usize, gamma: f64) -> Vec<f64> {
    (1..=m)
        .map(|j| horizon * (j as f64 / m as f64).powf(gamma))
        .collect()
}

/// `t_j = j T / M` for `j = 0..=M`.
pub fn uniform_times(horizon: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|j| horizon * j as f64 / m as f64).collect()
}

/// Default grading exponent for weighted time grids.
pub const DEFAULT_GRADING: f64 = 2.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_params_enforce_mu_gap() {
        assert!(WeightParams::new(2.0, 2.0, 0.5, 1.0).is_err());
        assert!(WeightParams::new(2.0, 2.0, 0.51, 1.0).is_ok());
        assert!(WeightParams::new(1.0, 2.0, 1.0, 1.0).is_err());
        assert!(WeightParams::new(2.0, 2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn graded_grid_ends_at_horizon() {
        let t = graded_times(2.0, 8, 2.0);
        assert_eq!(t.len(), 8);
        assert_eq!(*t.last().unwrap(), 2.0);
        assert!((t[0] - 2.0 / 64.0).abs() < 1e-15);
    }
}
