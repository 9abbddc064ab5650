use serde::{Deserialize, Serialize};

use super::fixed_point::{fixed_point_from, EnergyProfile, FixedPointOptions, QuasilinearRun};
use super::model::DiffusivityModel;
use crate::error::{Error, Result};
use crate::spectral::Field;
use crate::trajectory::WeightParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    ReachedHorizon,
    ContractionLost { time: f64, ratio: f64 },
    RangeExceeded { time: f64, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabRecord {
    pub start: f64,
    pub horizon: f64,
    pub iterations: usize,
    pub max_contraction: f64,
}

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub run: QuasilinearRun,
    pub verdict: Verdict,
    pub slabs: Vec<SlabRecord>,
    /// `(t, ||u||_{E_mu(0, t)})` at every slab end.
    pub cumulative_norm: Vec<(f64, f64)>,
}

/// Glues fixed-point solutions on successive slabs, each restarted from the
/// terminal field of the previous one, until `t_max` or a failure.
pub fn continuation(
    u0: &Field,
    model: &DiffusivityModel,
    weights: &WeightParams,
    t_max: f64,
    slab: f64,
    opts: &FixedPointOptions,
) -> Result<ContinuationResult> {
    if !(slab > 0.0 && slab <= t_max) {
        return Err(Error::InvalidParameter(format!("slab={slab} must lie in (0, T_max={t_max}]")));
    }
    let mut times = vec![0.0];
    let mut fields = vec![u0.clone()];
    let mut slabs = Vec::new();
    let mut ends = Vec::new();
    let mut t = 0.0;
    let verdict = loop {
        if t >= t_max * (1.0 - 1e-12) {
            break Verdict::ReachedHorizon;
        }
        let request = slab.min(t_max - t);
        let start = fields[fields.len() - 1].clone();
        match fixed_point_from(&start, model, weights, request, t, opts) {
            Ok((run, trace)) => {
                slabs.push(SlabRecord {
                    start: t,
                    horizon: trace.horizon,
                    iterations: trace.iterates.len(),
                    max_contraction: trace.max_contraction(),
                });
                times.extend_from_slice(&run.times[1..]);
                fields.extend(run.fields.into_iter().skip(1));
                t += trace.horizon;
                ends.push(times.len() - 1);
            }
            Err(Error::NoContraction { ratio, .. }) => break Verdict::ContractionLost { time: t, ratio },
            Err(Error::RangeExceeded { value, time, .. }) => break Verdict::RangeExceeded { time, value },
            Err(e) => return Err(e),
        }
    };
    let mut cumulative_norm = Vec::with_capacity(ends.len());
    if times.len() >= 3 {
        let prof = EnergyProfile::new(&times, &fields, weights)?;
        for &e in &ends {
            cumulative_norm.push((times[e], prof.norm(weights, e)?));
        }
    }
    Ok(ContinuationResult {
        run: QuasilinearRun { times, fields },
        verdict,
        slabs,
        cumulative_norm,
    })
}
