//! Lebesgue, weighted-in-time, `X_β^{s,q}` and anisotropic Besov norms.

mod besov;
mod records;
mod trace;

use crate::error::{Error, Result};
use crate::spectral::{apply_multiplier, forward, inverse_with_residue, Field, MultiplierSpec, SpectralField};
use crate::trajectory::Trajectory;

pub use besov::{
    besov_norm, besov_pair, dyadic_levels, partition_sum_error, AnisotropyParams, BesovMode, BesovSpec,
};
pub use records::{write_norm_csv, NormRecord};
pub use trace::{trace_norm_flow, TraceFlowOptions};

/// Cell-volume weighted `(sum |f|^q h)^{1/q}`.
pub fn lq_norm(f: &Field, q: f64) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q={q} must be >= 1")));
    }
    let vol = f.grid().cell_volume();
    let sum: f64 = if q == 2.0 {
        f.values().iter().map(|v| v * v).sum()
    } else {
        f.values().iter().map(|v| v.abs().powf(q)).sum()
    };
    Ok((sum * vol).powf(1.0 / q))
}

/// L^q norm of the real synthesis of a spectral field (Parseval for `q = 2`).
pub fn spectral_lq_norm(f: &SpectralField, q: f64) -> Result<f64> {
    if q == 2.0 {
        return Ok(f.real_part_l2());
    }
    lq_norm(&inverse_with_residue(f).0, q)
}

/// `|| F^{-1}(((1+|k|^2)^{β/(2(β+1))} + (1+|ξ|^2)^{β/2})^s f^) ||_q`.
pub fn xbsq_norm(f: &Field, s: f64, beta: f64, q: f64) -> Result<f64> {
    if s == 0.0 {
        return lq_norm(f, q);
    }
    let out = apply_multiplier(&forward(f)?, &MultiplierSpec::xbsq(s, beta))?;
    spectral_lq_norm(&out, q)
}

/// `(int_0^{t_M} t^{p-pμ} h(t)^p dt)^{1/p}` from samples `h(t_j)`, `t_j > 0`.
///
/// Trapezoidal rule between samples; on `[0, t_1]` the integrand is
/// extrapolated as the power law through the first two samples.
pub fn weighted_samples_norm(times: &[f64], values: &[f64], p: f64, mu: f64) -> Result<f64> {
    if times.len() != values.len() || times.is_empty() {
        return Err(Error::InvalidTimeGrid(format!(
            "{} times for {} values",
            times.len(),
            values.len()
        )));
    }
    if times[0] <= 0.0 {
        return Err(Error::InvalidTimeGrid(
            "weighted norm needs sample times > 0; drop the t = 0 sample".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid("times must be strictly increasing".into()));
    }
    let h: Vec<f64> = times
        .iter()
        .zip(values)
        .map(|(&t, &v)| t.powf(p - p * mu) * v.abs().powf(p))
        .collect();
    let mut total = initial_piece(times, &h);
    for j in 1..times.len() {
        total += 0.5 * (times[j] - times[j - 1]) * (h[j] + h[j - 1]);
    }
    Ok(total.powf(1.0 / p))
}

/// `int_0^{t_1} h`, with `h ~ A t^b` fitted through the first two samples.
pub(crate) fn initial_piece(times: &[f64], h: &[f64]) -> f64 {
    let (t1, h1) = (times[0], h[0]);
    if times.len() < 2 || h1 <= 0.0 || h[1] <= 0.0 {
        return h1.max(0.0) * t1;
    }
    let b = ((h[1] / h1).ln() / (times[1] / t1).ln()).clamp(-0.9, 50.0);
    h1 * t1 / (b + 1.0)
}

/// Per-sample `L^q` norms of a trajectory.
pub fn sample_lq_norms(u: &Trajectory, q: f64) -> Result<Vec<f64>> {
    u.fields().iter().map(|f| spectral_lq_norm(f, q)).collect()
}

/// `||u||_{L^p_μ((0,T); L^q)}` with `(p, q, μ)` from the trajectory's weights.
pub fn weighted_time_norm(u: &Trajectory) -> Result<f64> {
    let w = u.weights;
    weighted_samples_norm(u.times(), &sample_lq_norms(u, w.q)?, w.p, w.mu)
}
