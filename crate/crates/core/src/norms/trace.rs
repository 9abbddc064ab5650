use serde::{Deserialize, Serialize};

use super::{initial_piece, lq_norm, spectral_lq_norm};
use crate::error::{Error, Result};
use crate::propagator::{homogeneous_solve, KolmogorovParams};
use crate::quadrature::gauss7;
use crate::spectral::{abs_pow, apply_multiplier, forward, norm, Field, MultiplierSpec};
use crate::trajectory::WeightParams;

/// Time quadrature for [`trace_norm_flow`]: Gauss panels uniform in `ln t`
/// over `[T 2^{-octaves}, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceFlowOptions {
    pub octaves: u32,
    pub panels_per_octave: u32,
}

impl Default for TraceFlowOptions {
    fn default() -> Self {
        Self {
            octaves: 40,
            panels_per_octave: 2,
        }
    }
}

/// `||g||_q + (int_0^T t^{p-pμ} ||[D_x^{β(s+1)/(β+1)} + (-Δ_v)^{β(s+1)/2}] u(t)||_q^p dt)^{1/p}`
/// with `u` the homogeneous flow from `g`.
pub fn trace_norm_flow(
    g: &Field,
    s: f64,
    beta: f64,
    w: &WeightParams,
    opts: &TraceFlowOptions,
) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::InvalidParameter(format!("s={s} must be >= 0")));
    }
    if opts.octaves == 0 || opts.panels_per_octave == 0 {
        return Err(Error::InvalidParameter("trace quadrature needs at least one panel".into()));
    }
    let params = KolmogorovParams::new(beta, *g.grid())?;
    let gh = forward(g)?;
    let (ex, ev) = (beta * (s + 1.0) / (beta + 1.0), beta * (s + 1.0));
    let symbol = MultiplierSpec::real("trace-flow", move |k, xi| {
        abs_pow(norm(k), ex) + abs_pow(norm(xi), ev)
    });
    let (p, mu, horizon) = (w.p, w.mu, w.horizon);
    let hi = horizon.ln();
    let lo = hi - opts.octaves as f64 * std::f64::consts::LN_2;
    let panels = (opts.octaves * opts.panels_per_octave) as usize;
    let width = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * 7);
    for panel in 0..panels {
        let a = lo + panel as f64 * width;
        for (x, wt) in gauss7() {
            nodes.push((a + 0.5 * width * (1.0 + x), 0.5 * width * wt));
        }
    }
    let mut integral = 0.0;
    let mut head = Vec::with_capacity(2);
    for (idx, &(sl, wt)) in nodes.iter().enumerate() {
        let t = sl.exp();
        let u = apply_multiplier(&homogeneous_solve(&gh, t, &params)?, &symbol)?;
        let h = t.powf(p - p * mu) * spectral_lq_norm(&u, w.q)?.powf(p);
        if idx < 2 {
            head.push((t, h));
        }
        integral += wt * h * t;
    }
    let (ts, hs): (Vec<f64>, Vec<f64>) = head.into_iter().unzip();
    integral += initial_piece(&ts, &hs);
    Ok(lq_norm(g, w.q)? + integral.powf(1.0 / p))
}
