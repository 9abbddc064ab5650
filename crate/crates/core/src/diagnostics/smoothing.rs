use std::collections::BTreeMap;

use super::report::DiagnosticReport;
use crate::error::{Error, Result};
use crate::norms::{besov_norm, lq_norm, BesovSpec};
use crate::propagator::{homogeneous_solve, KolmogorovParams};
use crate::spectral::{forward, inverse_with_residue, Field};

/// Kinetic Besov norms (dyadic, integrabilities `(q, p)`) of the homogeneous
/// flow from `g` at every `(t, order)` pair, relative to `||g||_q`.
///
/// Parameters record, per order, whether every value is finite and whether the
/// norms are nonincreasing in `t` after the first positive sample.
pub fn smoothing_profile(
    g: &Field,
    orders: &[f64],
    times: &[f64],
    beta: f64,
    p: f64,
    q: f64,
    mu: f64,
) -> Result<DiagnosticReport> {
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid("times must be >= 0 and increasing".into()));
    }
    let params = KolmogorovParams::new(beta, *g.grid())?;
    let base = lq_norm(g, q)?;
    if base == 0.0 {
        return Err(Error::InvalidParameter("datum vanishes".into()));
    }
    let gh = forward(g)?;
    let mut report = DiagnosticReport::new("smoothing_profile")
        .param("beta", beta)
        .param("p", p)
        .param("q", q)
        .param("mu", mu)
        .param("orders", orders)
        .param("times", times);
    let mut finite = BTreeMap::new();
    let mut monotone = BTreeMap::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); orders.len()];
    for &t in times {
        let u = inverse_with_residue(&homogeneous_solve(&gh, t, &params)?).0;
        for (o, &a) in orders.iter().enumerate() {
            let spec = BesovSpec::kinetic(g.grid().n, beta, a, q, p)?;
            let v = besov_norm(&u, &spec)? / base;
            values[o].push(v);
            report.push(format!("t={t},a={a}"), v);
        }
    }
    for (o, &a) in orders.iter().enumerate() {
        let key = format!("{a}");
        finite.insert(key.clone(), values[o].iter().all(|v| v.is_finite()));
        let start = times.iter().position(|&t| t > 0.0).unwrap_or(times.len());
        let tail = &values[o][start.min(values[o].len())..];
        monotone.insert(key, tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
    report.set_param("finite", finite);
    report.set_param("monotone_after_first_positive_time", monotone);
    Ok(report)
}
