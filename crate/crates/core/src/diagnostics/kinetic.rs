use rustfft::num_complex::Complex64;

use super::corpus::CorpusElement;
use super::report::DiagnosticReport;
use crate::error::{Error, Result};
use crate::norms::{spectral_lq_norm, weighted_samples_norm, weighted_time_norm};
use crate::propagator::{duhamel_defect, duhamel_solve, KolmogorovParams};
use crate::spectral::{abs_pow, apply_multiplier, apply_table, forward, norm, tabulate, MultiplierSpec, SpectralField};
use crate::trajectory::{Trajectory, WeightParams};
use crate::transforms::kinetic_derivative;

const DENOMINATOR_FLOOR: f64 = 1e-14;

/// `||m(D) u||_{p,μ,q}` over the positive sample times.
pub fn weighted_norm(u: &Trajectory, m: Option<&MultiplierSpec>) -> Result<f64> {
    let u = if u.times()[0] <= 0.0 { u.without_initial()? } else { u.clone() };
    match m {
        None => weighted_time_norm(&u),
        Some(m) => weighted_time_norm(&u.map(|_, f| apply_multiplier(f, m))?),
    }
}

/// `(-Δ_v)^{β/2}` as a multiplier.
pub fn dv_beta(beta: f64) -> MultiplierSpec {
    MultiplierSpec::real("dv^beta", move |_, xi| abs_pow(norm(xi), beta))
}

/// `D_x^{β/(β+1)}` as a multiplier.
pub fn dx_kinetic(beta: f64) -> MultiplierSpec {
    MultiplierSpec::dx_pow(beta / (beta + 1.0))
}

/// `f(t) = (1 + sin(2t)/2) h`: a smooth-in-time source built from one datum.
pub fn forcing(h: &CorpusElement, times: &[f64], weights: WeightParams) -> Result<Trajectory> {
    let hh = forward(&h.field)?;
    let fields = times.iter().map(|&t| hh.scaled(1.0 + 0.5 * (2.0 * t).sin())).collect();
    Trajectory::new(times.to_vec(), fields, weights)
}

/// Duhamel solutions for the sources built from `data` by [`forcing`].
pub fn solution_corpus(
    data: &[CorpusElement],
    times: &[f64],
    weights: WeightParams,
    p: &KolmogorovParams,
) -> Result<Vec<(String, Trajectory, Trajectory)>> {
    data.iter()
        .map(|h| {
            let f = forcing(h, times, weights)?;
            let u = duhamel_solve(&f, p)?;
            Ok((h.id.clone(), f, u))
        })
        .collect()
}

/// Per-sample `L^q` norms of the quantities entering the kinetic diagnostics;
/// the time weighting is applied afterwards, so one profile serves every
/// `(p, μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticProfile {
    pub id: String,
    pub q: f64,
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    /// Kinetic derivative by finite differences along the time grid.
    pub kinetic: Vec<f64>,
    pub dv: Vec<f64>,
    pub dx: Vec<f64>,
    /// Source norms and the solver-consistent kinetic derivative; empty
    /// without a source.
    pub source: Vec<f64>,
    pub kinetic_solver: Vec<f64>,
    /// Equation residual norms, when checked.
    pub residual: Vec<f64>,
}

fn positive_part(u: &Trajectory) -> Result<Trajectory> {
    if u.times()[0] <= 0.0 {
        u.without_initial()
    } else {
        Ok(u.clone())
    }
}

fn sample_norms(u: &Trajectory, table: Option<&[Complex64]>, q: f64) -> Result<Vec<f64>> {
    u.fields()
        .iter()
        .map(|f| match table {
            None => spectral_lq_norm(f, q),
            Some(t) => spectral_lq_norm(&apply_table(f, t), q),
        })
        .collect()
}

/// Sample norms of `u` for both kinetic diagnostics, one profile per `q`.
/// With a `source` (of which `u` is the Duhamel solution) the
/// solver-consistent kinetic derivative is added, and its residual when
/// `check_residual` is set.
pub fn kinetic_profiles(
    id: &str,
    u: &Trajectory,
    source: Option<&Trajectory>,
    p: &KolmogorovParams,
    qs: &[f64],
    check_residual: bool,
) -> Result<Vec<KineticProfile>> {
    let grid = *u.grid();
    let dv = tabulate(&grid, &dv_beta(p.beta))?;
    let dx = tabulate(&grid, &dx_kinetic(p.beta))?;
    let lu = positive_part(&kinetic_derivative(u)?)?;
    let up = positive_part(u)?;
    let mut forced = None;
    if let Some(f) = source {
        let (lu, defect) = if check_residual {
            let (lu, d) = duhamel_kinetic_derivative(u, f, p)?;
            (lu, Some(positive_part(&d)?))
        } else {
            let fields = u
                .fields()
                .iter()
                .zip(f.fields())
                .map(|(uf, ff)| {
                    let mut lu = ff.clone();
                    lu.axpy(Complex64::new(-1.0, 0.0), &apply_table(uf, &dv));
                    lu
                })
                .collect();
            (Trajectory::new(u.times().to_vec(), fields, u.weights)?, None)
        };
        forced = Some((positive_part(f)?, positive_part(&lu)?, defect));
    }
    qs.iter()
        .map(|&q| {
            let mut out = KineticProfile {
                id: id.to_string(),
                q,
                times: up.times().to_vec(),
                u: sample_norms(&up, None, q)?,
                kinetic: sample_norms(&lu, None, q)?,
                dv: sample_norms(&up, Some(&dv), q)?,
                dx: sample_norms(&up, Some(&dx), q)?,
                source: Vec::new(),
                kinetic_solver: Vec::new(),
                residual: Vec::new(),
            };
            if let Some((f, lu, defect)) = &forced {
                out.source = sample_norms(f, None, q)?;
                out.kinetic_solver = sample_norms(lu, None, q)?;
                if let Some(d) = defect {
                    out.residual = sample_norms(d, None, q)?;
                }
            }
            Ok(out)
        })
        .collect()
}

/// `||D_x^{β/(β+1)} u|| / (||u|| + ||d_t u + v.grad_x u|| + ||D_v^β u||)` in
/// `L^p_μ((0,T); L^q)` for each profile.
pub fn regularization_report(profiles: &[KineticProfile], p: f64, mu: f64) -> Result<DiagnosticReport> {
    let mut report = DiagnosticReport::new("kinetic_regularization")
        .param("p", p)
        .param("mu", mu);
    if let Some(first) = profiles.first() {
        report.set_param("q", first.q);
    }
    for pr in profiles {
        let wn = |v: &[f64]| weighted_samples_norm(&pr.times, v, p, mu);
        let den = wn(&pr.u)? + wn(&pr.kinetic)? + wn(&pr.dv)?;
        if den < DENOMINATOR_FLOOR {
            report.skip(pr.id.clone(), format!("denominator {den:e} below {DENOMINATOR_FLOOR:e}"));
            continue;
        }
        report.push(pr.id.clone(), wn(&pr.dx)? / den);
    }
    report.finish()
}

/// `(||u|| + ||d_t u + v.grad_x u|| + ||(-Δ_v)^{β/2} u||) / ||f||` in
/// `L^p_μ((0,T); L^q)`; the worst residual relative to `||f||` is recorded as
/// `max_residual` when available.
pub fn maxreg_report(profiles: &[KineticProfile], p: f64, mu: f64) -> Result<DiagnosticReport> {
    let mut report = DiagnosticReport::new("maximal_regularity").param("p", p).param("mu", mu);
    if let Some(first) = profiles.first() {
        report.set_param("q", first.q);
    }
    let mut max_residual: Option<f64> = None;
    for pr in profiles {
        let wn = |v: &[f64]| weighted_samples_norm(&pr.times, v, p, mu);
        if pr.source.is_empty() {
            return Err(Error::InvalidParameter(format!("profile {} has no source", pr.id)));
        }
        let fnorm = wn(&pr.source)?;
        if fnorm == 0.0 {
            report.skip(pr.id.clone(), "source has zero norm");
            continue;
        }
        if !pr.residual.is_empty() {
            let r = wn(&pr.residual)? / fnorm;
            max_residual = Some(max_residual.map_or(r, |m: f64| m.max(r)));
        }
        report.push(pr.id.clone(), (wn(&pr.u)? + wn(&pr.kinetic_solver)? + wn(&pr.dv)?) / fnorm);
    }
    if let Some(r) = max_residual {
        report.set_param("max_residual", r);
    }
    report.finish()
}

/// Regularization ratio for each trajectory, weighted by its own `(p, q, μ)`.
pub fn kinetic_regularization_ratio(corpus: &[(String, Trajectory)], beta: f64) -> Result<DiagnosticReport> {
    let Some((_, first)) = corpus.first() else {
        return Err(Error::EmptyCorpus);
    };
    let w = first.weights;
    let p = KolmogorovParams::new(beta, *first.grid())?;
    let profiles = corpus
        .iter()
        .map(|(id, u)| Ok(kinetic_profiles(id, u, None, &p, &[w.q], false)?.remove(0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(regularization_report(&profiles, w.p, w.mu)?.param("beta", beta))
}

/// Solver-consistent kinetic derivative of a Duhamel solution:
/// `d_t u + v.grad_x u = f - (-Δ_v)^{β/2} u + defect`.
pub fn duhamel_kinetic_derivative(u: &Trajectory, f: &Trajectory, p: &KolmogorovParams) -> Result<(Trajectory, Trajectory)> {
    let defect = duhamel_defect(u, f, p)?;
    let dv = dv_beta(p.beta);
    let mut fields = Vec::with_capacity(u.len());
    for ((uf, ff), df) in u.fields().iter().zip(f.fields()).zip(defect.fields()) {
        let mut lu = ff.clone();
        lu.axpy(Complex64::new(-1.0, 0.0), &apply_multiplier(uf, &dv)?);
        lu.axpy(Complex64::new(1.0, 0.0), df);
        fields.push(lu);
    }
    Ok((Trajectory::new(u.times().to_vec(), fields, u.weights)?, defect))
}

/// Maximal-regularity ratio of the zero-datum solution of each source,
/// including the equation residual check.
pub fn maximal_regularity_constant(sources: &[(String, Trajectory)], p: &KolmogorovParams) -> Result<DiagnosticReport> {
    let Some((_, first)) = sources.first() else {
        return Err(Error::EmptyCorpus);
    };
    let w = first.weights;
    let profiles = sources
        .iter()
        .map(|(id, f)| Ok(kinetic_profiles(id, &duhamel_solve(f, p)?, Some(f), p, &[w.q], true)?.remove(0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(maxreg_report(&profiles, w.p, w.mu)?.param("beta", p.beta))
}

/// Both sides of `Phi_μ u = L^{-1}[Phi_μ f + (1-μ) t^{-μ} u]`, where
/// `L = d_t + v.grad_x + (-Δ_v)^{β/2}` with zero datum and `u = L^{-1} f`:
/// returns the unweighted norms of the left side and of the difference.
pub fn phi_mu_conjugation(f: &Trajectory, p: &KolmogorovParams) -> Result<(f64, f64)> {
    let mu = f.weights.mu;
    if f.times()[0] != 0.0 {
        return Err(Error::InvalidTimeGrid("conjugation check starts at t = 0".into()));
    }
    let u = duhamel_solve(f, p)?;
    let scaled = |traj: &Trajectory, e: f64| -> Result<Vec<SpectralField>> {
        traj.fields()
            .iter()
            .zip(traj.times())
            .map(|(x, &t)| Ok(if t == 0.0 { SpectralField::zeros(*x.grid()) } else { x.scaled(t.powf(e)) }))
            .collect()
    };
    let lhs = Trajectory::new(u.times().to_vec(), scaled(&u, 1.0 - mu)?, f.weights.unweighted())?;
    let mut src = scaled(f, 1.0 - mu)?;
    for (s, extra) in src.iter_mut().zip(scaled(&u, -mu)?) {
        s.axpy(Complex64::new(1.0 - mu, 0.0), &extra);
    }
    let rhs = duhamel_solve(&Trajectory::new(f.times().to_vec(), src, f.weights.unweighted())?, p)?;
    let diff = Trajectory::new(
        u.times().to_vec(),
        lhs.fields().iter().zip(rhs.fields()).map(|(a, b)| a.sub(b)).collect(),
        f.weights.unweighted(),
    )?;
    Ok((weighted_norm(&lhs, None)?, weighted_norm(&diff, None)?))
}
