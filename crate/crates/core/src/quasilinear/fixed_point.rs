use log::warn;
use serde::{Deserialize, Serialize};

use super::model::DiffusivityModel;
use crate::error::{Error, Result};
use crate::norms::{spectral_lq_norm, weighted_samples_norm};
use crate::spectral::{apply_table, forward, tabulate, Field, MultiplierSpec, TorusGrid};
use crate::trajectory::{Trajectory, WeightParams};
use crate::transforms::kinetic_derivative;
use crate::varcoef::{
    apply_slice, check_hypotheses, stability_limit, step_sampled, BucOptions, CoefSample, OperatorForm,
    SampledCoefficients,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOptions {
    pub max_iter: usize,
    /// Stop when the increment is below `rel_tol` times the norm of the first iterate.
    pub rel_tol: f64,
    /// A contraction estimate above this halves the horizon.
    pub contraction_limit: f64,
    /// Smallest horizon tried, as a fraction of the requested one.
    pub min_horizon_fraction: f64,
    /// Fraction of the stability limit used as time step.
    pub budget: f64,
    pub min_steps: usize,
    pub buc: BucOptions,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            rel_tol: 1e-8,
            contraction_limit: 0.9,
            min_horizon_fraction: 1.0 / 64.0,
            budget: 0.9,
            min_steps: 8,
            buc: BucOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub iteration: usize,
    /// `||w_{m+1} - w_m||` in `E_mu(0, T)`.
    pub increment: f64,
    /// One-step defect of `w_{m+1}` in the solver's own scheme, in `L^p_mu(L^q)`.
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FixedPointTrace {
    pub horizon: f64,
    pub horizons_tried: Vec<f64>,
    pub steps: usize,
    pub iterates: Vec<IterateRecord>,
    /// `increment[m+1] / increment[m]`.
    pub contraction_estimates: Vec<f64>,
    pub converged: bool,
    /// `E_mu` norm of the frozen linear solution.
    pub reference_norm: f64,
    /// `L^p_mu(L^q)` norm of the converged solution.
    pub solution_norm: f64,
    pub gate_satisfied: bool,
}

impl FixedPointTrace {
    pub fn max_contraction(&self) -> f64 {
        self.contraction_estimates.iter().cloned().fold(0.0, f64::max)
    }

    pub fn final_residual(&self) -> f64 {
        self.iterates.last().map_or(0.0, |r| r.residual)
    }
}

/// Physical-space samples of a quasilinear solution.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasilinearRun {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
}

impl QuasilinearRun {
    pub fn to_trajectory(&self, weights: WeightParams) -> Result<Trajectory> {
        let fields = self.fields.iter().map(forward).collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.times.clone(), fields, weights)
    }

    pub fn last(&self) -> &Field {
        &self.fields[self.fields.len() - 1]
    }
}

/// `mu - 1/p > 1/2 + 2n/q`.
pub fn integrability_gate(w: &WeightParams, n: usize) -> bool {
    w.mu - 1.0 / w.p > 0.5 + 2.0 * n as f64 / w.q
}

/// Per-sample `L^q` norms of `u`, of its kinetic derivative and of `Delta_v u`
/// at the positive sample times.
pub(crate) struct EnergyProfile {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub hessian: Vec<f64>,
}

impl EnergyProfile {
    pub fn new(times: &[f64], fields: &[Field], w: &WeightParams) -> Result<Self> {
        let traj = Trajectory::new(
            times.to_vec(),
            fields.iter().map(forward).collect::<Result<Vec<_>>>()?,
            *w,
        )?;
        let lu = kinetic_derivative(&traj)?;
        let lap = tabulate(traj.grid(), &MultiplierSpec::dv_pow(2.0))?;
        let start = usize::from(times[0] <= 0.0);
        let mut out = Self {
            times: times[start..].to_vec(),
            u: Vec::new(),
            kinetic: Vec::new(),
            hessian: Vec::new(),
        };
        for j in start..times.len() {
            out.u.push(spectral_lq_norm(&traj.fields()[j], w.q)?);
            out.kinetic.push(spectral_lq_norm(&lu.fields()[j], w.q)?);
            out.hessian.push(spectral_lq_norm(&apply_table(&traj.fields()[j], &lap), w.q)?);
        }
        Ok(out)
    }

    /// `E_mu` norm over the first `len` positive samples.
    pub fn norm(&self, w: &WeightParams, len: usize) -> Result<f64> {
        let t = &self.times[..len];
        let wn = |v: &[f64]| weighted_samples_norm(t, &v[..len], w.p, w.mu);
        Ok(wn(&self.u)? + wn(&self.kinetic)? + wn(&self.hessian)?)
    }
}

fn e_norm(times: &[f64], fields: &[Field], w: &WeightParams) -> Result<f64> {
    let prof = EnergyProfile::new(times, fields, w)?;
    prof.norm(w, prof.times.len())
}

/// `div_v((kappa(w) - kappa(u0)) grad_v w)` in the solver's flux form.
fn nonlinear_source(w: &Field, frozen: &[CoefSample], model: &DiffusivityModel) -> Field {
    let grid = *w.grid();
    let n = grid.n;
    let diff: Vec<CoefSample> = model
        .samples(w)
        .into_iter()
        .zip(frozen)
        .map(|(mut s, f)| {
            for i in 0..2 {
                for j in 0..2 {
                    s.a[i][j] -= f.a[i][j];
                }
            }
            s
        })
        .collect();
    let slice = grid.nv.pow(n as u32);
    let mut out = vec![0.0; grid.len()];
    for (k, chunk) in out.chunks_mut(slice).enumerate() {
        let r = k * slice..(k + 1) * slice;
        apply_slice(&w.values()[r.clone()], &diff[r], grid.hv(), n, grid.nv, OperatorForm::Divergence, chunk);
    }
    Field::new(grid, out).expect("finite operator output")
}

struct Frozen<'a> {
    model: &'a DiffusivityModel,
    coef: SampledCoefficients,
    dt: f64,
    steps: usize,
    t0: f64,
}

impl Frozen<'_> {
    fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|j| j as f64 * self.dt).collect()
    }

    /// Linear solve from `u0` with the source `S(w)` sampled at the step times.
    fn solve(&self, u0: &Field, sources: Option<&[Field]>) -> Result<Vec<Field>> {
        let mut out = Vec::with_capacity(self.steps + 1);
        let mut u = u0.clone();
        out.push(u.clone());
        for j in 0..self.steps {
            let mid = sources.map(|s| {
                let mut m = s[j].scaled(0.5);
                m.axpy(0.5, &s[j + 1]);
                m
            });
            u = step_sampled(&u, &self.coef, self.dt, mid.as_ref(), f64::INFINITY, OperatorForm::Divergence)?;
            out.push(u.clone());
        }
        Ok(out)
    }

    fn sources(&self, w: &[Field]) -> Result<Vec<Field>> {
        w.iter()
            .enumerate()
            .map(|(j, f)| {
                self.model.check_range(f, self.t0 + j as f64 * self.dt)?;
                Ok(nonlinear_source(f, &self.coef.values, self.model))
            })
            .collect()
    }

    /// `(w_{j+1} - step(w_j)) / dt` with the source built from `w` itself.
    fn defect(&self, w: &[Field], sources: &[Field], weights: &WeightParams) -> Result<f64> {
        let mut norms = Vec::with_capacity(self.steps);
        for j in 0..self.steps {
            let mut mid = sources[j].scaled(0.5);
            mid.axpy(0.5, &sources[j + 1]);
            let next = step_sampled(&w[j], &self.coef, self.dt, Some(&mid), f64::INFINITY, OperatorForm::Divergence)?;
            let d = w[j + 1].sub(&next).scaled(1.0 / self.dt);
            norms.push(spectral_lq_norm(&forward(&d)?, weights.q)?);
        }
        weighted_samples_norm(&self.times()[1..], &norms, weights.p, weights.mu)
    }
}

/// Frozen-coefficient iteration `w_{m+1} = G(w_m)` for
/// `d_t u + v.grad_x u = div_v(kappa(u) grad_v u)`, `u(0) = u0`: each step solves
/// the linear problem with `kappa(u0)` and the source
/// `div_v((kappa(w_m) - kappa(u0)) grad_v w_m)`. The horizon is halved while the
/// iteration fails to contract.
pub fn fixed_point_solve(
    u0: &Field,
    model: &DiffusivityModel,
    weights: &WeightParams,
    t_request: f64,
    opts: &FixedPointOptions,
) -> Result<(QuasilinearRun, FixedPointTrace)> {
    fixed_point_from(u0, model, weights, t_request, 0.0, opts)
}

pub(crate) fn fixed_point_from(
    u0: &Field,
    model: &DiffusivityModel,
    weights: &WeightParams,
    t_request: f64,
    t0: f64,
    opts: &FixedPointOptions,
) -> Result<(QuasilinearRun, FixedPointTrace)> {
    let grid: TorusGrid = *u0.grid();
    if grid.n != model.n {
        return Err(Error::GridMismatch(format!("model has n={}, grid has n={}", model.n, grid.n)));
    }
    if !(t_request > 0.0) || opts.max_iter == 0 || !(opts.budget > 0.0 && opts.budget <= 1.0) {
        return Err(Error::InvalidParameter("fixed-point solve needs T > 0, max_iter >= 1, budget in (0, 1]".into()));
    }
    model.check_range(u0, t0)?;
    let gate = integrability_gate(weights, grid.n);
    if !gate {
        warn!(
            "mu - 1/p = {:.3} does not exceed 1/2 + 2n/q = {:.3}; running outside the well-posedness gate",
            weights.mu - 1.0 / weights.p,
            0.5 + 2.0 * grid.n as f64 / weights.q
        );
    }
    let coef = crate::varcoef::SampledCoefficients::from_values(&grid, 0.0, model.samples(u0))?;
    let limit = stability_limit(&coef, &grid);
    let frozen_field = super::model::A_of(u0, model)?;

    let mut trace = FixedPointTrace {
        gate_satisfied: gate,
        ..Default::default()
    };
    let mut horizon = t_request;
    let floor = t_request * opts.min_horizon_fraction;
    loop {
        trace.horizons_tried.push(horizon);
        let hyp = check_hypotheses(&frozen_field, &grid, horizon, &opts.buc)?;
        if !hyp.passed {
            return Err(Error::Hypothesis(format!("frozen coefficient kappa(u0): {}", hyp.failures.join("; "))));
        }
        let steps = ((horizon / (opts.budget * limit)).ceil() as usize).max(opts.min_steps);
        let fz = Frozen {
            model,
            coef: coef.clone(),
            dt: horizon / steps as f64,
            steps,
            t0,
        };
        let times = fz.times();
        let w_weights = WeightParams::new(weights.p, weights.q, weights.mu, horizon)?;
        let mut w = fz.solve(u0, None)?;
        let reference = e_norm(&times, &w, &w_weights)?;
        trace.horizon = horizon;
        trace.steps = steps;
        trace.iterates.clear();
        trace.contraction_estimates.clear();
        trace.reference_norm = reference;
        trace.converged = false;
        let mut lost = false;
        let mut src = fz.sources(&w)?;
        for m in 0..opts.max_iter {
            let next = fz.solve(u0, Some(&src))?;
            let diff: Vec<Field> = next.iter().zip(&w).map(|(a, b)| a.sub(b)).collect();
            let increment = e_norm(&times, &diff, &w_weights)?;
            let next_src = fz.sources(&next)?;
            let residual = fz.defect(&next, &next_src, &w_weights)?;
            if let Some(prev) = trace.iterates.last() {
                let ratio = if prev.increment > 0.0 { increment / prev.increment } else { 0.0 };
                trace.contraction_estimates.push(ratio);
                if ratio > opts.contraction_limit {
                    lost = true;
                }
            }
            trace.iterates.push(IterateRecord { iteration: m, increment, residual });
            w = next;
            src = next_src;
            if increment <= opts.rel_tol * reference {
                trace.converged = true;
                break;
            }
            if lost {
                break;
            }
        }
        if trace.converged {
            let norms = w
                .iter()
                .skip(1)
                .map(|f| spectral_lq_norm(&forward(f)?, weights.q))
                .collect::<Result<Vec<_>>>()?;
            trace.solution_norm = weighted_samples_norm(&times[1..], &norms, weights.p, weights.mu)?;
            let times = times.iter().map(|t| t + t0).collect();
            return Ok((QuasilinearRun { times, fields: w }, trace));
        }
        let ratio = trace.contraction_estimates.last().copied().unwrap_or(f64::INFINITY);
        if horizon * 0.5 < floor * (1.0 - 1e-12) {
            return Err(Error::NoContraction {
                ratio,
                horizon,
                trace: Box::new(trace),
            });
        }
        horizon *= 0.5;
    }
}
