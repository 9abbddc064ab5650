use log::warn;
use serde::{Deserialize, Serialize};

use super::buc::{check_hypotheses, BucOptions, BucReport};
use super::coefficient::{CoefSample, CoefficientField, SampledCoefficients};
use super::linalg::{bicgstab, solve_cyclic_tridiagonal};
use crate::error::{Error, Result};
use crate::spectral::{forward, inverse_with_residue, Field, TorusGrid};
use crate::trajectory::{Trajectory, WeightParams};
use crate::transforms::shear_field;

/// Relative residual accepted from the per-slice linear solves.
pub const SOLVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarcoefOptions {
    pub steps: usize,
    pub horizon: f64,
    /// Multiple of the explicit-half positivity limit allowed for `dt`.
    pub budget: f64,
    /// Keep every `record_every`-th step in the output (the final time is always kept).
    pub record_every: usize,
    pub override_hypotheses: bool,
    pub buc: BucOptions,
    pub form: OperatorForm,
}

/// How the second-order part is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OperatorForm {
    /// `a:grad_v^2 u`, centered second differences with the nodal `a`.
    #[default]
    NonDivergence,
    /// `div_v(a grad_v u)` in flux form with face-averaged `a`; the velocity
    /// sum of the operator vanishes exactly.
    Divergence,
}

impl VarcoefOptions {
    pub fn new(horizon: f64, steps: usize) -> Self {
        Self {
            steps,
            horizon,
            budget: 1.0,
            record_every: 1,
            override_hypotheses: false,
            buc: BucOptions::default(),
            form: OperatorForm::NonDivergence,
        }
    }
}

/// Source term of the variable-coefficient problem.
#[derive(Clone, Copy)]
pub enum Source<'a> {
    None,
    /// Samples covering `[0, T]`, linearly interpolated in time.
    Samples(&'a [(f64, Field)]),
    Function(&'a (dyn Fn(f64, &[f64], &[f64]) -> f64 + Sync)),
}

impl Source<'_> {
    fn at(&self, grid: &TorusGrid, t: f64) -> Result<Option<Field>> {
        match self {
            Source::None => Ok(None),
            Source::Function(f) => Field::from_fn(*grid, |x, v| f(t, x, v)).map(Some),
            Source::Samples(s) => {
                let (first, last) = (s[0].0, s[s.len() - 1].0);
                if t < first - 1e-12 || t > last + 1e-12 {
                    return Err(Error::InvalidTimeGrid(format!(
                        "source samples cover [{first}, {last}], need t={t}"
                    )));
                }
                let j = s.partition_point(|(ts, _)| *ts <= t).clamp(1, s.len() - 1);
                let ((t0, f0), (t1, f1)) = (&s[j - 1], &s[j]);
                let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                let mut out = f0.scaled(1.0 - w);
                out.axpy(w, f1);
                Ok(Some(out))
            }
        }
    }
}

/// Largest `dt` keeping the explicit half of the Crank-Nicolson step
/// positive: `h^2 / max(tr a - c h^2 / 2)`.
pub fn stability_limit(s: &SampledCoefficients, grid: &TorusGrid) -> f64 {
    let h2 = grid.hv() * grid.hv();
    let worst = s
        .values
        .iter()
        .map(|c| (0..grid.n).map(|i| c.a[i][i]).sum::<f64>() - 0.5 * c.c.min(0.0) * h2)
        .fold(0.0f64, f64::max);
    h2 / worst
}

/// One Strang step `T(dt/2) D(dt) T(dt/2)`: exact free transport halves around
/// a Crank-Nicolson step of `a:grad_v^2 + b.grad_v + c` (plus the source)
/// with coefficients frozen at `t + dt/2`.
pub fn step(u: &Field, coef: &CoefficientField, t: f64, dt: f64) -> Result<Field> {
    let s = coef.sample(u.grid(), t + 0.5 * dt)?;
    step_sampled(u, &s, dt, None, 1.0, OperatorForm::NonDivergence)
}

pub(crate) fn step_sampled(
    u: &Field,
    s: &SampledCoefficients,
    dt: f64,
    source: Option<&Field>,
    budget: f64,
    form: OperatorForm,
) -> Result<Field> {
    let grid = *u.grid();
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt={dt} must be > 0")));
    }
    let limit = budget * stability_limit(s, &grid);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::StabilityBudget { dt, budget: limit });
    }
    let half = shear_field(u, -0.5 * dt);
    let diffused = diffusion_step(&half, s, dt, source, form)?;
    Ok(shear_field(&diffused, -0.5 * dt))
}

fn diffusion_step(u: &Field, s: &SampledCoefficients, dt: f64, source: Option<&Field>, form: OperatorForm) -> Result<Field> {
    let grid = *u.grid();
    let n = grid.n;
    let slice = grid.nv.pow(n as u32);
    let h = grid.hv();
    let mut out = vec![0.0; grid.len()];
    for (k, chunk) in out.chunks_mut(slice).enumerate() {
        let base = k * slice;
        let uu = &u.values()[base..base + slice];
        let cs = &s.values[base..base + slice];
        let src = source.map(|f| &f.values()[base..base + slice]);
        if n == 1 {
            slice_1d(uu, cs, src, dt, h, form, chunk)?;
        } else {
            slice_2d(uu, cs, src, dt, h, grid.nv, form, chunk)?;
        }
        let monotone = src.is_none() && cs.iter().all(|c| c.b == [0.0; 2] && c.c <= 0.0 && (n == 1 || c.a[0][1] == 0.0));
        if monotone {
            let before = uu.iter().fold(0.0f64, |m, z| m.max(z.abs()));
            let after = chunk.iter().fold(0.0f64, |m, z| m.max(z.abs()));
            if after > before * (1.0 + 1e-10) + 1e-300 {
                return Err(Error::InvalidParameter(format!(
                    "diffusion step increased the sup norm on slice {k}: {before:e} -> {after:e}"
                )));
            }
        }
    }
    Field::new(grid, out)
}

/// Row `j` of the periodic three-point operator as `(lower, diagonal, upper)`.
fn row_1d(cs: &[CoefSample], j: usize, h: f64, form: OperatorForm) -> (f64, f64, f64) {
    let m = cs.len();
    let c = &cs[j];
    let b = c.b[0] / (2.0 * h);
    let (al, ar) = match form {
        OperatorForm::NonDivergence => (c.a[0][0], c.a[0][0]),
        OperatorForm::Divergence => (
            0.5 * (c.a[0][0] + cs[(j + m - 1) % m].a[0][0]),
            0.5 * (c.a[0][0] + cs[(j + 1) % m].a[0][0]),
        ),
    };
    let (al, ar) = (al / (h * h), ar / (h * h));
    (al - b, -(al + ar) + c.c, ar + b)
}

/// `L u` on one velocity slice.
pub(crate) fn apply_slice(u: &[f64], cs: &[CoefSample], h: f64, n: usize, nv: usize, form: OperatorForm, out: &mut [f64]) {
    if n == 1 {
        let m = u.len();
        for j in 0..m {
            let (l, d, r) = row_1d(cs, j, h, form);
            out[j] = l * u[(j + m - 1) % m] + d * u[j] + r * u[(j + 1) % m];
        }
    } else {
        match form {
            OperatorForm::NonDivergence => apply_2d(u, cs, h, nv, out),
            OperatorForm::Divergence => apply_2d_divergence(u, cs, h, nv, out),
        }
    }
}

fn slice_1d(u: &[f64], cs: &[CoefSample], src: Option<&[f64]>, dt: f64, h: f64, form: OperatorForm, out: &mut [f64]) -> Result<()> {
    let m = u.len();
    let (mut lo, mut diag, mut up, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for j in 0..m {
        let (l, d, r) = row_1d(cs, j, h, form);
        let lu = l * u[(j + m - 1) % m] + d * u[j] + r * u[(j + 1) % m];
        rhs[j] = u[j] + 0.5 * dt * lu + src.map_or(0.0, |f| dt * f[j]);
        lo[j] = -0.5 * dt * l;
        diag[j] = 1.0 - 0.5 * dt * d;
        up[j] = -0.5 * dt * r;
    }
    let x = solve_cyclic_tridiagonal(&lo, &diag, &up, &rhs)?;
    let scale = rhs.iter().fold(0.0f64, |a, z| a.max(z.abs()));
    let mut res = 0.0f64;
    for j in 0..m {
        let ax = lo[j] * x[(j + m - 1) % m] + diag[j] * x[j] + up[j] * x[(j + 1) % m];
        res = res.max((ax - rhs[j]).abs());
    }
    if scale > 0.0 && res > SOLVE_TOL * scale {
        return Err(Error::LinearSolve { residual: res / scale });
    }
    out.copy_from_slice(&x);
    Ok(())
}

/// `a:grad^2 u + b.grad u + c u` on a periodic `nv x nv` velocity slice.
fn apply_2d(u: &[f64], cs: &[CoefSample], h: f64, nv: usize, out: &mut [f64]) {
    let at = |i: usize, j: usize| u[(i % nv) * nv + j % nv];
    let (h2, h4) = (h * h, 4.0 * h * h);
    for i in 0..nv {
        for j in 0..nv {
            let c = &cs[i * nv + j];
            let (ip, im, jp, jm) = (i + 1, i + nv - 1, j + 1, j + nv - 1);
            let here = at(i, j);
            let d11 = (at(ip, j) - 2.0 * here + at(im, j)) / h2;
            let d22 = (at(i, jp) - 2.0 * here + at(i, jm)) / h2;
            let d12 = (at(ip, jp) - at(ip, jm) - at(im, jp) + at(im, jm)) / h4;
            let d1 = (at(ip, j) - at(im, j)) / (2.0 * h);
            let d2 = (at(i, jp) - at(i, jm)) / (2.0 * h);
            out[i * nv + j] = c.a[0][0] * d11
                + (c.a[0][1] + c.a[1][0]) * d12
                + c.a[1][1] * d22
                + c.b[0] * d1
                + c.b[1] * d2
                + c.c * here;
        }
    }
}

/// `div(a grad u) + b.grad u + c u` in flux form on a periodic `nv x nv` slice.
fn apply_2d_divergence(u: &[f64], cs: &[CoefSample], h: f64, nv: usize, out: &mut [f64]) {
    let idx = |i: usize, j: usize| (i % nv) * nv + j % nv;
    let at = |i: usize, j: usize| u[idx(i, j)];
    let face = |p: usize, q: usize, r: usize, s: usize| {
        let (c1, c2) = (&cs[idx(p, q)], &cs[idx(r, s)]);
        let mut a = [[0.0; 2]; 2];
        for (x, row) in a.iter_mut().enumerate() {
            for (y, e) in row.iter_mut().enumerate() {
                *e = 0.5 * (c1.a[x][y] + c2.a[x][y]);
            }
        }
        a
    };
    let (h2, h4) = (h * h, 4.0 * h * h);
    for i in 0..nv {
        for j in 0..nv {
            let (ip, im, jp, jm) = (i + 1, i + nv - 1, j + 1, j + nv - 1);
            let here = at(i, j);
            // fluxes through the four faces of cell (i, j)
            let e = face(i, j, ip, j);
            let w = face(im, j, i, j);
            let nn = face(i, j, i, jp);
            let ss = face(i, jm, i, j);
            let fe = e[0][0] * (at(ip, j) - here) / h2 + e[0][1] * (at(i, jp) + at(ip, jp) - at(i, jm) - at(ip, jm)) / h4;
            let fw = w[0][0] * (here - at(im, j)) / h2 + w[0][1] * (at(im, jp) + at(i, jp) - at(im, jm) - at(i, jm)) / h4;
            let fn_ = nn[1][1] * (at(i, jp) - here) / h2 + nn[1][0] * (at(ip, j) + at(ip, jp) - at(im, j) - at(im, jp)) / h4;
            let fs = ss[1][1] * (here - at(i, jm)) / h2 + ss[1][0] * (at(ip, jm) + at(ip, j) - at(im, jm) - at(im, j)) / h4;
            let c = &cs[i * nv + j];
            out[i * nv + j] = fe - fw + fn_ - fs
                + c.b[0] * (at(ip, j) - at(im, j)) / (2.0 * h)
                + c.b[1] * (at(i, jp) - at(i, jm)) / (2.0 * h)
                + c.c * here;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn slice_2d(u: &[f64], cs: &[CoefSample], src: Option<&[f64]>, dt: f64, h: f64, nv: usize, form: OperatorForm, out: &mut [f64]) -> Result<()> {
    let m = u.len();
    let mut lu = vec![0.0; m];
    apply_slice(u, cs, h, 2, nv, form, &mut lu);
    let rhs: Vec<f64> = (0..m)
        .map(|i| u[i] + 0.5 * dt * lu[i] + src.map_or(0.0, |f| dt * f[i]))
        .collect();
    let diag: Vec<f64> = cs
        .iter()
        .map(|c| 1.0 - 0.5 * dt * (-2.0 * (c.a[0][0] + c.a[1][1]) / (h * h) + c.c))
        .collect();
    let system = |x: &[f64], y: &mut [f64]| {
        apply_slice(x, cs, h, 2, nv, form, y);
        for i in 0..x.len() {
            y[i] = x[i] - 0.5 * dt * y[i];
        }
    };
    out.copy_from_slice(u);
    bicgstab(system, &diag, &rhs, out, SOLVE_TOL, 1000)?;
    Ok(())
}

/// Output of [`solve_linear_varcoef`] in physical space.
#[derive(Debug, Clone)]
pub struct VarcoefRun {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    pub hypotheses: BucReport,
}

impl VarcoefRun {
    pub fn to_trajectory(&self, weights: WeightParams) -> Result<Trajectory> {
        let fields = self.fields.iter().map(forward).collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.times.clone(), fields, weights)
    }

    pub fn last(&self) -> &Field {
        &self.fields[self.fields.len() - 1]
    }
}

/// `d_t u + v.grad_x u = a:grad_v^2 u + b.grad_v u + c u + f`, `u(0) = g`, with
/// `steps` Strang steps over `[0, T]` and the source injected at step midpoints.
pub fn solve_linear_varcoef(g: &Field, f: Source<'_>, coef: &CoefficientField, opts: &VarcoefOptions) -> Result<VarcoefRun> {
    let grid = *g.grid();
    if opts.steps == 0 || opts.record_every == 0 {
        return Err(Error::InvalidParameter("steps and record_every must be >= 1".into()));
    }
    let hypotheses = check_hypotheses(coef, &grid, opts.horizon, &opts.buc)?;
    if !hypotheses.passed {
        let why = hypotheses.failures.join("; ");
        if !opts.override_hypotheses {
            return Err(Error::Hypothesis(format!("coefficient `{}`: {why}", coef.name)));
        }
        warn!("coefficient `{}` fails the BUC check ({why}); continuing on override", coef.name);
    }
    if let Source::Samples(s) = f {
        if s.is_empty() {
            return Err(Error::InvalidTimeGrid("empty source sample list".into()));
        }
        for (_, field) in s {
            field.check_grid(&grid)?;
        }
    }
    let dt = opts.horizon / opts.steps as f64;
    let frozen = if coef.is_time_dependent() { None } else { Some(coef.sample(&grid, 0.0)?) };
    let mut u = g.clone();
    let mut times = vec![0.0];
    let mut fields = vec![g.clone()];
    for j in 0..opts.steps {
        let t = j as f64 * dt;
        let mid = t + 0.5 * dt;
        let sampled = match &frozen {
            Some(s) => s.clone(),
            None => coef.sample(&grid, mid)?,
        };
        let src = f.at(&grid, mid)?;
        u = step_sampled(&u, &sampled, dt, src.as_ref(), opts.budget, opts.form)?;
        if (j + 1) % opts.record_every == 0 || j + 1 == opts.steps {
            times.push((j + 1) as f64 * dt);
            fields.push(u.clone());
        }
    }
    Ok(VarcoefRun { times, fields, hypotheses })
}

/// Trajectory form of [`solve_linear_varcoef`] for a spectral source.
pub fn solve_linear_varcoef_trajectory(
    g: &Field,
    f: Option<&Trajectory>,
    coef: &CoefficientField,
    opts: &VarcoefOptions,
    weights: WeightParams,
) -> Result<Trajectory> {
    let samples: Option<Vec<(f64, Field)>> = f.map(|tr| {
        tr.times()
            .iter()
            .zip(tr.fields())
            .map(|(&t, s)| (t, inverse_with_residue(s).0))
            .collect()
    });
    let source = match &samples {
        Some(s) => Source::Samples(s),
        None => Source::None,
    };
    solve_linear_varcoef(g, source, coef, opts)?.to_trajectory(weights)
}
