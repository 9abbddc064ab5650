//! Scenario runners. Each reads its keys from the config, writes artifacts
//! and returns the summary stored in `run.json`.

use kinspec::diagnostics::corpus::{
    band_limited_noise, bump, bump_family, dilation_family, enveloped_noise, heavy_tailed, noise_family,
    shear_family, standard_corpus, xi_heavy_tail, CorpusElement, DILATION_LEVELS,
};
use kinspec::diagnostics::{
    kinetic_profiles, maxreg_report, regularization_report, smoothing_profile, solution_corpus,
    trace_equivalence_band, DiagnosticReport, TrendPoint,
};
use kinspec::norms::{
    besov_pair, dyadic_levels, lq_norm, partition_sum_error, AnisotropyParams, BesovMode, BesovSpec,
    TraceFlowOptions,
};
use kinspec::propagator::{duhamel_solve, homogeneous_solve, KolmogorovParams};
use kinspec::quasilinear::{continuation, integrability_gate, DiffusivityKind, DiffusivityModel, FixedPointOptions, Verdict};
use kinspec::spectral::{forward, inverse_with_residue, Field, TorusGrid};
use kinspec::trajectory::{graded_times, uniform_times, Trajectory};
use kinspec::varcoef::{
    check_hypotheses, solve_linear_varcoef, BucOptions, CoefficientField, OperatorForm, Source, VarcoefOptions,
};
use serde_json::{json, Value};

use crate::artifacts::{num, Artifacts, Check};
use crate::config::Config;
use crate::error::{CliError, CliResult};

pub const SCENARIOS: [&str; 8] = [
    "solve",
    "diagnose-regularization",
    "maxreg",
    "besov",
    "trace-band",
    "smoothing",
    "varcoef",
    "quasilinear",
];

pub fn run(name: &str, cfg: &Config, out: &mut Artifacts) -> CliResult<Value> {
    match name {
        "solve" => solve(cfg, out),
        "diagnose-regularization" => diagnose_regularization(cfg, out),
        "maxreg" => maxreg(cfg, out),
        "besov" => besov(cfg, out),
        "trace-band" => trace_band(cfg, out),
        "smoothing" => smoothing(cfg, out),
        "varcoef" => varcoef(cfg, out),
        "quasilinear" => quasilinear(cfg, out),
        other => Err(CliError::UnknownScenario(other.into())),
    }
}

/// Data sets named by `corpus.kind`.
fn corpus(cfg: &Config, grid: TorusGrid, seed: u64) -> CliResult<Vec<CorpusElement>> {
    let kind = cfg.str("corpus.kind")?;
    let one = |id: String, f: Field| vec![CorpusElement::new(id, f)];
    Ok(match kind {
        "standard" => standard_corpus(grid, seed)?,
        "bumps" => bump_family(grid)?,
        "noise" => noise_family(grid, seed)?,
        "shears" => shear_family(grid)?,
        "gaussian" => {
            let (k, s) = (cfg.f64("corpus.kappa")?, cfg.f64("corpus.sigma")?);
            one(format!("gaussian-k{k}-s{s}"), bump(grid, k, s)?)
        }
        "band-limited" => {
            let band = cfg.f64("corpus.band")?;
            one(format!("band-limited-{band}"), band_limited_noise(grid, band, seed)?)
        }
        "enveloped" => {
            let band = cfg.f64("corpus.band")?;
            one(format!("enveloped-{band}"), enveloped_noise(grid, band, seed)?)
        }
        "heavy-tailed" => {
            let aniso = AnisotropyParams::kinetic(grid.n, cfg.f64("equation.beta")?, cfg.f64("corpus.order")?)?;
            let (decay, band) = (cfg.f64("corpus.decay")?, cfg.f64("corpus.band")?);
            one(format!("heavy-tailed-{decay}-{band}"), heavy_tailed(grid, &aniso, decay, band, seed)?)
        }
        "xi-heavy-tail" => {
            let decay = cfg.f64("corpus.decay")?;
            cfg.f64_list("corpus.bands")?
                .into_iter()
                .map(|band| Ok(CorpusElement::new(format!("xi-tail-band{band}"), xi_heavy_tail(grid, decay, band, seed)?)))
                .collect::<CliResult<_>>()?
        }
        "dilation" => {
            let levels = cfg.f64_list_or("corpus.levels", &DILATION_LEVELS)?;
            dilation_family(grid, cfg.f64("equation.beta")?, &levels, cfg.f64("corpus.sigma")?)?
        }
        other => return Err(CliError::InvalidParameters(format!("unknown corpus kind `{other}`"))),
    })
}

fn time_grid(cfg: &Config, horizon: f64, with_zero: bool) -> CliResult<Vec<f64>> {
    let steps = cfg.usize("time.steps")?;
    let grading = cfg.f64_or("time.grading", 1.0)?;
    if steps == 0 {
        return Err(CliError::InvalidParameters("time.steps must be positive".into()));
    }
    let mut times = if grading == 1.0 {
        uniform_times(horizon, steps)[1..].to_vec()
    } else {
        graded_times(horizon, steps, grading)
    };
    if with_zero {
        times.insert(0, 0.0);
    }
    Ok(times)
}

fn report_rows(r: &DiagnosticReport) -> Vec<Vec<String>> {
    r.samples.iter().map(|s| vec![s.id.clone(), num(s.ratio)]).collect()
}

fn solve(cfg: &Config, out: &mut Artifacts) -> CliResult<Value> {
    let grid = cfg.grid()?;
    let eq = cfg.equation()?;
    let params = KolmogorovParams::new(eq.beta, grid)?;
    let times = time_grid(cfg, eq.horizon, true)?;
    let amplitude = cfg.f64_or("source.amplitude", 0.0)?;
    let every = cfg.usize_or("output.snapshot_every", times.len() - 1)?.max(1);
    let data = corpus(cfg, grid, out.seed)?;
    let mut rows = Vec::new();
    let mut worst_growth: f64 = 0.0;
    for (e, el) in data.iter().enumerate() {
        let g = forward(&el.field)?;
        let mut fields = times.iter().map(|&t| homogeneous_solve(&g, t, &params)).collect::<Result<Vec<_>, _>>()?;
        if amplitude != 0.0 {
            let f = Trajectory::new(times.clone(), vec![g.scaled(amplitude); times.len()], eq.weights()?)?;
            let forced = duhamel_solve(&f, &params)?;
            for (u, w) in fields.iter_mut().zip(forced.fields()) {
                u.axpy(1.0.into(), w);
            }
        }
        let mut prev = f64::INFINITY;
        for (j, (&t, u)) in times.iter().zip(&fields).enumerate() {
            let phys = inverse_with_residue(u).0;
            let lq = lq_norm(&phys, eq.q)?;
            rows.push(vec![el.id.clone(), num(t), num(lq), num(phys.l2()), num(phys.mean())]);
            if prev.is_finite() {
                worst_growth = worst_growth.max((lq - prev) / prev.max(f64::MIN_POSITIVE));
            }
            prev = lq;
            if j % every == 0 || j == times.len() - 1 {
                out.snapshot(&format!("u_{e:02}_{j:04}"), &phys)?;
            }
        }
    }
    out.csv("norms.csv", &["sample", "time", "lq_norm", "l2_norm", "mean"], &rows)?;
    if amplitude == 0.0 {
        out.check(Check::at_most("lq_contractivity", worst_growth, 1e-10));
    }
    Ok(json!({ "samples": data.len(), "times": times.len(), "q": eq.q, "max_relative_growth": worst_growth }))
}

fn kinetic_report(cfg: &Config, grid: TorusGrid, seed: u64, maxreg: bool, residual: bool) -> CliResult<DiagnosticReport> {
    let eq = cfg.equation()?;
    let params = KolmogorovParams::new(eq.beta, grid)?;
    let times = time_grid(cfg, eq.horizon, true)?;
    let data = corpus(cfg, grid, seed)?;
    let sols = solution_corpus(&data, &times, eq.weights()?, &params)?;
    let mut profiles = Vec::new();
    for (id, f, u) in &sols {
        profiles.extend(kinetic_profiles(id, u, Some(f), &params, &[eq.q], residual)?);
    }
    let r = if maxreg {
        maxreg_report(&profiles, eq.p, eq.mu)?
    } else {
        regularization_report(&profiles, eq.p, eq.mu)?
    };
    Ok(r.param("grid_size", grid.nx))
}

fn diagnose_regularization(cfg: &Config, out: &mut Artifacts) -> CliResult<Value> {
    let r = kinetic_report(cfg, cfg.grid()?, out.seed, false, false)?;
    out.csv("ratios.csv", &["sample", "ratio"], &report_rows(&r))?;
    out.json("report.json", "report", &r)?;
    out.check(Check::holds("finite_ratios", r.samples.iter().all(|s| s.ratio.is_finite())));
    Ok(json!({ "worst_ratio": r.worst_ratio, "samples": r.samples.len() }))
}

fn maxreg(cfg: &Config, out: &mut Artifacts) -> CliResult<Value> {
    let base = cfg.grid()?;
    let levels = cfg.usize_list_or("maxreg.levels", &[base.nx])?;
    let grids = levels
        .iter()
        .map(|&m| base.with_points(m, m))
        .collect::<Result<Vec<_>, _>>()?;
    let finest = grids.iter().map(|g| g.nx).max().unwrap_or(0);
    let mut trend = Vec::new();
    let mut last = None;
    for g in &grids {
        let r = kinetic_report(cfg, *g, out.seed, true, g.nx == finest)?;
        trend.push(TrendPoint {
            grid_size: g.nx,
            worst_ratio: r.worst_ratio,
        });
        if g.nx == finest {
            last = Some(r);
        }
    }
    let mut r = last.ok_or_else(|| CliError::InvalidParameters("maxreg.levels is empty".into()))?;
    trend.sort_by_key(|p| p.grid_size);
    r.refinement_trend = trend;
    let trend: Vec<Vec<String>> =
        r.refinement_trend.iter().map(|p| vec![p.grid_size.to_string(), num(p.worst_ratio)]).collect();
    out.csv("ratios.csv", &["sample", "ratio"], &report_rows(&r))?;
    out.csv("trend.csv", &["grid_size", "worst_ratio"], &trend)?;
    out.json("report.json", "report", &r)?;
    let residual = r.parameters.get("max_residual").and_then(Value::as_f64).unwrap_or(0.0);
    out.check(Check::holds("finite_constant", r.worst_ratio.is_finite()));
    if grids.len() > 1 {
        out.check(Check::at_most("refinement_drift", r.refinement_drift(), cfg.f64_or("maxreg.drift_tol", 0.1)?));
    }
    out.check(Check::at_most("solver_residual", residual, 1e-6));
    Ok(json!({
        "worst_ratio": r.worst_ratio,
        "refinement_trend": r.refinement_trend,
        "refinement_drift": r.refinement_drift(),
        "max_residual": residual,
    }))
}

fn besov(cfg: &Config, out: &mut Artifacts) -> CliResult<Value> {
    let grid = cfg.grid()?;
    let beta = cfg.f64("equation.beta")?;
    let spec = BesovSpec::kinetic(
        grid.n,
        beta,
        cfg.f64("besov.a")?,
        cfg.f64_or("besov.q", 2.0)?,
        cfg.f64_or("besov.p", 2.0)?,
    )?;
    let band = cfg.f64_list_or("besov.band", &[0.5, 2.0])?;
    if band.len() != 2 {
        return Err(CliError::InvalidParameters("besov.band needs two entries".into()));
    }
    let mut rows = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for el in corpus(cfg, grid, out.seed)? {
        let (c, d) = besov_pair(&el.field, &spec)?;
        if d == 0.0 {
            continue;
        }
        lo = lo.min(c / d);
        hi = hi.max(c / d);
        rows.push(vec![el.id, num(c), num(d), num(c / d)]);
    }
    if rows.is_empty() {
        return Err(CliError::InvalidParameters("every corpus element has a vanishing norm".into()));
    }
    let partition = partition_sum_error(&grid, &spec.aniso, dyadic_levels(&grid, &spec)?);
    out.csv("besov.csv", &["sample", "continuous", "dyadic", "ratio"], &rows)?;
    out.check(Check::within("ratio_min", lo, band[0], band[1]));
    out.check(Check::within("ratio_max", hi, band[0], band[1]));
    out.check(Check::at_most("partition_error", partition, 1e-12));
    Ok(json!({ "min_ratio": lo, "max_ratio": hi, "partition_error": partition }))
}

fn trace_band(cfg: &Config, out: &mut Artifacts) -> CliResult<Value> {
    let grid = cfg.grid()?;
    let eq = cfg.equation()?;
    let opts = TraceFlowOptions {
        octaves: cfg.usize_or("trace.octaves", 20)? as u32,
        panels_per_octave: cfg.usize_or("trace.panels_per_octave", 1)? as u32,
    };
    let mode = match cfg.str_or("trace.mode", "dyadic")? {
        "dyadic" => BesovMode::Dyadic,
        "continuous" => BesovMode::Continuous,
        other => return Err(CliError::InvalidParameters(format!("unknown Besov mode `{other}`"))),
    };
    let data = corpus(cfg, grid, out.seed)?;
    let r = trace_equivalence_band(&data, cfg.f64("trace.s")?, eq.beta, &eq.weights()?, mode, &opts)?.finish()?;
    out.csv("ratios.csv", &["sample", "ratio"], &report_rows(&r))?;
    out.json("report.json", "report", &r)?;
    out.check(Check::at_most("band_width", r.band_width(), 50.0));
    if cfg.has("trace.band") {
        let band = cfg.f64_list("trace.band")?;
        if band.len() != 2 {
            return Err(CliError::InvalidParameters("trace.band needs two entries".into()));
        }
        out.check(Check::within("ratio_min", r.min_ratio(), band[0], band[1]));
        out.check(Check::within("ratio_max", r.worst_ratio, band[0], band[1]));
    }
    Ok(json!({ "min_ratio": r.min_ratio(), "max_ratio": r.worst_ratio, "band_width": r.band_width() }))
}

fn smoothing(cfg: &Config, out: &mut Artifacts) -> CliResult<Value> {
    let grid = cfg.grid()?;
    let (beta, p, q, mu) = (
        cfg.f64("equation.beta")?,
        cfg.f64("equation.p")?,
        cfg.f64("equation.q")?,
        cfg.f64("equation.mu")?,
    );
    let orders = cfg.f64_list("smoothing.orders")?;
    let times = cfg.f64_list("smoothing.times")?;
    let mut rows = Vec::new();
    let mut finite = true;
    for el in corpus(cfg, grid, out.seed)? {
        let r = smoothing_profile(&el.field, &orders, &times, beta, p, q, mu)?;
        for s in &r.samples {
            finite &= s.ratio.is_finite();
            rows.push(vec![el.id.clone(), s.id.clone(), num(s.ratio)]);
        }
    }
    out.csv("smoothing.csv", &["sample", "parameter", "ratio"], &rows)?;
    out.check(Check::holds("finite_norms", finite));
    Ok(json!({ "rows": rows.len() }))
}

fn coefficients(cfg: &Config, grid: &TorusGrid) -> CliResult<CoefficientField> {
    let n = grid.n;
    Ok(match cfg.str("varcoef.coefficients")? {
        "constant" => CoefficientField::constant(n, cfg.f64_or("varcoef.a0", 1.0)?, [0.0; 2], cfg.f64_or("varcoef.c", 0.0)?)?,
        "compact-perturbation" => {
            CoefficientField::compact_perturbation(n, cfg.f64("varcoef.amplitude")?, cfg.f64("varcoef.radius")?)?
        }
        "clipped-distance" => CoefficientField::clipped_distance(n, grid.lx)?,
        other => return Err(CliError::InvalidParameters(format!("unknown coefficient field `{other}`"))),
    })
}

fn varcoef(cfg: &Config, out: &mut Artifacts) -> CliResult<Value> {
    let grid = cfg.grid()?;
    let horizon = cfg.f64("equation.T")?;
    let coef = coefficients(cfg, &grid)?;
    let mut opts = VarcoefOptions::new(horizon, cfg.usize("varcoef.steps")?);
    opts.override_hypotheses = cfg.bool_or("varcoef.override_hypotheses", false)?;
    opts.form = match cfg.str_or("varcoef.form", "non-divergence")? {
        "non-divergence" => OperatorForm::NonDivergence,
        "divergence" => OperatorForm::Divergence,
        other => return Err(CliError::InvalidParameters(format!("unknown operator form `{other}`"))),
    };
    let report = check_hypotheses(&coef, &grid, horizon, &BucOptions::default())?;
    out.json("hypotheses.json", "hypotheses", &report)?;
    if !report.passed && !opts.override_hypotheses {
        return Err(CliError::HypothesisRefused {
            message: format!("coefficient `{}` fails the hypothesis check", coef.name),
            details: serde_json::to_value(&report)?,
        });
    }
    let mut rows = Vec::new();
    let data = corpus(cfg, grid, out.seed)?;
    for (e, el) in data.iter().enumerate() {
        let run = solve_linear_varcoef(&el.field, Source::None, &coef, &opts)?;
        for (t, f) in run.times.iter().zip(&run.fields) {
            rows.push(vec![el.id.clone(), num(*t), num(f.l2()), num(f.mean())]);
        }
        out.snapshot(&format!("u_{e:02}_final"), &run.fields[run.fields.len() - 1])?;
    }
    out.csv("norms.csv", &["sample", "time", "l2_norm", "mean"], &rows)?;
    out.check(Check::holds("hypotheses", report.passed));
    Ok(json!({ "coefficient": coef.name, "hypotheses_passed": report.passed, "samples": data.len() }))
}

fn quasilinear(cfg: &Config, out: &mut Artifacts) -> CliResult<Value> {
    let grid = cfg.grid()?;
    let w = cfg.weights()?;
    let kind: DiffusivityKind = cfg
        .table("quasilinear.model")?
        .clone()
        .try_into()
        .map_err(|e: toml::de::Error| CliError::InvalidParameters(format!("quasilinear.model: {}", e.message())))?;
    let model = DiffusivityModel::new(kind, grid.n, cfg.f64("quasilinear.window")?)?;
    let slab = cfg.f64("quasilinear.slab")?;
    let amplitude = cfg.f64_or("quasilinear.amplitude", 0.0)?;
    let opts = FixedPointOptions::default();
    let gate = integrability_gate(&w, grid.n);
    let (mut slab_rows, mut norm_rows, mut verdicts) = (Vec::new(), Vec::new(), Vec::new());
    let mut all_reached = true;
    for (e, el) in corpus(cfg, grid, out.seed)?.into_iter().enumerate() {
        let u0 = if amplitude > 0.0 && el.field.max_abs() > 0.0 {
            el.field.scaled(amplitude / el.field.max_abs())
        } else {
            el.field.clone()
        };
        let res = continuation(&u0, &model, &w, w.horizon, slab, &opts)?;
        for s in &res.slabs {
            slab_rows.push(vec![
                el.id.clone(),
                num(s.start),
                num(s.horizon),
                s.iterations.to_string(),
                num(s.max_contraction),
            ]);
        }
        for (t, n) in &res.cumulative_norm {
            norm_rows.push(vec![el.id.clone(), num(*t), num(*n)]);
        }
        all_reached &= res.verdict == Verdict::ReachedHorizon;
        out.snapshot(&format!("u_{e:02}_final"), res.run.last())?;
        verdicts.push(json!({ "sample": el.id, "verdict": res.verdict }));
    }
    out.csv("slabs.csv", &["sample", "start", "horizon", "iterations", "max_contraction"], &slab_rows)?;
    out.csv("cumulative_norm.csv", &["sample", "time", "norm"], &norm_rows)?;
    out.check(Check::holds("integrability_gate", gate));
    out.check(Check::holds("reached_horizon", all_reached));
    Ok(json!({ "gate_satisfied": gate, "verdicts": verdicts }))
}
