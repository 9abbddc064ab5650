use kinspec::diagnostics::dv_beta;
use kinspec::norms::{spectral_lq_norm, weighted_samples_norm};
use kinspec::propagator::{homogeneous_solve, KolmogorovParams};
use kinspec::spectral::{apply_multiplier, forward, inverse_with_residue, Field, TorusGrid};
use kinspec::transforms::{kinetic_derivative, shear_field};
use kinspec::trajectory::WeightParams;
use kinspec::varcoef::*;
use std::f64::consts::PI;

const OMEGA: f64 = 0.7;

fn exact(t: f64, x: f64, v: f64) -> f64 {
    (-v * v / 2.0).exp() * (1.0 + 0.5 * (x - OMEGA * t).cos() * (-t).exp())
}

fn mms_coefficients() -> CoefficientField {
    CoefficientField::new("mms", 1, true, |t, x, v| {
        let e = (-v[0] * v[0] / 4.0).exp();
        CoefSample {
            a: [[1.0 + 0.3 * x[0].sin() * e * (1.0 + 0.5 * t), 0.0], [0.0, 0.0]],
            b: [0.2 * e, 0.0],
            c: -0.1,
        }
    })
    .unwrap()
}

fn mms_source(t: f64, x: &[f64], v: &[f64]) -> f64 {
    let (xx, vv) = (x[0], v[0]);
    let phi = (-vv * vv / 2.0).exp();
    let s = xx - OMEGA * t;
    let g = 1.0 + 0.5 * s.cos() * (-t).exp();
    let dt = phi * 0.5 * (-t).exp() * (OMEGA * s.sin() - s.cos());
    let transport = -vv * phi * 0.5 * (-t).exp() * s.sin();
    let c = mms_coefficients().eval(t, x, v);
    dt + transport - c.a[0][0] * (vv * vv - 1.0) * phi * g + c.b[0] * vv * phi * g - c.c * phi * g
}

fn mms_error(nv: usize, steps: usize) -> (f64, Field) {
    let t = 0.5;
    let grid = TorusGrid::new(1, 32, nv, 2.0 * PI, 6.0 * PI).unwrap();
    let g = Field::from_fn(grid, |x, v| exact(0.0, x[0], v[0])).unwrap();
    let run = solve_linear_varcoef(&g, Source::Function(&mms_source), &mms_coefficients(), &VarcoefOptions::new(t, steps)).unwrap();
    let want = Field::from_fn(grid, |x, v| exact(t, x[0], v[0])).unwrap();
    (run.last().sub(&want).l2() / want.l2(), run.last().clone())
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    // space: dt tied to h^2, compared with the exact solution
    let errs: Vec<f64> = [(64, 32), (128, 128), (256, 512)].iter().map(|&(nv, m)| mms_error(nv, m).0).collect();
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.9, "{errs:?}");
    }
    // time: successive differences on a fixed mesh
    let runs: Vec<Field> = [32, 64, 128].iter().map(|&m| mms_error(128, m).1).collect();
    let (d1, d2) = (runs[0].sub(&runs[1]).l2(), runs[1].sub(&runs[2]).l2());
    assert!((d1 / d2).log2() >= 1.9, "{d1} {d2}");
}

fn resolved_gaussian(grid: TorusGrid, sigma: f64) -> Field {
    let k = 2.0 * PI / grid.lx;
    Field::from_fn(grid, |x, v| (1.0 + 0.5 * (k * x[0]).cos()) * (-(v[0] - 0.3).powi(2) / (2.0 * sigma * sigma)).exp()).unwrap()
}

#[test]
fn constant_identity_matches_spectral_solution() {
    let grid = TorusGrid::new(1, 128, 128, 4.0 * PI, 12.0 * PI).unwrap();
    let g = resolved_gaussian(grid, 3.0);
    let t = 0.25;
    let p = KolmogorovParams::new(2.0, grid).unwrap();
    let want = inverse_with_residue(&homogeneous_solve(&forward(&g).unwrap(), t, &p).unwrap()).0;
    let coef = CoefficientField::constant(1, 1.0, [0.0; 2], 0.0).unwrap();
    let run = solve_linear_varcoef(&g, Source::None, &coef, &VarcoefOptions::new(t, 256)).unwrap();
    let err = run.last().sub(&want).l2() / want.l2();
    assert!(err <= 1e-4, "{err}");
}

#[test]
fn scaled_identity_matches_rescaled_spectral_solution() {
    // u(t, x, v) = w(t, x / sqrt(a0), v / sqrt(a0)) with w the unit-diffusion solution
    let a0: f64 = 2.25;
    let grid = TorusGrid::new(1, 64, 128, 4.0 * PI * a0.sqrt(), 12.0 * PI * a0.sqrt()).unwrap();
    let unit = TorusGrid::new(1, 64, 128, 4.0 * PI, 12.0 * PI).unwrap();
    let g = resolved_gaussian(grid, 3.0 * a0.sqrt());
    let t = 0.25;
    let p = KolmogorovParams::new(2.0, unit).unwrap();
    let g_unit = Field::new(unit, g.values().to_vec()).unwrap();
    let want = inverse_with_residue(&homogeneous_solve(&forward(&g_unit).unwrap(), t, &p).unwrap()).0;
    let coef = CoefficientField::constant(1, a0, [0.0; 2], 0.0).unwrap();
    let run = solve_linear_varcoef(&g, Source::None, &coef, &VarcoefOptions::new(t, 256)).unwrap();
    let diff: f64 = run.last().values().iter().zip(want.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = want.values().iter().map(|b| b * b).sum::<f64>().sqrt();
    assert!(diff / norm <= 1e-4, "{}", diff / norm);
}

#[test]
fn reaction_term_grows_the_mean_like_the_scalar_ode() {
    let grid = TorusGrid::new(1, 16, 64, 2.0 * PI, 6.0 * PI).unwrap();
    let g = Field::from_fn(grid, |x, v| 1.0 + 0.3 * x[0].sin() * (-v[0] * v[0]).exp()).unwrap();
    let (c0, dt) = (0.8, 0.01);
    let coef = CoefficientField::constant(1, 0.05, [0.0; 2], c0).unwrap();
    let mut u = g.clone();
    for j in 0..10 {
        let next = step(&u, &coef, j as f64 * dt, dt).unwrap();
        let factor = next.mean() / u.mean();
        assert!((factor - (c0 * dt).exp()).abs() < 1e-6, "{factor}");
        u = next;
    }
}

#[test]
fn free_transport_halves_are_exactly_invertible() {
    let grid = TorusGrid::new(1, 32, 64, 2.0 * PI, 6.0 * PI).unwrap();
    let g = Field::from_fn(grid, |x, v| (x[0] + 0.5 * v[0]).sin() * (-v[0] * v[0]).exp()).unwrap();
    let back = shear_field(&shear_field(&g, -0.013), 0.013);
    assert!(back.sub(&g).max_abs() < 1e-14);
}

#[test]
fn diffusion_without_drift_or_growth_is_sup_nonexpansive() {
    let grid = TorusGrid::new(1, 32, 64, 2.0 * PI, 6.0 * PI).unwrap();
    let g = Field::from_fn(grid, |x, v| x[0].cos() * (-v[0] * v[0]).exp() + 0.2 * (3.0 * x[0]).sin()).unwrap();
    let coef = CoefficientField::compact_perturbation(1, 0.5, 2.5).unwrap();
    let run = solve_linear_varcoef(&g, Source::None, &coef, &VarcoefOptions::new(0.2, 20)).unwrap();
    for w in run.fields.windows(2) {
        assert!(w[1].max_abs() <= w[0].max_abs() * (1.0 + 1e-6));
    }
}

#[test]
fn near_identity_maximal_regularity_ratio_is_refinement_stable() {
    let ratio = |nv: usize, steps: usize| {
        let grid = TorusGrid::new(1, 32, nv, 2.0 * PI, 6.0 * PI).unwrap();
        let coef = CoefficientField::compact_perturbation(1, 0.3, 3.0).unwrap();
        let h = Field::from_fn(grid, |x, v| (1.0 + x[0].cos()) * (-v[0] * v[0] / 2.0).exp()).unwrap();
        let src = |t: f64, x: &[f64], v: &[f64]| (1.0 + 0.5 * (2.0 * t).sin()) * h.values()[point_index(&grid, x, v)];
        let w = WeightParams::new(2.0, 2.0, 1.0, 1.0).unwrap();
        let run = solve_linear_varcoef(&Field::zeros(grid), Source::Function(&src), &coef, &VarcoefOptions::new(1.0, steps)).unwrap();
        let u = run.to_trajectory(w).unwrap();
        let lu = kinetic_derivative(&u).unwrap();
        let dv = dv_beta(2.0);
        let times = &u.times()[1..];
        let series = |vals: Vec<f64>| weighted_samples_norm(times, &vals, 2.0, 1.0).unwrap();
        let norms = |tr: &kinspec::Trajectory, d: bool| -> Vec<f64> {
            tr.fields()[1..]
                .iter()
                .map(|f| {
                    let g = if d { apply_multiplier(f, &dv).unwrap() } else { f.clone() };
                    spectral_lq_norm(&g, 2.0).unwrap()
                })
                .collect()
        };
        let f_norm = series(run.times[1..].iter().map(|&t| (1.0 + 0.5 * (2.0 * t).sin()) * h.l2()).collect());
        (series(norms(&u, false)) + series(norms(&lu, false)) + series(norms(&u, true))) / f_norm
    };
    let (coarse, fine) = (ratio(64, 64), ratio(128, 256));
    assert!(coarse.is_finite() && fine.is_finite());
    assert!((fine - coarse).abs() <= 0.1 * coarse, "{coarse} {fine}");
}

fn point_index(grid: &TorusGrid, x: &[f64], v: &[f64]) -> usize {
    grid.nearest_point(0, x[0]) * grid.nv + grid.nearest_point(1, v[0])
}

#[test]
fn hypothesis_checker_verdicts() {
    let grid = TorusGrid::new(1, 128, 128, 2.0 * PI, 6.0 * PI).unwrap();
    let opts = BucOptions::default();
    let pass = [
        CoefficientField::constant(1, 1.0, [0.0; 2], 0.0).unwrap(),
        CoefficientField::compact_perturbation(1, 0.5, 2.0).unwrap(),
        mms_coefficients(),
    ];
    for c in &pass {
        assert!(check_hypotheses(c, &grid, 1.0, &opts).unwrap().passed, "{}", c.name);
    }
    let counter = CoefficientField::clipped_distance(1, grid.lx).unwrap();
    let r = check_hypotheses(&counter, &grid, 1.0, &opts).unwrap();
    assert!(!r.passed);
    assert!(r.modulus[0].1 > 0.4);
}
