use std::f64::consts::PI;

use kinspec::norms::{
    besov_norm, lq_norm, trace_norm_flow, weighted_samples_norm, weighted_time_norm, write_norm_csv, BesovMode,
    BesovSpec, NormRecord, TraceFlowOptions,
};
use kinspec::propagator::{homogeneous_trajectory, KolmogorovParams};
use kinspec::spectral::{forward, Field, TorusGrid};
use kinspec::trajectory::{graded_times, WeightParams};

fn grid() -> TorusGrid {
    TorusGrid::new(1, 64, 64, 2.0 * PI, 8.0 * PI).unwrap()
}

fn bump(grid: TorusGrid) -> Field {
    Field::from_fn(grid, |x, v| (x[0].sin() + 0.3 * (2.0 * x[0]).cos()) * (-v[0] * v[0] / 2.0).exp()).unwrap()
}

#[test]
fn power_law_weighted_norm_is_exact() {
    // h(t) = t^{p - p mu} t^{p r} integrates exactly on the initial piece and
    // the trapezoid error shrinks with the grid
    let (p, mu, r): (f64, f64, f64) = (2.0, 0.75, 0.5);
    let exact = (1.0 / (p - p * mu + p * r + 1.0)).powf(1.0 / p);
    let mut prev = f64::INFINITY;
    for m in [16, 64, 256] {
        let times = graded_times(1.0, m, 2.0);
        let vals: Vec<f64> = times.iter().map(|t| t.powf(r)).collect();
        let err = (weighted_samples_norm(&times, &vals, p, mu).unwrap() - exact).abs();
        assert!(err < prev);
        prev = err;
    }
    assert!(prev < 1e-4);
    assert!(weighted_samples_norm(&[0.0, 1.0], &[1.0, 1.0], p, mu).is_err());
}

#[test]
fn norms_are_homogeneous() {
    let g = grid();
    let f = bump(g);
    let spec = BesovSpec::kinetic(1, 2.0, 0.5, 2.0, 2.0).unwrap();
    for mode in [BesovMode::Dyadic, BesovMode::Continuous] {
        let s = spec.clone().with_mode(mode);
        let a = besov_norm(&f, &s).unwrap();
        let b = besov_norm(&f.scaled(-3.0), &s).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
    }
    for q in [1.0, 2.0, 4.0] {
        assert!((lq_norm(&f.scaled(2.0), q).unwrap() - 2.0 * lq_norm(&f, q).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn trace_norm_dominates_the_lq_norm() {
    let g = grid();
    let f = bump(g);
    let w = WeightParams::new(2.0, 2.0, 1.0, 1.0).unwrap();
    let opts = TraceFlowOptions::default();
    let t = trace_norm_flow(&f, 0.0, 2.0, &w, &opts).unwrap();
    assert!(t > lq_norm(&f, 2.0).unwrap());
    assert!(trace_norm_flow(&f, -1.0, 2.0, &w, &opts).is_err());
}

#[test]
fn weighted_norm_of_decaying_flow_is_finite() {
    let g = grid();
    let p = KolmogorovParams::new(1.0, g).unwrap();
    for mu in [0.6, 1.0] {
        let w = WeightParams::new(2.0, 3.0, mu, 1.0).unwrap();
        let u = homogeneous_trajectory(&forward(&bump(g)).unwrap(), &graded_times(1.0, 32, 2.0), &p, w).unwrap();
        let n = weighted_time_norm(&u).unwrap();
        assert!(n.is_finite() && n > 0.0);
    }
}

#[test]
fn csv_rows_carry_a_header() {
    let mut buf = Vec::new();
    let rows = [NormRecord {
        run_id: "a".into(),
        norm: "besov".into(),
        parameters: "q=2;p=2".into(),
        value: 1.5,
    }];
    write_norm_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("run_id,norm,parameters,value"));
    assert_eq!(text.lines().count(), 2);
}
