use std::f64::consts::PI;

use kinspec::spectral::snapshot::{read_snapshot, write_field, write_spectral, Snapshot};
use kinspec::spectral::{apply_multiplier, forward, inverse, Field, MultiplierSpec, TorusGrid};
use rustfft::num_complex::Complex64;

fn packet(grid: TorusGrid) -> Field {
    Field::from_fn(grid, |x, v| {
        let xs: f64 = x.iter().map(|a| a.cos()).sum();
        let vv: f64 = v.iter().map(|a| a * a).sum();
        (1.0 + 0.5 * xs) * (-vv / 2.0).exp()
    })
    .unwrap()
}

#[test]
fn round_trip_in_one_and_two_dimensions() {
    for grid in [
        TorusGrid::new(1, 32, 64, 2.0 * PI, 16.0).unwrap(),
        TorusGrid::new(2, 8, 16, 2.0 * PI, 12.0).unwrap(),
    ] {
        let f = packet(grid);
        let back = inverse(&forward(&f).unwrap()).unwrap();
        assert!(back.sub(&f).max_abs() < 1e-13);
        // Parseval
        assert!((forward(&f).unwrap().l2() - f.l2()).abs() < 1e-12 * f.l2());
    }
}

#[test]
fn velocity_laplacian_of_gaussian() {
    let grid = TorusGrid::new(1, 16, 128, 2.0 * PI, 24.0).unwrap();
    let f = Field::from_fn(grid, |_, v| (-v[0] * v[0] / 2.0).exp()).unwrap();
    let lap = inverse(&apply_multiplier(&forward(&f).unwrap(), &MultiplierSpec::laplace_v()).unwrap()).unwrap();
    let want = Field::from_fn(grid, |_, v| (v[0] * v[0] - 1.0) * (-v[0] * v[0] / 2.0).exp()).unwrap();
    assert!(lap.sub(&want).max_abs() < 1e-10);
}

#[test]
fn x_derivative_of_cosine() {
    let grid = TorusGrid::new(1, 32, 8, 2.0 * PI, 8.0).unwrap();
    let f = Field::from_fn(grid, |x, _| (3.0 * x[0]).cos()).unwrap();
    let d = inverse(&apply_multiplier(&forward(&f).unwrap(), &MultiplierSpec::dx(0)).unwrap()).unwrap();
    let want = Field::from_fn(grid, |x, _| -3.0 * (3.0 * x[0]).sin()).unwrap();
    assert!(d.sub(&want).max_abs() < 1e-12);
}

#[test]
fn snapshots_round_trip_through_disk() {
    let dir = std::env::temp_dir().join(format!("kinspec-snap-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let grid = TorusGrid::new(2, 4, 8, 3.0, 5.0).unwrap();
    let f = packet(grid);
    write_field(&dir.join("phys"), &f).unwrap();
    let s = forward(&f).unwrap();
    write_spectral(&dir.join("spec"), &s).unwrap();
    match read_snapshot(&dir.join("phys")).unwrap() {
        Snapshot::Physical(g) => assert_eq!(g, f),
        other => panic!("wrong kind {other:?}"),
    }
    match read_snapshot(&dir.join("spec")).unwrap() {
        Snapshot::Spectral(g) => assert_eq!(g, s),
        other => panic!("wrong kind {other:?}"),
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn mode_lookup_matches_storage() {
    let grid = TorusGrid::new(1, 8, 8, 2.0 * PI, 2.0 * PI).unwrap();
    let f = Field::from_fn(grid, |x, v| (2.0 * x[0] - v[0]).cos()).unwrap();
    let s = forward(&f).unwrap();
    let c = s.coeff(&[2, -1]).unwrap();
    assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-14);
    assert!(s.coeff(&[5, 0]).is_none());
}
