use std::f64::consts::PI;

use kinspec::propagator::{homogeneous_trajectory, KolmogorovParams};
use kinspec::spectral::{apply_multiplier, forward, inverse, Field, MultiplierSpec, SpectralField, TorusGrid};
use kinspec::transforms::{
    gamma_shear, gamma_shear_with, kinetic_derivative, lattice_shift, phi_mu, phi_mu_inverse, shear_field,
    twisted_convolution, ShearMode,
};
use kinspec::trajectory::{graded_times, uniform_times, WeightParams};

fn grid() -> TorusGrid {
    TorusGrid::new(1, 32, 64, 2.0 * PI, 8.0 * PI).unwrap()
}

fn data(grid: TorusGrid) -> Field {
    Field::from_fn(grid, |x, v| (x[0] - 0.3).sin() * (-(v[0] - 0.5).powi(2) / 2.0).exp()).unwrap()
}

#[test]
fn spectral_shear_matches_pointwise_shear() {
    let g = grid();
    let f = data(g);
    for t in [0.25, 1.0, -0.75] {
        assert!(lattice_shift(&g, t).is_some());
        let spectral = inverse(&gamma_shear(&forward(&f).unwrap(), t).unwrap()).unwrap();
        let want = Field::from_fn(g, |x, v| (x[0] + t * v[0] - 0.3).sin() * (-(v[0] - 0.5).powi(2) / 2.0).exp()).unwrap();
        assert!(spectral.sub(&want).max_abs() < 1e-12, "t={t}");
        assert!(shear_field(&f, t).sub(&want).max_abs() < 1e-12, "t={t}");
    }
}

#[test]
fn phase_and_relocation_agree_on_the_lattice() {
    let g = grid();
    let s = forward(&data(g)).unwrap();
    let a = gamma_shear_with(&s, 0.5, ShearMode::Phase).unwrap();
    let b = gamma_shear_with(&s, 0.5, ShearMode::Relocate).unwrap();
    assert!(a.sub(&b).l2() < 1e-12 * s.l2());
}

#[test]
fn kinetic_derivative_recovers_the_dissipation() {
    // d_t u + v.grad_x u = Δ_v u along the homogeneous flow
    let g = grid();
    let p = KolmogorovParams::new(2.0, g).unwrap();
    let w = WeightParams::new(2.0, 2.0, 1.0, 1.0).unwrap();
    let u = homogeneous_trajectory(&forward(&data(g)).unwrap(), &uniform_times(0.5, 200), &p, w).unwrap();
    let d = kinetic_derivative(&u).unwrap();
    let j = 100;
    let lap = apply_multiplier(&u.fields()[j], &MultiplierSpec::laplace_v()).unwrap();
    assert!(d.fields()[j].sub(&lap).l2() < 1e-4 * lap.l2());
}

#[test]
fn phi_mu_has_an_inverse() {
    let g = grid();
    let p = KolmogorovParams::new(1.0, g).unwrap();
    let w = WeightParams::new(2.0, 2.0, 0.7, 1.0).unwrap();
    let u = homogeneous_trajectory(&forward(&data(g)).unwrap(), &graded_times(1.0, 8, 2.0), &p, w).unwrap();
    let back = phi_mu_inverse(&phi_mu(&u, &w).unwrap(), &w).unwrap();
    for (a, b) in back.fields().iter().zip(u.fields()) {
        assert!(a.sub(b).l2() < 1e-14 * b.l2().max(1.0));
    }
}

#[test]
fn twisted_convolution_of_lattice_delta_shears() {
    let g = TorusGrid::new(1, 16, 16, 2.0 * PI, 2.0 * PI).unwrap();
    let f = data(g);
    let mut delta = Field::zeros(g);
    delta.values_mut()[8 * 16 + 8] = 1.0 / g.cell_volume();
    // delta on the left gives Gamma(-t) g
    let t = 1.0;
    let out = twisted_convolution(&delta, &f, t).unwrap();
    assert!(out.sub(&shear_field(&f, -t)).max_abs() < 1e-12);
}

#[test]
fn off_lattice_shear_keeps_the_mean() {
    let g = grid();
    let s = forward(&data(g)).unwrap();
    let mean = SpectralField::mode(g, &[0, 0], 1.0.into()).unwrap();
    let mut with_mean = s.clone();
    with_mean.axpy(1.0.into(), &mean);
    let sheared = gamma_shear(&with_mean, 0.37).unwrap();
    assert!((sheared.coeff(&[0, 0]).unwrap() - with_mean.coeff(&[0, 0]).unwrap()).norm() < 1e-15);
}
