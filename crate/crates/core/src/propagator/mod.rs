//! Fourier-space propagators for `d_t u + v.grad_x u = -(-Δ_v)^{β/2} u + f`.

mod coercivity;
mod damping;
mod duhamel;
mod kernel;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{abs_pow, norm, SpectralField, TorusGrid};
use crate::trajectory::{Trajectory, WeightParams};
use crate::transforms::gamma_shear;

pub use coercivity::{coercivity_constant, coercivity_margin, CoercivityCalibration};
pub use damping::{damping_integral, e_beta, sheared_damping};
pub(crate) use damping::line_integral;
pub use duhamel::{duhamel_defect, duhamel_mode, duhamel_solve};
pub use kernel::{kernel_convolve_g2, kernel_g2, kernel_g2_transform, semigroup_decay_constant};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovParams {
    pub beta: f64,
    pub grid: TorusGrid,
    pub quad_tol: f64,
}

impl KolmogorovParams {
    pub fn new(beta: f64, grid: TorusGrid) -> Result<Self> {
        Self::with_tolerance(beta, grid, DEFAULT_QUAD_TOL)
    }

    pub fn with_tolerance(beta: f64, grid: TorusGrid, quad_tol: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::InvalidParameter(format!("beta={beta} must lie in (0, 2]")));
        }
        if !(quad_tol > 0.0 && quad_tol <= 1e-6) {
            return Err(Error::InvalidParameter(format!(
                "quad_tol={quad_tol} must lie in (0, 1e-6]"
            )));
        }
        Ok(Self { beta, grid, quad_tol })
    }
}

/// `u^(t, k, xi) = g^(k, xi + t k) e_beta(t, k, xi)`: the data is moved by
/// `Gamma(-t)` first, so only `g` is interpolated when `t` is off the lattice
/// and `e_beta` is sampled exactly.
pub fn homogeneous_solve(g: &SpectralField, t: f64, p: &KolmogorovParams) -> Result<SpectralField> {
    g.check_grid(&p.grid)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time t={t} must be >= 0")));
    }
    if t == 0.0 {
        return Ok(g.clone());
    }
    let mut w = gamma_shear(g, -t)?;
    let coeffs = w.coeffs_mut();
    p.grid.for_each_mode(|i, k, xi| {
        coeffs[i] *= (-line_integral(k, xi, p.beta, 0.0, t, p.quad_tol)).exp();
    });
    Ok(w)
}

/// Homogeneous flow sampled at `times`.
pub fn homogeneous_trajectory(
    g: &SpectralField,
    times: &[f64],
    p: &KolmogorovParams,
    weights: WeightParams,
) -> Result<Trajectory> {
    let fields = times
        .iter()
        .map(|&t| homogeneous_solve(g, t, p))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), fields, weights)
}

/// Full solution `u = T(t) g + duhamel(f)` on the time grid of `f`.
pub fn solve(g: &SpectralField, f: &Trajectory, p: &KolmogorovParams) -> Result<Trajectory> {
    let forced = duhamel_solve(f, p)?;
    forced.map(|t, u| {
        let mut out = homogeneous_solve(g, t, p)?;
        out.axpy(Complex64::new(1.0, 0.0), u);
        Ok(out)
    })
}

/// `eta_beta(t, k, xi) = exp(-c|xi|^beta t - c|k|^beta t^{beta+1})`.
pub fn eta_symbol(t: f64, k: &[f64], xi: &[f64], c: f64, beta: f64) -> f64 {
    (-c * abs_pow(norm(xi), beta) * t - c * abs_pow(norm(k), beta) * t.powf(beta + 1.0)).exp()
}

/// Multiplication by the model symbol `eta_beta`.
pub fn model_propagator_eta(g: &SpectralField, t: f64, c: f64, beta: f64) -> Result<SpectralField> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c={c} must be positive")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time t={t} must be >= 0")));
    }
    let mut out = g.clone();
    let grid = *g.grid();
    let coeffs = out.coeffs_mut();
    grid.for_each_mode(|i, k, xi| coeffs[i] *= eta_symbol(t, k, xi, c, beta));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward, inverse_with_residue, Field};
    use std::f64::consts::PI;

    fn params(beta: f64) -> KolmogorovParams {
        let grid = TorusGrid::new(1, 16, 32, 2.0 * PI, 4.0 * PI).unwrap();
        KolmogorovParams::new(beta, grid).unwrap()
    }

    #[test]
    fn pure_velocity_mode_decays_like_heat() {
        let p = params(1.3);
        let g = SpectralField::mode(p.grid, &[0, 3], Complex64::new(1.0, 0.0)).unwrap();
        let u = homogeneous_solve(&g, 0.4, &p).unwrap();
        let xi0: f64 = 1.5;
        let c = u.coeff(&[0, 3]).unwrap();
        assert!((c.re - (-0.4 * xi0.powf(1.3)).exp()).abs() < 1e-14);
        assert!(c.im.abs() < 1e-15);
    }

    #[test]
    fn single_mode_lands_on_sheared_index() {
        // dk = 1, dxi = 1/2: t = 1 moves xi by -2 indices per unit k
        let p = params(0.9);
        let g = SpectralField::mode(p.grid, &[1, 4], Complex64::new(1.0, 0.0)).unwrap();
        let u = homogeneous_solve(&g, 1.0, &p).unwrap();
        let c = u.coeff(&[1, 2]).unwrap();
        let expect = e_beta(1.0, &[1.0], &[1.0], 0.9, 1e-12).unwrap();
        assert!((c.re - expect).abs() < 1e-13, "{c} vs {expect}");
        assert!((u.l2() - c.norm() * p.grid.volume().sqrt()).abs() < 1e-13);
    }

    #[test]
    fn mean_is_conserved_exactly() {
        let p = params(1.0);
        let f = Field::from_fn(p.grid, |x, v| 1.0 + (x[0]).cos() * (-v[0] * v[0]).exp()).unwrap();
        let g = forward(&f).unwrap();
        let u = homogeneous_solve(&g, 0.7, &p).unwrap();
        assert_eq!(u.coeff(&[0, 0]), g.coeff(&[0, 0]));
        assert!((inverse_with_residue(&u).0.mean() - f.mean()).abs() < 1e-14);
    }

    fn gaussian_packet(grid: TorusGrid) -> SpectralField {
        let f = Field::from_fn(grid, |x, v| (x[0]).sin() * (-(v[0] - 0.5).powi(2)).exp()).unwrap();
        forward(&f).unwrap()
    }

    #[test]
    fn off_lattice_time_matches_closed_form() {
        let grid = TorusGrid::new(1, 16, 128, 2.0 * PI, 4.0 * PI).unwrap();
        let g = gaussian_packet(grid);
        let lv = 4.0 * PI;
        // k = 1 coefficient of sin(x) exp(-(v - 1/2)^2)
        let ghat = |xi: f64| {
            Complex64::new(0.0, -0.5) * PI.sqrt() * (-xi * xi / 4.0).exp() * Complex64::cis(-0.5 * xi) / lv
        };
        for beta in [0.7, 1.5, 2.0] {
            let p = KolmogorovParams::new(beta, grid).unwrap();
            for t in [0.3, 0.8] {
                let u = homogeneous_solve(&g, t, &p).unwrap();
                grid.for_each_mode(|i, k, xi| {
                    if k[0] == 1.0 {
                        let exact = ghat(xi[0] + t) * e_beta(t, k, xi, beta, 1e-12).unwrap();
                        assert!((u.coeffs()[i] - exact).norm() < 1e-13, "beta={beta} t={t}");
                    }
                });
            }
        }
    }

    #[test]
    fn cocycle_in_time() {
        let grid = TorusGrid::new(1, 16, 128, 2.0 * PI, 4.0 * PI).unwrap();
        let g = gaussian_packet(grid);
        // second step t = 1/2 shifts xi by whole lattice cells
        for beta in [0.7, 1.5, 2.0] {
            let p = KolmogorovParams::new(beta, grid).unwrap();
            let two = homogeneous_solve(&homogeneous_solve(&g, 0.3, &p).unwrap(), 0.5, &p).unwrap();
            let one = homogeneous_solve(&g, 0.8, &p).unwrap();
            assert!(two.sub(&one).l2() < 1e-12 * one.l2(), "beta={beta}");
        }
    }

    #[test]
    fn eta_is_identity_at_zero_and_rejects_bad_c() {
        let p = params(1.0);
        let g = SpectralField::mode(p.grid, &[2, 1], Complex64::new(0.5, 0.5)).unwrap();
        assert_eq!(model_propagator_eta(&g, 0.0, 0.3, 1.0).unwrap(), g);
        assert!(model_propagator_eta(&g, 1.0, 0.0, 1.0).is_err());
        let u = model_propagator_eta(&g, 0.5, 0.3, 1.0).unwrap();
        let expect = (-0.3f64 * 2.0 * 0.25).exp() * (-0.3f64 * 0.5 * 0.5).exp();
        assert!((u.coeff(&[2, 1]).unwrap() - g.coeff(&[2, 1]).unwrap() * expect).norm() < 1e-15);
    }

    #[test]
    fn params_validate() {
        let grid = TorusGrid::desk();
        assert!(KolmogorovParams::new(0.0, grid).is_err());
        assert!(KolmogorovParams::new(2.5, grid).is_err());
        assert!(KolmogorovParams::with_tolerance(1.0, grid, 1e-3).is_err());
    }
}
