use rustfft::num_complex::Complex64;

use super::shear::{apply_shear_phase, from_mixed, to_mixed};
use crate::error::{Error, Result};
use crate::spectral::TorusGrid;
use crate::trajectory::{Trajectory, WeightParams};

/// Physical L2 norm of a mixed-representation buffer.
pub(crate) fn mixed_l2(buf: &[Complex64], grid: &TorusGrid) -> f64 {
    let w = grid.lx.powi(grid.n as i32) * grid.hv().powi(grid.n as i32);
    (buf.iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt()
}

/// `v . grad_x` applied in the mixed representation: multiply by `i k.v`.
pub(crate) fn transport_mixed(buf: &[Complex64], grid: &TorusGrid) -> Vec<Complex64> {
    let mut out = buf.to_vec();
    grid.for_each_mixed(|i, k, v| {
        let kv: f64 = k.iter().zip(v).map(|(a, b)| a * b).sum();
        out[i] *= Complex64::new(0.0, kv);
    });
    out
}

/// Three-point weights for the first derivative at `times[j]`, second order
/// on nonuniform grids (one-sided at the ends).
pub(crate) fn fd_weights(times: &[f64], j: usize) -> [(usize, f64); 3] {
    let m = times.len();
    if j == 0 {
        let (h1, h2) = (times[1] - times[0], times[2] - times[1]);
        [
            (0, -(2.0 * h1 + h2) / (h1 * (h1 + h2))),
            (1, (h1 + h2) / (h1 * h2)),
            (2, -h1 / (h2 * (h1 + h2))),
        ]
    } else if j == m - 1 {
        let (h1, h2) = (times[m - 2] - times[m - 3], times[m - 1] - times[m - 2]);
        [
            (m - 3, h2 / (h1 * (h1 + h2))),
            (m - 2, -(h1 + h2) / (h1 * h2)),
            (m - 1, (2.0 * h2 + h1) / (h2 * (h1 + h2))),
        ]
    } else {
        let (h1, h2) = (times[j] - times[j - 1], times[j + 1] - times[j]);
        [
            (j - 1, -h2 / (h1 * (h1 + h2))),
            (j, (h2 - h1) / (h1 * h2)),
            (j + 1, h1 / (h2 * (h1 + h2))),
        ]
    }
}

/// `d/dt Gamma(t) u - Gamma(t)(d_t u + v.grad_x u)` measured by central
/// differences on a uniform grid; returns the max L2 norm over interior times.
pub fn commutation_residual(u: &Trajectory) -> Result<f64> {
    let times = u.times();
    if times.len() < 3 {
        return Err(Error::InvalidTimeGrid(format!(
            "commutation residual needs >= 3 samples, got {}",
            times.len()
        )));
    }
    let dt = times[1] - times[0];
    if times
        .windows(2)
        .any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-300))
    {
        return Err(Error::InvalidTimeGrid("commutation residual needs a uniform grid".into()));
    }
    let grid = *u.grid();
    let mixed: Vec<Vec<Complex64>> = u.fields().iter().map(to_mixed).collect();
    let sheared: Vec<Vec<Complex64>> = mixed
        .iter()
        .zip(times)
        .map(|(b, &t)| {
            let mut b = b.clone();
            apply_shear_phase(&mut b, &grid, t);
            b
        })
        .collect();
    let mut worst: f64 = 0.0;
    for j in 1..times.len() - 1 {
        let transport = transport_mixed(&mixed[j], &grid);
        let mut rhs: Vec<Complex64> = (0..transport.len())
            .map(|i| (mixed[j + 1][i] - mixed[j - 1][i]) / (2.0 * dt) + transport[i])
            .collect();
        apply_shear_phase(&mut rhs, &grid, times[j]);
        let res: Vec<Complex64> = (0..rhs.len())
            .map(|i| (sheared[j + 1][i] - sheared[j - 1][i]) / (2.0 * dt) - rhs[i])
            .collect();
        worst = worst.max(mixed_l2(&res, &grid));
    }
    Ok(worst)
}

/// `d_t u + v.grad_x u = Gamma(-t) d/dt Gamma(t) u`, differentiated with
/// second-order three-point stencils on the trajectory's own time grid.
pub fn kinetic_derivative(u: &Trajectory) -> Result<Trajectory> {
    let times = u.times();
    if times.len() < 3 {
        return Err(Error::InvalidTimeGrid(format!(
            "kinetic derivative needs >= 3 samples, got {}",
            times.len()
        )));
    }
    let grid = *u.grid();
    let sheared: Vec<Vec<Complex64>> = u
        .fields()
        .iter()
        .zip(times)
        .map(|(f, &t)| {
            let mut b = to_mixed(f);
            apply_shear_phase(&mut b, &grid, t);
            b
        })
        .collect();
    let mut out = Vec::with_capacity(times.len());
    for j in 0..times.len() {
        let mut d = vec![Complex64::default(); grid.len()];
        for (idx, w) in fd_weights(times, j) {
            for (acc, z) in d.iter_mut().zip(&sheared[idx]) {
                *acc += z * w;
            }
        }
        apply_shear_phase(&mut d, &grid, -times[j]);
        out.push(from_mixed(d, grid));
    }
    Trajectory::new(times.to_vec(), out, u.weights)
}

/// `[Phi_mu u](t) = t^{1-mu} u(t)`.
pub fn phi_mu(u: &Trajectory, w: &WeightParams) -> Result<Trajectory> {
    scale_by_power(u, 1.0 - w.mu).map(|t| t.with_weights(w.unweighted()))
}

/// `[Phi_mu^{-1} u](t) = t^{mu-1} u(t)`.
pub fn phi_mu_inverse(u: &Trajectory, w: &WeightParams) -> Result<Trajectory> {
    scale_by_power(u, w.mu - 1.0).map(|t| t.with_weights(*w))
}

fn scale_by_power(u: &Trajectory, exponent: f64) -> Result<Trajectory> {
    if exponent != 0.0 && u.times().iter().any(|&t| t <= 0.0) {
        return Err(Error::InvalidTimeGrid(
            "weight t^(1-mu) is defined on the open interval; drop the t = 0 sample".into(),
        ));
    }
    u.map(|t, f| Ok(if exponent == 0.0 { f.clone() } else { f.scaled(t.powf(exponent)) }))
}
