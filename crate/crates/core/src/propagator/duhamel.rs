use rustfft::num_complex::Complex64;

use super::damping::line_integral;
use super::KolmogorovParams;
use crate::error::{Error, Result};
use crate::quadrature::{gauss7, integrate_with_breaks};
use crate::spectral::{abs_pow, SpectralField};
use crate::trajectory::Trajectory;
use crate::transforms::gamma_shear;

/// Largest damping increment handled by one Gauss panel.
const PANEL_DAMPING: f64 = 2.0;
const MAX_PANELS: usize = 256;
const NEGLIGIBLE: f64 = 1e-16;
/// Modes this far below the largest coefficient are not re-integrated.
const DEFECT_FLOOR: f64 = 1e-12;

/// One Fourier mode of the sheared Duhamel problem
/// `w' = -|xi - t k|^beta w + F(t)`, `w(times[0]) = 0`.
///
/// Exponential trapezoid: the source is linear on each step and the
/// integrating factor `exp(-int_s^{t_{j+1}} |xi - r k|^beta dr)` is integrated
/// against it by composite Gauss–Legendre.
pub fn duhamel_mode(
    k: &[f64],
    xi: &[f64],
    beta: f64,
    quad_tol: f64,
    times: &[f64],
    source: &[Complex64],
) -> Result<Vec<Complex64>> {
    check_times(times)?;
    if source.len() != times.len() {
        return Err(Error::InvalidTimeGrid(format!(
            "{} source samples for {} times",
            source.len(),
            times.len()
        )));
    }
    let rule = gauss7();
    let damp = |a: f64, b: f64| line_integral(k, xi, beta, -b, -a, quad_tol);
    let mut out = Vec::with_capacity(times.len());
    let mut w = Complex64::default();
    out.push(w);
    for j in 0..times.len() - 1 {
        let (t0, t1) = (times[j], times[j + 1]);
        let dt = t1 - t0;
        let total = damp(t0, t1);
        // |xi - s k|^beta is not smooth where it vanishes
        let mut pieces = vec![t0, t1];
        if let Some(kink) = kink_time(k, xi) {
            if kink > t0 && kink < t1 {
                pieces.insert(1, kink);
            }
        }
        // moments of the weight against 1 - theta and theta
        let (mut m0, mut m1) = (0.0, 0.0);
        for piece in pieces.windows(2) {
            let (lo, hi) = (piece[0], piece[1]);
            let panels = ((damp(lo, hi) / PANEL_DAMPING).ceil() as usize).clamp(1, MAX_PANELS);
            let width = (hi - lo) / panels as f64;
            for panel in 0..panels {
                let a = lo + panel as f64 * width;
                for &(x, wt) in &rule {
                    let s = a + 0.5 * width * (1.0 + x);
                    let weight = 0.5 * width * wt * (-damp(s, t1)).exp();
                    let theta = (s - t0) / dt;
                    m0 += weight * (1.0 - theta);
                    m1 += weight * theta;
                }
            }
        }
        w = w * (-total).exp() + source[j] * m0 + source[j + 1] * m1;
        out.push(w);
    }
    Ok(out)
}

/// Time at which `xi - t k` vanishes, when the segment is one-dimensional in
/// that sense (all components proportional).
fn kink_time(k: &[f64], xi: &[f64]) -> Option<f64> {
    let kk: f64 = k.iter().map(|a| a * a).sum();
    if kk == 0.0 {
        return None;
    }
    let t = k.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() / kk;
    let miss: f64 = k.iter().zip(xi).map(|(a, b)| (b - t * a).powi(2)).sum();
    (miss <= 1e-24 * xi.iter().map(|b| b * b).sum::<f64>().max(1.0)).then_some(t)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::InvalidTimeGrid("need at least two time samples".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid("times must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Solution with zero initial datum at `f.times()[0]`, on the time grid of `f`.
pub fn duhamel_solve(f: &Trajectory, p: &KolmogorovParams) -> Result<Trajectory> {
    let times = f.times();
    check_times(times)?;
    let grid = p.grid;
    f.fields()[0].check_grid(&grid)?;
    let sheared: Vec<SpectralField> = f
        .fields()
        .iter()
        .zip(times)
        .map(|(s, &t)| gamma_shear(s, t))
        .collect::<Result<_>>()?;
    let mut w: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); grid.len()]; times.len()];
    let mut column = vec![Complex64::default(); times.len()];
    let mut failure = None;
    // modes whose source stays below this contribute under one ulp of the result
    let floor = NEGLIGIBLE
        * sheared
            .iter()
            .flat_map(|s| s.coeffs().iter().map(|c| c.norm()))
            .fold(0.0, f64::max);
    grid.for_each_mode(|i, k, xi| {
        if failure.is_some() {
            return;
        }
        for (c, s) in column.iter_mut().zip(&sheared) {
            *c = s.coeffs()[i];
        }
        if column.iter().all(|c| c.norm() <= floor) {
            return;
        }
        match duhamel_mode(k, xi, p.beta, p.quad_tol, times, &column) {
            Ok(vals) => {
                for (row, v) in w.iter_mut().zip(vals) {
                    row[i] = v;
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let fields = w
        .into_iter()
        .zip(times)
        .map(|(c, &t)| gamma_shear(&SpectralField::new(grid, c)?, -t))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), fields, f.weights)
}

/// Equation defect of a Duhamel trajectory against its source, per sample:
/// `Gamma(-t_j)[a_j (w_j - w~_j)]`, where `a = |xi - t k|^beta` and `w~_j` is
/// step `j` recomputed from `w_{j-1}` by adaptive Gauss–Kronrod.
///
/// `d/dt w~ (t_j) = -a_j w~_j + F_j` is the derivative of the step interpolant,
/// so the kinetic derivative `f - (-Δ_v)^{β/2} u + defect` satisfies the
/// equation up to this defect.
pub fn duhamel_defect(u: &Trajectory, f: &Trajectory, p: &KolmogorovParams) -> Result<Trajectory> {
    let times = f.times();
    check_times(times)?;
    if u.times() != times {
        return Err(Error::InvalidTimeGrid("solution and source use different time grids".into()));
    }
    let grid = p.grid;
    let shear = |traj: &Trajectory| -> Result<Vec<SpectralField>> {
        traj.fields()
            .iter()
            .zip(times)
            .map(|(s, &t)| gamma_shear(s, t))
            .collect()
    };
    let (src, sol) = (shear(f)?, shear(u)?);
    let mut defect: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); grid.len()]; times.len()];
    let tol = p.quad_tol.max(1e-12);
    let floor = DEFECT_FLOOR
        * src
            .iter()
            .chain(&sol)
            .flat_map(|s| s.coeffs().iter().map(|c| c.norm()))
            .fold(0.0, f64::max);
    grid.for_each_mode(|i, k, xi| {
        if src.iter().chain(&sol).all(|s| s.coeffs()[i].norm() <= floor) {
            return;
        }
        let damp = |a: f64, b: f64| line_integral(k, xi, p.beta, -b, -a, tol);
        for j in 1..times.len() {
            let (t0, t1) = (times[j - 1], times[j]);
            let dt = t1 - t0;
            // a(s) has a kink where xi = s k (collinear case)
            let kk: f64 = k.iter().map(|z| z * z).sum();
            let breaks = if kk > 0.0 {
                vec![k.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() / kk]
            } else {
                Vec::new()
            };
            let m0 = integrate_with_breaks(|s| (1.0 - (s - t0) / dt) * (-damp(s, t1)).exp(), t0, t1, &breaks, tol);
            let m1 = integrate_with_breaks(|s| (s - t0) / dt * (-damp(s, t1)).exp(), t0, t1, &breaks, tol);
            let reference = sol[j - 1].coeffs()[i] * (-damp(t0, t1)).exp()
                + src[j - 1].coeffs()[i] * m0
                + src[j].coeffs()[i] * m1;
            let rate = abs_pow(sheared_norm(k, xi, t1), p.beta);
            defect[j][i] = (sol[j].coeffs()[i] - reference) * rate;
        }
    });
    let fields = defect
        .into_iter()
        .zip(times)
        .map(|(c, &t)| gamma_shear(&SpectralField::new(grid, c)?, -t))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), fields, f.weights)
}

fn sheared_norm(k: &[f64], xi: &[f64], t: f64) -> f64 {
    k.iter().zip(xi).map(|(a, b)| (b - t * a).powi(2)).sum::<f64>().sqrt()
}
