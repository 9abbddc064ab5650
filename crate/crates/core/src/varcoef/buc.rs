use serde::{Deserialize, Serialize};

use super::coefficient::CoefficientField;
use crate::error::{Error, Result};
use crate::spectral::TorusGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucOptions {
    /// Allowed oscillation at the smallest probe distance, relative to `sup |a|`;
    /// the tolerance curve grows linearly with the distance.
    pub rel_tol: f64,
    /// Largest allowed ratio between the smallest-scale oscillation over the
    /// full velocity window and over its inner quarter.
    pub growth_tol: f64,
    /// Probe distances are `h_min 2^j`, `j < scales`.
    pub scales: usize,
}

impl Default for BucOptions {
    fn default() -> Self {
        Self {
            rel_tol: 0.1,
            growth_tol: 2.0,
            scales: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucReport {
    pub coefficient: String,
    pub lambda_min: f64,
    pub a_max: f64,
    /// `(h, sup |Gamma a(p) - Gamma a(p')|)` over probe pairs at distance `h`, `h` ascending.
    pub modulus: Vec<(f64, f64)>,
    pub tolerance: Vec<f64>,
    pub velocity_growth: f64,
    pub monotone: bool,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Ellipticity constant and a sampled uniform modulus of continuity of
/// `(t, x, v) -> a(t, x + t v, v)` on `[0, T]` times the lattice window.
pub fn check_hypotheses(coef: &CoefficientField, grid: &TorusGrid, horizon: f64, opts: &BucOptions) -> Result<BucReport> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter(format!("horizon T={horizon} must be > 0")));
    }
    if opts.scales == 0 || !(opts.rel_tol > 0.0) || !(opts.growth_tol >= 1.0) {
        return Err(Error::InvalidParameter("invalid hypothesis-check options".into()));
    }
    let n = grid.n;
    let mut lambda_min = f64::INFINITY;
    let mut a_max = 0.0f64;
    for t in [0.0, 0.5 * horizon, horizon] {
        let s = coef.sample(grid, t)?;
        lambda_min = lambda_min.min(s.lambda_min);
        a_max = a_max.max(s.a_max);
    }

    let h_min = grid.hx().min(grid.hv());
    let hs: Vec<f64> = (0..opts.scales).map(|j| h_min * 2f64.powi(j as i32)).collect();
    let h_top = hs[hs.len() - 1];
    let t_base: Vec<f64> = [0.0, 0.5, 1.0].iter().map(|f| f * (horizon - h_top).max(0.0)).collect();
    let per_axis = if n == 1 { 16 } else { 8 };
    let xs = probe_coords(grid, 0, per_axis);
    let vs = probe_coords(grid, n, per_axis);
    let v_max = 0.5 * grid.lv;

    let gamma_a = |t: f64, x: &[f64], v: &[f64]| {
        let xs: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + t * b).collect();
        coef.eval(t, &xs, v)
    };
    let mut modulus = Vec::with_capacity(hs.len());
    let mut inner_osc = 0.0f64;
    let mut x = vec![0.0; n];
    let mut v = vec![0.0; n];
    for (j, &h) in hs.iter().enumerate() {
        let mut osc = 0.0f64;
        for &t in &t_base {
            for xi in 0..xs.len().pow(n as u32) {
                fill(&mut x, &xs, xi);
                for vi in 0..vs.len().pow(n as u32) {
                    fill(&mut v, &vs, vi);
                    let here = gamma_a(t, &x, &v);
                    let inner = v.iter().all(|c| c.abs() <= 0.25 * v_max);
                    for dir in 0..=2 * n {
                        let (mut t2, mut x2, mut v2) = (t, x.clone(), v.clone());
                        match dir {
                            0 => t2 += h,
                            d if d <= n => x2[d - 1] += h,
                            d => v2[d - n - 1] += h,
                        }
                        let d = here.a_distance(&gamma_a(t2, &x2, &v2), n);
                        osc = osc.max(d);
                        if j == 0 && inner {
                            inner_osc = inner_osc.max(d);
                        }
                    }
                }
            }
        }
        modulus.push((h, osc));
    }

    let tolerance: Vec<f64> = hs.iter().map(|h| opts.rel_tol * a_max * h / h_min).collect();
    let monotone = modulus.windows(2).all(|w| w[0].1 <= w[1].1 * (1.0 + 1e-9) + 1e-14 * a_max);
    let finest = modulus[0].1;
    let velocity_growth = if finest <= 1e-14 * a_max {
        1.0
    } else if inner_osc <= 1e-14 * a_max {
        f64::INFINITY
    } else {
        finest / inner_osc
    };
    let mut failures = Vec::new();
    for ((h, osc), tol) in modulus.iter().zip(&tolerance) {
        if osc > tol {
            failures.push(format!("oscillation {osc:.3e} at h={h:.3e} exceeds {tol:.3e}"));
        }
    }
    if velocity_growth > opts.growth_tol {
        failures.push(format!(
            "oscillation at h={h_min:.3e} grows by {velocity_growth:.2} from |v| <= {:.3} to |v| <= {v_max:.3}",
            0.25 * v_max
        ));
    }
    Ok(BucReport {
        coefficient: coef.name.clone(),
        lambda_min,
        a_max,
        modulus,
        tolerance,
        velocity_growth,
        monotone,
        passed: failures.is_empty(),
        failures,
    })
}

/// Evenly strided lattice coordinates along `axis`, plus both extreme points.
fn probe_coords(grid: &TorusGrid, axis: usize, count: usize) -> Vec<f64> {
    let len = grid.axis_len(axis);
    let stride = (len / count).max(1);
    let mut out: Vec<f64> = (0..len).step_by(stride).map(|j| grid.coord(axis, j)).collect();
    let last = grid.coord(axis, len - 1);
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

fn fill(dst: &mut [f64], coords: &[f64], mut flat: usize) {
    for slot in dst.iter_mut().rev() {
        *slot = coords[flat % coords.len()];
        flat /= coords.len();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varcoef::CoefSample;
    use std::f64::consts::PI;

    fn grid() -> TorusGrid {
        TorusGrid::new(1, 128, 128, 2.0 * PI, 6.0 * PI).unwrap()
    }

    #[test]
    fn constant_coefficients_have_zero_modulus() {
        let coef = CoefficientField::constant(1, 1.5, [0.0; 2], 0.0).unwrap();
        let r = check_hypotheses(&coef, &grid(), 1.0, &BucOptions::default()).unwrap();
        assert!(r.passed);
        assert!(r.modulus.iter().all(|&(_, m)| m == 0.0));
        assert_eq!(r.lambda_min, 1.5);
    }

    #[test]
    fn x_only_coefficient_fails_through_large_velocities() {
        let coef = CoefficientField::clipped_distance(1, 2.0 * PI).unwrap();
        let r = check_hypotheses(&coef, &grid(), 1.0, &BucOptions::default()).unwrap();
        assert!(!r.passed, "{r:?}");
        assert!(r.velocity_growth > 2.0);
        assert_eq!(r.lambda_min, 0.5);
    }

    #[test]
    fn compact_perturbation_passes() {
        let coef = CoefficientField::compact_perturbation(1, 0.5, 2.0).unwrap();
        let r = check_hypotheses(&coef, &grid(), 1.0, &BucOptions::default()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.monotone);
    }

    #[test]
    fn indefinite_is_a_hard_error() {
        let coef = CoefficientField::new("bad", 1, false, |_, _, v| CoefSample::scalar(v[0])).unwrap();
        assert!(check_hypotheses(&coef, &grid(), 1.0, &BucOptions::default()).is_err());
    }
}
