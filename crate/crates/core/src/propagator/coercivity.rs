use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::damping::line_integral;
use crate::error::{Error, Result};
use crate::spectral::{abs_pow, norm, TorusGrid};

/// Numerically calibrated constant `c` with
/// `c (|xi|^beta + |k|^beta) <= int_0^1 |xi + r k|^beta dr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoercivityCalibration {
    pub beta: f64,
    pub n: usize,
    pub c: f64,
    /// Minimizing direction: `|k| = cos a`, `|xi| = sin a`, angle `phi` between k and xi.
    pub a: f64,
    pub phi: f64,
}

const SAFETY: f64 = 1.0 - 1e-6;
const TOL: f64 = 1e-12;

fn ratio(beta: f64, a: f64, phi: f64) -> f64 {
    let (kn, xn) = (a.cos(), a.sin());
    let k = [kn, 0.0];
    let xi = [xn * phi.cos(), xn * phi.sin()];
    line_integral(&k, &xi, beta, 0.0, 1.0, TOL) / (abs_pow(kn, beta) + abs_pow(xn, beta))
}

fn golden<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimizes the ratio over the unit sphere of `(k, xi)` (coarse scan, then
/// golden-section refinement) and shrinks the minimum by a relative `1e-6`.
pub fn coercivity_constant(beta: f64, n: usize) -> Result<CoercivityCalibration> {
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::InvalidParameter(format!("beta={beta} must lie in (0, 2]")));
    }
    if !(n == 1 || n == 2) {
        return Err(Error::InvalidParameter(format!("n={n} must be 1 or 2")));
    }
    let phis: Vec<f64> = if n == 1 {
        vec![0.0, PI]
    } else {
        (0..=90).map(|j| PI * j as f64 / 90.0).collect()
    };
    let steps = 400;
    let da = 0.5 * PI / steps as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &phi in &phis {
        for i in 0..=steps {
            let a = i as f64 * da;
            let r = ratio(beta, a, phi);
            if r < best.0 {
                best = (r, a, phi);
            }
        }
    }
    let (mut val, mut a, mut phi) = best;
    for _ in 0..6 {
        let (a1, v1) = golden(|x| ratio(beta, x, phi), (a - da).max(0.0), (a + da).min(0.5 * PI));
        a = a1;
        val = val.min(v1);
        if n == 2 {
            let dphi = PI / 90.0;
            let (p1, v2) = golden(|x| ratio(beta, a, x), (phi - dphi).max(0.0), (phi + dphi).min(PI));
            if v2 < val {
                phi = p1;
                val = v2;
            }
        }
    }
    Ok(CoercivityCalibration {
        beta,
        n,
        c: val * SAFETY,
        a,
        phi,
    })
}

/// Smallest value of `int_0^1 |xi + r k|^beta dr - c (|xi|^beta + |k|^beta)`
/// over every lattice mode of `grid` (nonnegative when the bound holds).
pub fn coercivity_margin(grid: &TorusGrid, beta: f64, c: f64) -> f64 {
    let mut worst = f64::INFINITY;
    grid.for_each_mode(|_, k, xi| {
        let lhs = c * (abs_pow(norm(xi), beta) + abs_pow(norm(k), beta));
        let rhs = line_integral(k, xi, beta, 0.0, 1.0, TOL);
        worst = worst.min(rhs - lhs);
    });
    worst
}
