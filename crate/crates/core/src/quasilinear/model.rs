use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{apply_multiplier, forward, inverse_with_residue, Field, MultiplierSpec};
use crate::varcoef::{CoefSample, CoefficientField};

/// `P(z) / Q(z)` with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rational {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

impl Rational {
    pub fn constant(c: f64) -> Self {
        Self {
            numerator: vec![c],
            denominator: vec![1.0],
        }
    }

    /// Value and first two derivatives at `z`.
    pub fn eval(&self, z: f64) -> (f64, f64, f64) {
        let (p, p1, p2) = poly(&self.numerator, z);
        let (q, q1, q2) = poly(&self.denominator, z);
        let f = p / q;
        let f1 = (p1 - f * q1) / q;
        let f2 = (p2 - 2.0 * f1 * q1 - f * q2) / q;
        (f, f1, f2)
    }
}

fn poly(c: &[f64], z: f64) -> (f64, f64, f64) {
    let (mut p, mut p1, mut p2) = (0.0, 0.0, 0.0);
    for &a in c.iter().rev() {
        p2 = p2 * z + 2.0 * p1;
        p1 = p1 * z + p;
        p = p * z + a;
    }
    (p, p1, p2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiffusivityKind {
    /// `value Id`.
    Constant { value: f64 },
    /// `(1 + eta z^2 / (1 + z^2)) Id`.
    Saturating { eta: f64 },
    /// `diag(1 + eta_i z^2 / (1 + z^2))`.
    AnisotropicSaturating { etas: Vec<f64> },
    /// Matrix of rational functions, row-major `n x n`.
    Rational { entries: Vec<Rational> },
}

type Mat = [[f64; 2]; 2];

/// `kappa: R -> Sym(n)` certified on the window `[-window, window]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusivityModel {
    pub kind: DiffusivityKind,
    pub n: usize,
    pub window: f64,
    /// Smallest eigenvalue of `kappa` over the sampled window.
    pub lambda: f64,
    /// Largest spectral norm of `kappa`, `kappa'`, `kappa''` over the window.
    pub bound: f64,
}

/// Sample count used to certify a model on its window.
const WINDOW_SAMPLES: usize = 4001;

impl DiffusivityModel {
    pub fn new(kind: DiffusivityKind, n: usize, window: f64) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidParameter(format!("dimension n={n} must be 1 or 2")));
        }
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::InvalidParameter(format!("window Z={window} must be positive")));
        }
        match &kind {
            DiffusivityKind::AnisotropicSaturating { etas } if etas.len() != n => {
                return Err(Error::InvalidParameter(format!("expected {n} etas, got {}", etas.len())));
            }
            DiffusivityKind::Rational { entries } => {
                if entries.len() != n * n {
                    return Err(Error::Expression(format!("expected {} entries, got {}", n * n, entries.len())));
                }
                if n == 2 && entries[1] != entries[2] {
                    return Err(Error::Expression("off-diagonal entries must coincide".into()));
                }
                if entries.iter().any(|e| e.numerator.is_empty() || e.denominator.is_empty()) {
                    return Err(Error::Expression("empty coefficient list".into()));
                }
            }
            _ => {}
        }
        let mut model = Self {
            kind,
            n,
            window,
            lambda: 0.0,
            bound: 0.0,
        };
        let (mut lambda, mut bound) = (f64::INFINITY, 0.0f64);
        for i in 0..WINDOW_SAMPLES {
            let z = -window + 2.0 * window * i as f64 / (WINDOW_SAMPLES - 1) as f64;
            let (k0, k1, k2) = model.eval(z);
            let ok = [k0, k1, k2].iter().flatten().flatten().all(|x| x.is_finite());
            if !ok {
                return Err(Error::Expression(format!("kappa is not finite at z={z}")));
            }
            let (lo, _) = sample(k0).eigenvalues(n);
            lambda = lambda.min(lo);
            bound = bound.max(spectral_norm(k0, n)).max(spectral_norm(k1, n)).max(spectral_norm(k2, n));
        }
        if !(lambda > 0.0) {
            return Err(Error::Ellipticity(format!("kappa has smallest eigenvalue {lambda:e} on the window")));
        }
        model.lambda = lambda;
        model.bound = bound;
        Ok(model)
    }

    pub fn constant(n: usize, value: f64, window: f64) -> Result<Self> {
        Self::new(DiffusivityKind::Constant { value }, n, window)
    }

    pub fn saturating(n: usize, eta: f64, window: f64) -> Result<Self> {
        Self::new(DiffusivityKind::Saturating { eta }, n, window)
    }

    /// `(kappa, kappa', kappa'')` at `z`.
    pub fn eval(&self, z: f64) -> (Mat, Mat, Mat) {
        let mut out = [[[0.0; 2]; 2]; 3];
        let sat = |eta: f64| {
            let s = 1.0 + z * z;
            (1.0 + eta * z * z / s, eta * 2.0 * z / (s * s), eta * (2.0 - 6.0 * z * z) / (s * s * s))
        };
        let mut set = |i: usize, j: usize, (a, b, c): (f64, f64, f64)| {
            out[0][i][j] = a;
            out[1][i][j] = b;
            out[2][i][j] = c;
        };
        match &self.kind {
            DiffusivityKind::Constant { value } => (0..self.n).for_each(|i| set(i, i, (*value, 0.0, 0.0))),
            DiffusivityKind::Saturating { eta } => (0..self.n).for_each(|i| set(i, i, sat(*eta))),
            DiffusivityKind::AnisotropicSaturating { etas } => (0..self.n).for_each(|i| set(i, i, sat(etas[i]))),
            DiffusivityKind::Rational { entries } => {
                for i in 0..self.n {
                    for j in 0..self.n {
                        set(i, j, entries[i * self.n + j].eval(z));
                    }
                }
            }
        }
        (out[0], out[1], out[2])
    }

    pub fn kappa(&self, z: f64) -> Mat {
        self.eval(z).0
    }

    pub fn kappa_prime(&self, z: f64) -> Mat {
        self.eval(z).1
    }

    pub fn kappa_second(&self, z: f64) -> Mat {
        self.eval(z).2
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, DiffusivityKind::Constant { .. })
    }

    /// Errors unless every value of `u` lies in the window.
    pub fn check_range(&self, u: &Field, time: f64) -> Result<()> {
        let worst = u.values().iter().fold(0.0f64, |m, z| m.max(z.abs()));
        if worst > self.window || !worst.is_finite() {
            return Err(Error::RangeExceeded {
                value: worst,
                window: self.window,
                time,
            });
        }
        Ok(())
    }

    /// `kappa(u)` at every lattice point.
    pub fn samples(&self, u: &Field) -> Vec<CoefSample> {
        u.values().iter().map(|&z| sample(self.kappa(z))).collect()
    }
}

fn sample(a: Mat) -> CoefSample {
    CoefSample { a, b: [0.0; 2], c: 0.0 }
}

fn spectral_norm(a: Mat, n: usize) -> f64 {
    let (lo, hi) = sample(a).eigenvalues(n);
    lo.abs().max(hi.abs())
}

/// `A(u)`: the coefficient field `kappa(u(x, v))`, time independent.
#[allow(non_snake_case)]
pub fn A_of(u: &Field, model: &DiffusivityModel) -> Result<CoefficientField> {
    check_dims(u, model)?;
    model.check_range(u, 0.0)?;
    let n = model.n;
    let samples = model.samples(u);
    let entries = (0..n * n)
        .map(|e| Field::new(*u.grid(), samples.iter().map(|s| s.a[e / n][e % n]).collect()))
        .collect::<Result<Vec<_>>>()?;
    CoefficientField::from_snapshots("kappa(u)", entries, None, None)
}

/// `F(u) = <kappa'(u) grad_v u, grad_v u>` with the spectral velocity gradient.
#[allow(non_snake_case)]
pub fn F_of(u: &Field, model: &DiffusivityModel) -> Result<Field> {
    check_dims(u, model)?;
    model.check_range(u, 0.0)?;
    let n = model.n;
    let grid = *u.grid();
    if model.is_constant() {
        return Ok(Field::zeros(grid));
    }
    let uh = forward(u)?;
    let grads = (0..n)
        .map(|i| Ok(inverse_with_residue(&apply_multiplier(&uh, &MultiplierSpec::dv(i))?).0))
        .collect::<Result<Vec<_>>>()?;
    let values = u
        .values()
        .iter()
        .enumerate()
        .map(|(p, &z)| {
            let kp = model.kappa_prime(z);
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += kp[i][j] * grads[i].values()[p] * grads[j].values()[p];
                }
            }
            s
        })
        .collect();
    Field::new(grid, values)
}

fn check_dims(u: &Field, model: &DiffusivityModel) -> Result<()> {
    if u.grid().n != model.n {
        return Err(Error::GridMismatch(format!("model has n={}, field has n={}", model.n, u.grid().n)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use std::f64::consts::PI;

    #[test]
    fn rational_derivatives_match_finite_differences() {
        let r = Rational {
            numerator: vec![1.0, 1.0, 1.0],
            denominator: vec![1.0, 0.0, 1.0],
        };
        let (h, z) = (1e-4, 0.37);
        let (f, f1, f2) = r.eval(z);
        let (fp, _, _) = r.eval(z + h);
        let (fm, _, _) = r.eval(z - h);
        assert!((f - (1.0 + z / (1.0 + z * z))).abs() < 1e-15);
        assert!((f1 - (fp - fm) / (2.0 * h)).abs() < 1e-7);
        assert!((f2 - (fp - 2.0 * f + fm) / (h * h)).abs() < 1e-5);
    }

    #[test]
    fn saturating_model_bounds() {
        let m = DiffusivityModel::saturating(1, 0.5, 4.0).unwrap();
        assert!((m.lambda - 1.0).abs() < 1e-15);
        let grid = TorusGrid::new(1, 16, 32, 2.0 * PI, 6.0 * PI).unwrap();
        let u = Field::from_fn(grid, |x, v| 3.0 * x[0].cos() * (-v[0] * v[0]).exp()).unwrap();
        let s = A_of(&u, &m).unwrap().sample(&grid, 0.0).unwrap();
        assert!(s.lambda_min >= m.lambda - 1e-12 && s.a_max <= 1.5);
        assert_eq!(A_of(&Field::zeros(grid), &m).unwrap().sample(&grid, 0.0).unwrap().a_max, 1.0);
    }

    #[test]
    fn range_and_ellipticity_errors() {
        let grid = TorusGrid::new(1, 8, 8, 2.0 * PI, 2.0 * PI).unwrap();
        let m = DiffusivityModel::saturating(1, 1.0, 1.0).unwrap();
        assert!(matches!(A_of(&Field::constant(grid, 2.0), &m), Err(Error::RangeExceeded { .. })));
        let bad = DiffusivityKind::Rational {
            entries: vec![Rational { numerator: vec![0.0, 1.0], denominator: vec![1.0] }],
        };
        assert!(matches!(DiffusivityModel::new(bad, 1, 1.0), Err(Error::Ellipticity(_))));
    }

    #[test]
    fn f_vanishes_for_constant_data_and_constant_kappa() {
        let grid = TorusGrid::new(1, 16, 32, 2.0 * PI, 6.0 * PI).unwrap();
        let m = DiffusivityModel::saturating(1, 1.0, 4.0).unwrap();
        assert!(F_of(&Field::constant(grid, 0.7), &m).unwrap().max_abs() < 1e-14);
        let u = Field::from_fn(grid, |x, v| x[0].sin() * (-v[0] * v[0]).exp()).unwrap();
        let c = DiffusivityModel::constant(1, 2.0, 4.0).unwrap();
        assert_eq!(F_of(&u, &c).unwrap().max_abs(), 0.0);
    }
}
