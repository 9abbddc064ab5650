use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{Field, TorusGrid};

/// Largest tolerated `|a_ij - a_ji|`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Coefficients `(a, b, c)` at one phase-space point; only the leading
/// `n x n` block of `a` and the first `n` entries of `b` are used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefSample {
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
    pub c: f64,
}

impl CoefSample {
    pub fn scalar(a: f64) -> Self {
        Self {
            a: [[a, 0.0], [0.0, a]],
            b: [0.0; 2],
            c: 0.0,
        }
    }

    pub fn asymmetry(&self, n: usize) -> f64 {
        if n == 2 {
            (self.a[0][1] - self.a[1][0]).abs()
        } else {
            0.0
        }
    }

    /// Eigenvalues of the symmetric part of the leading block, ascending.
    pub fn eigenvalues(&self, n: usize) -> (f64, f64) {
        if n == 1 {
            return (self.a[0][0], self.a[0][0]);
        }
        let (p, r) = (self.a[0][0], self.a[1][1]);
        let q = 0.5 * (self.a[0][1] + self.a[1][0]);
        let mid = 0.5 * (p + r);
        let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        (mid - rad, mid + rad)
    }

    /// Spectral norm of the difference of the `a` blocks.
    pub fn a_distance(&self, other: &CoefSample, n: usize) -> f64 {
        let mut d = *self;
        for i in 0..2 {
            for j in 0..2 {
                d.a[i][j] -= other.a[i][j];
            }
        }
        let (lo, hi) = d.eigenvalues(n);
        lo.abs().max(hi.abs())
    }
}

type CoefFn = dyn Fn(f64, &[f64], &[f64]) -> CoefSample + Send + Sync;

/// `(a, b, c)` as a function of `(t, x, v)`, for the operator
/// `a:grad_v^2 u + b.grad_v u + c u`.
#[derive(Clone)]
pub struct CoefficientField {
    pub name: String,
    pub n: usize,
    eval: Arc<CoefFn>,
    time_dependent: bool,
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientField")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("time_dependent", &self.time_dependent)
            .finish()
    }
}

/// Coefficients sampled on every lattice point at one time.
#[derive(Debug, Clone)]
pub struct SampledCoefficients {
    pub time: f64,
    pub values: Vec<CoefSample>,
    pub lambda_min: f64,
    pub a_max: f64,
}

impl CoefficientField {
    pub fn new<F>(name: impl Into<String>, n: usize, time_dependent: bool, eval: F) -> Result<Self>
    where
        F: Fn(f64, &[f64], &[f64]) -> CoefSample + Send + Sync + 'static,
    {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidParameter(format!("dimension n={n} must be 1 or 2")));
        }
        Ok(Self {
            name: name.into(),
            n,
            eval: Arc::new(eval),
            time_dependent,
        })
    }

    pub fn eval(&self, t: f64, x: &[f64], v: &[f64]) -> CoefSample {
        (self.eval)(t, x, v)
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    /// `(a0 Id, b, c)` with constant entries.
    pub fn constant(n: usize, a0: f64, b: [f64; 2], c: f64) -> Result<Self> {
        let s = CoefSample {
            a: [[a0, 0.0], [0.0, a0]],
            b,
            c,
        };
        Self::new(format!("constant({a0})"), n, false, move |_, _, _| s)
    }

    /// `max{min{|x|, 1}, 1/2} Id`, with `|x|` the distance to the origin on the
    /// x-torus.
    pub fn clipped_distance(n: usize, lx: f64) -> Result<Self> {
        Self::new("clipped-distance", n, false, move |_, x, _| {
            let r = x
                .iter()
                .map(|&c| {
                    let w = c - lx * (c / lx).round();
                    w * w
                })
                .sum::<f64>()
                .sqrt();
            CoefSample::scalar(r.min(1.0).max(0.5))
        })
    }

    /// `(1 + amp psi) Id` with `psi` a smooth bump of radius `radius`
    /// centred at the phase-space origin.
    pub fn compact_perturbation(n: usize, amp: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && amp > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "compact perturbation needs radius > 0 and amp > -1, got {radius}, {amp}"
            )));
        }
        Self::new(format!("compact-perturbation({amp},{radius})"), n, false, move |_, x, v| {
            let r2 = (x.iter().chain(v).map(|c| c * c).sum::<f64>()) / (radius * radius);
            let psi = if r2 < 1.0 { (1.0 - 1.0 / (1.0 - r2)).exp() } else { 0.0 };
            CoefSample::scalar(1.0 + amp * psi)
        })
    }

    /// Coefficients from lattice snapshots: `a` entries in row-major order
    /// (`n*n` fields), then optionally `n` fields for `b` and one for `c`.
    /// Off-lattice points use periodic multilinear interpolation.
    pub fn from_snapshots(name: impl Into<String>, a: Vec<Field>, b: Option<Vec<Field>>, c: Option<Field>) -> Result<Self> {
        let n = match a.len() {
            1 => 1,
            4 => 2,
            m => {
                return Err(Error::InvalidParameter(format!("expected 1 or 4 a-entries, got {m}")));
            }
        };
        let grid = *a[0].grid();
        if grid.n != n {
            return Err(Error::GridMismatch(format!("a-entries imply n={n}, grid has n={}", grid.n)));
        }
        let b = b.unwrap_or_default();
        if !(b.is_empty() || b.len() == n) {
            return Err(Error::InvalidParameter(format!("expected {n} b-entries, got {}", b.len())));
        }
        for f in a.iter().chain(&b).chain(c.iter()) {
            f.check_grid(&grid)?;
        }
        Self::new(name, n, false, move |_, x, v| {
            let mut s = CoefSample::scalar(0.0);
            for i in 0..n {
                for j in 0..n {
                    s.a[i][j] = interpolate(&a[i * n + j], x, v);
                }
                if let Some(f) = b.get(i) {
                    s.b[i] = interpolate(f, x, v);
                }
            }
            if let Some(f) = &c {
                s.c = interpolate(f, x, v);
            }
            s
        })
    }

    /// Samples at time `t` on every lattice point, enforcing symmetry and
    /// positive definiteness.
    pub fn sample(&self, grid: &TorusGrid, t: f64) -> Result<SampledCoefficients> {
        if grid.n != self.n {
            return Err(Error::GridMismatch(format!(
                "coefficient `{}` has n={}, grid has n={}",
                self.name, self.n, grid.n
            )));
        }
        let mut values = Vec::with_capacity(grid.len());
        grid.for_each_point(|_, x, v| values.push(self.eval(t, x, v)));
        SampledCoefficients::from_values(grid, t, values).map_err(|e| match e {
            Error::Ellipticity(msg) => Error::Ellipticity(format!("`{}` {msg}", self.name)),
            other => other,
        })
    }
}

impl SampledCoefficients {
    /// Lattice samples in storage order, checked for symmetry and positive definiteness.
    pub fn from_values(grid: &TorusGrid, t: f64, values: Vec<CoefSample>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for {} points", values.len(), grid.len())));
        }
        let n = grid.n;
        let (mut lambda_min, mut a_max) = (f64::INFINITY, 0.0f64);
        for (i, s) in values.iter().enumerate() {
            let (lo, hi) = s.eigenvalues(n);
            let finite = s.a.iter().flatten().chain(&s.b).all(|z| z.is_finite()) && s.c.is_finite();
            if !finite || s.asymmetry(n) > SYMMETRY_TOL || !(lo > 0.0) {
                return Err(Error::Ellipticity(format!(
                    "at t={t}, point {i}: asymmetry {:.3e}, smallest eigenvalue {lo:e}",
                    s.asymmetry(n)
                )));
            }
            lambda_min = lambda_min.min(lo);
            a_max = a_max.max(hi);
        }
        Ok(Self {
            time: t,
            values,
            lambda_min,
            a_max,
        })
    }
}

fn interpolate(f: &Field, x: &[f64], v: &[f64]) -> f64 {
    let grid = f.grid();
    let axes = grid.axes();
    let strides = grid.strides();
    let mut base = Vec::with_capacity(axes);
    let mut frac = Vec::with_capacity(axes);
    for a in 0..axes {
        let c = if a < grid.n { x[a] } else { v[a - grid.n] };
        let len = grid.axis_len(a);
        let s = (c + 0.5 * grid.axis_period(a)) / grid.axis_period(a) * len as f64;
        let fl = s.floor();
        base.push(fl as i64);
        frac.push(s - fl);
    }
    let vals = f.values();
    let mut total = 0.0;
    for corner in 0..(1usize << axes) {
        let mut w = 1.0;
        let mut idx = 0;
        for a in 0..axes {
            let up = (corner >> a) & 1;
            w *= if up == 1 { frac[a] } else { 1.0 - frac[a] };
            let j = (base[a] + up as i64).rem_euclid(grid.axis_len(a) as i64) as usize;
            idx += j * strides[a];
        }
        if w != 0.0 {
            total += w * vals[idx];
        }
    }
    total
}
