use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::field::SpectralField;
use crate::error::{Error, Result};

type Symbol = dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync;

/// Fourier multiplier `m(k, xi)`.
#[derive(Clone)]
pub struct MultiplierSpec {
    symbol: Arc<Symbol>,
    pub label: String,
}

impl fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSpec").field("label", &self.label).finish()
    }
}

/// `|z|^s` with `0^s = 0` for `s > 0` and `0^0 = 1`.
pub fn abs_pow(r: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if r == 0.0 {
        0.0
    } else {
        r.powf(s)
    }
}

pub fn norm(z: &[f64]) -> f64 {
    z.iter().map(|c| c * c).sum::<f64>().sqrt()
}

impl MultiplierSpec {
    pub fn new<F>(label: impl Into<String>, symbol: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            symbol: Arc::new(symbol),
            label: label.into(),
        }
    }

    pub fn real<F>(label: impl Into<String>, symbol: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, move |k, xi| Complex64::new(symbol(k, xi), 0.0))
    }

    pub fn identity() -> Self {
        Self::real("1", |_, _| 1.0)
    }

    /// `D_x^s`, symbol `|k|^s`.
    pub fn dx_pow(s: f64) -> Self {
        Self::real(format!("|k|^{s}"), move |k, _| abs_pow(norm(k), s))
    }

    /// `D_v^s = (-Delta_v)^{s/2}`, symbol `|xi|^s`.
    pub fn dv_pow(s: f64) -> Self {
        Self::real(format!("|xi|^{s}"), move |_, xi| abs_pow(norm(xi), s))
    }

    /// `Delta_v`, symbol `-|xi|^2`.
    pub fn laplace_v() -> Self {
        Self::real("-|xi|^2", |_, xi| -xi.iter().map(|c| c * c).sum::<f64>())
    }

    /// `d/dv_i`, symbol `i xi_i`.
    pub fn dv(i: usize) -> Self {
        Self::new(format!("i xi_{i}"), move |_, xi| Complex64::new(0.0, xi[i]))
    }

    /// `d/dx_i`, symbol `i k_i`.
    pub fn dx(i: usize) -> Self {
        Self::new(format!("i k_{i}"), move |k, _| Complex64::new(0.0, k[i]))
    }

    /// Weight of `X_beta^{s,q}`:
    /// `((1+|k|^2)^{beta/(2(beta+1))} + (1+|xi|^2)^{beta/2})^s`.
    pub fn xbsq(s: f64, beta: f64) -> Self {
        Self::real(format!("X[beta={beta}]^s={s}"), move |k, xi| {
            let k2: f64 = k.iter().map(|c| c * c).sum();
            let x2: f64 = xi.iter().map(|c| c * c).sum();
            let base = (1.0 + k2).powf(beta / (2.0 * (beta + 1.0))) + (1.0 + x2).powf(beta / 2.0);
            base.powf(s)
        })
    }

    pub fn eval(&self, k: &[f64], xi: &[f64]) -> Complex64 {
        (self.symbol)(k, xi)
    }

    /// Pointwise product of two symbols.
    pub fn then(&self, other: &MultiplierSpec) -> Self {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        Self {
            symbol: Arc::new(move |k, xi| a(k, xi) * b(k, xi)),
            label: format!("({})*({})", self.label, other.label),
        }
    }

    pub fn plus(&self, other: &MultiplierSpec) -> Self {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        Self {
            symbol: Arc::new(move |k, xi| a(k, xi) + b(k, xi)),
            label: format!("({})+({})", self.label, other.label),
        }
    }
}

/// Symbol values on every lattice mode of `grid`, in storage order.
pub fn tabulate(grid: &super::TorusGrid, m: &MultiplierSpec) -> Result<Vec<Complex64>> {
    let mut table = vec![Complex64::default(); grid.len()];
    let mut bad = None;
    grid.for_each_mode(|i, k, xi| {
        let s = m.eval(k, xi);
        if bad.is_none() && !(s.re.is_finite() && s.im.is_finite()) {
            bad = Some((k.to_vec(), xi.to_vec()));
        }
        table[i] = s;
    });
    match bad {
        Some((k, xi)) => Err(Error::SymbolNotFinite {
            label: m.label.clone(),
            k,
            xi,
        }),
        None => Ok(table),
    }
}

/// Pointwise product with a table from [`tabulate`].
pub fn apply_table(f: &SpectralField, table: &[Complex64]) -> SpectralField {
    let mut out = f.clone();
    for (c, s) in out.coeffs_mut().iter_mut().zip(table) {
        *c *= s;
    }
    out
}

pub fn apply_multiplier(f: &SpectralField, m: &MultiplierSpec) -> Result<SpectralField> {
    let grid = *f.grid();
    let mut out = f.clone();
    let mut bad = None;
    {
        let coeffs = out.coeffs_mut();
        grid.for_each_mode(|i, k, xi| {
            if bad.is_some() {
                return;
            }
            let s = m.eval(k, xi);
            if !(s.re.is_finite() && s.im.is_finite()) {
                bad = Some((k.to_vec(), xi.to_vec()));
                return;
            }
            coeffs[i] *= s;
        });
    }
    if let Some((k, xi)) = bad {
        return Err(Error::SymbolNotFinite {
            label: m.label.clone(),
            k,
            xi,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward, inverse, Field, TorusGrid};
    use std::f64::consts::PI;

    #[test]
    fn zero_power_conventions() {
        assert_eq!(abs_pow(0.0, 0.5), 0.0);
        assert_eq!(abs_pow(0.0, 0.0), 1.0);
        assert_eq!(abs_pow(2.0, 2.0), 4.0);
    }

    #[test]
    fn identity_and_eigenfunction() {
        let g = TorusGrid::new(1, 16, 32, 2.0 * PI, 2.0 * PI).unwrap();
        let f = Field::from_fn(g, |_, v| (3.0 * v[0]).sin()).unwrap();
        let s = forward(&f).unwrap();
        assert_eq!(apply_multiplier(&s, &MultiplierSpec::identity()).unwrap(), s);
        let out = inverse(&apply_multiplier(&s, &MultiplierSpec::dv_pow(2.0)).unwrap()).unwrap();
        let err = out.sub(&f.scaled(9.0)).max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn nan_symbol_reports_coordinates() {
        let g = TorusGrid::new(1, 4, 4, 1.0, 1.0).unwrap();
        let s = forward(&Field::constant(g, 1.0)).unwrap();
        let m = MultiplierSpec::real("bad", |k, _| if k[0] > 0.0 { f64::NAN } else { 1.0 });
        match apply_multiplier(&s, &m) {
            Err(Error::SymbolNotFinite { k, .. }) => assert!(k[0] > 0.0),
            other => panic!("{other:?}"),
        }
    }
}
