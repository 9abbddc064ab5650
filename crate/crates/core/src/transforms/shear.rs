use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::fft;
use crate::spectral::{Field, SpectralField, TorusGrid};

/// How `gamma_shear` realizes the shift `xi -> xi + t k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShearMode {
    /// Relocation when `t k` lands on the xi-lattice, phase multiplication otherwise.
    #[default]
    Auto,
    /// Multiply by `exp(i t k.v)` in the (k, v) mixed representation.
    Phase,
    /// Cyclic coefficient relocation; only valid for on-lattice shifts.
    Relocate,
}

/// Integer xi-index shift per unit x-index for time `t`, if it is on the lattice.
pub fn lattice_shift(grid: &TorusGrid, t: f64) -> Option<i64> {
    let s = t * grid.lv / grid.lx;
    let r = s.round();
    if (s - r).abs() <= 1e-9 * s.abs().max(1.0) {
        Some(r as i64)
    } else {
        None
    }
}

/// `Gamma(t)`: `[Gamma(t) g](x, v) = g(x + t v, v)`, i.e. `F(Gamma(t) g)(k, xi) = g^(k, xi - t k)`.
pub fn gamma_shear(f: &SpectralField, t: f64) -> Result<SpectralField> {
    gamma_shear_with(f, t, ShearMode::Auto)
}

pub fn gamma_shear_with(f: &SpectralField, t: f64, mode: ShearMode) -> Result<SpectralField> {
    if t == 0.0 {
        return Ok(f.clone());
    }
    let grid = *f.grid();
    match (mode, lattice_shift(&grid, t)) {
        (ShearMode::Relocate, None) => Err(Error::OffLatticeShift { t }),
        (ShearMode::Relocate | ShearMode::Auto, Some(j)) => Ok(relocate(f, j)),
        (ShearMode::Phase | ShearMode::Auto, _) => {
            let mut buf = to_mixed(f);
            apply_shear_phase(&mut buf, &grid, t);
            Ok(from_mixed(buf, grid))
        }
    }
}

fn relocate(f: &SpectralField, shift: i64) -> SpectralField {
    let grid = *f.grid();
    let n = grid.n;
    let strides = grid.strides();
    let src = f.coeffs();
    let mut out = vec![Complex64::default(); src.len()];
    grid.for_each_mode_index(|flat, m| {
        let mut target = 0usize;
        for a in 0..2 * n {
            let idx = if a < n {
                m[a]
            } else {
                m[a] + shift * m[a - n]
            };
            let len = grid.axis_len(a) as i64;
            target += (idx.rem_euclid(len) as usize) * strides[a];
        }
        out[target] = src[flat];
    });
    SpectralField::new(grid, out).expect("same grid")
}

/// Synthesize along the v-axes only: coefficients over `(k, v)`.
pub fn to_mixed(f: &SpectralField) -> Vec<Complex64> {
    let grid = *f.grid();
    let mut buf = f.coeffs().to_vec();
    fft::inverse_axes(&mut buf, &grid, fft::v_axes(&grid));
    buf
}

pub fn from_mixed(mut buf: Vec<Complex64>, grid: TorusGrid) -> SpectralField {
    fft::forward_axes(&mut buf, &grid, fft::v_axes(&grid));
    SpectralField::new(grid, buf).expect("buffer sized for grid")
}

/// Multiply a mixed-representation buffer by `exp(i t k.v)`.
pub fn apply_shear_phase(buf: &mut [Complex64], grid: &TorusGrid, t: f64) {
    grid.for_each_mixed(|i, k, v| {
        let kv: f64 = k.iter().zip(v).map(|(a, b)| a * b).sum();
        buf[i] *= Complex64::cis(t * kv);
    });
}

/// Physical-space shear `u(x, v) -> u(x + t v, v)`, exact for x-band-limited data.
pub fn shear_field(f: &Field, t: f64) -> Field {
    if t == 0.0 {
        return f.clone();
    }
    let grid = *f.grid();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward_axes(&mut buf, &grid, fft::x_axes(&grid));
    apply_shear_phase(&mut buf, &grid, t);
    fft::inverse_axes(&mut buf, &grid, fft::x_axes(&grid));
    Field::new(grid, buf.into_iter().map(|z| z.re).collect()).expect("finite input stays finite")
}
