use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Real samples on the physical lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: TorusGrid,
    values: Vec<f64>,
}

/// Fourier coefficients on the `(k, xi)` lattice, FFT storage order per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

/// Imaginary parts above this fraction of the largest value are rejected.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Share of the field mass in the outer shell above which diagnostics warn.
pub const SPILLOVER_WARN: f64 = 1e-6;

impl Field {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Sample `f(x, v)` at every lattice point.
    pub fn from_fn<F: FnMut(&[f64], &[f64]) -> f64>(grid: TorusGrid, mut f: F) -> Result<Self> {
        let mut values = vec![0.0; grid.len()];
        grid.for_each_point(|i, x, v| values[i] = f(x, v));
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn axpy(&mut self, a: f64, other: &Field) {
        for (y, x) in self.values.iter_mut().zip(&other.values) {
            *y += a * x;
        }
    }

    pub fn sub(&self, other: &Field) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Physical L2 norm with cell-volume weights.
    pub fn l2(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// Fraction of the L1 mass in the outer 10% shell of the torus.
    pub fn spillover(&self) -> f64 {
        let mut shell = 0.0;
        let mut total = 0.0;
        let (lx, lv) = (self.grid.lx, self.grid.lv);
        self.grid.for_each_point(|i, x, v| {
            let a = self.values[i].abs();
            total += a;
            let outer = x.iter().any(|c| c.abs() >= 0.4 * lx) || v.iter().any(|c| c.abs() >= 0.4 * lv);
            if outer {
                shell += a;
            }
        });
        if total == 0.0 {
            0.0
        } else {
            shell / total
        }
    }

    pub fn check_grid(&self, other: &TorusGrid) -> Result<()> {
        same_grid(&self.grid, other)
    }
}

impl SpectralField {
    pub fn new(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    /// Single Fourier mode `amp * exp(i(k.x + xi.v))` given signed indices.
    pub fn mode(grid: TorusGrid, m: &[i64], amp: Complex64) -> Result<Self> {
        let flat = grid
            .mode_flat_index(m)
            .ok_or_else(|| Error::InvalidParameter(format!("mode {m:?} is not on the lattice")))?;
        let mut s = Self::zeros(grid);
        s.coeffs[flat] = amp;
        Ok(s)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, m: &[i64]) -> Option<Complex64> {
        self.grid.mode_flat_index(m).map(|i| self.coeffs[i])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
        }
    }

    pub fn axpy(&mut self, a: Complex64, other: &SpectralField) {
        for (y, x) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *y += a * x;
        }
    }

    pub fn sub(&self, other: &SpectralField) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// Physical L2 norm via Parseval: `sqrt(|torus| * sum |c|^2)`.
    pub fn l2(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.volume()).sqrt()
    }

    /// L2 norm of the real part of the synthesis, by Parseval on the
    /// conjugate-symmetric part `(c(m) + conj c(-m)) / 2`.
    pub fn real_part_l2(&self) -> f64 {
        let dims = self.grid.dims();
        let strides = self.grid.strides();
        let mut sum = 0.0;
        self.grid.for_each_mode_index(|flat, m| {
            let mut partner = 0;
            for a in 0..dims.len() {
                partner += ((-m[a]).rem_euclid(dims[a] as i64) as usize) * strides[a];
            }
            sum += (0.5 * (self.coeffs[flat] + self.coeffs[partner].conj())).norm_sqr();
        });
        (sum * self.grid.volume()).sqrt()
    }

    /// Largest violation of `c(-m) = conj(c(m))`, with the offending mode.
    pub fn conjugate_asymmetry(&self) -> (f64, Vec<i64>) {
        let mut worst = (0.0, vec![0; self.grid.axes()]);
        let dims = self.grid.dims();
        let strides = self.grid.strides();
        self.grid.for_each_mode_index(|flat, m| {
            let mut partner = 0;
            for a in 0..dims.len() {
                partner += ((-m[a]).rem_euclid(dims[a] as i64) as usize) * strides[a];
            }
            let d = (self.coeffs[flat] - self.coeffs[partner].conj()).norm();
            if d > worst.0 {
                worst = (d, m.to_vec());
            }
        });
        worst
    }

    pub fn check_grid(&self, other: &TorusGrid) -> Result<()> {
        same_grid(&self.grid, other)
    }
}

pub(crate) fn same_grid(a: &TorusGrid, b: &TorusGrid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// Fourier coefficients with `c(0,0)` equal to the mean of `f`.
pub fn forward(f: &Field) -> Result<SpectralField> {
    if let Some((index, &value)) = f.values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let grid = f.grid;
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward_axes(&mut buf, &grid, fft::all_axes(&grid));
    Ok(SpectralField { grid, coeffs: buf })
}

/// Inverse transform that rejects spectra whose synthesis is not real.
pub fn inverse(s: &SpectralField) -> Result<Field> {
    let (field, residue) = inverse_with_residue(s);
    let scale = field.max_abs();
    if residue > IMAG_RESIDUE_TOL * scale.max(f64::MIN_POSITIVE) && residue > 0.0 {
        let (_, mode) = s.conjugate_asymmetry();
        return Err(Error::ImaginaryResidue { residue, mode });
    }
    Ok(field)
}

/// Real part of the synthesis and the largest dropped imaginary part.
pub fn inverse_with_residue(s: &SpectralField) -> (Field, f64) {
    let buf = synthesize(s);
    let mut residue: f64 = 0.0;
    let values = buf
        .iter()
        .map(|z| {
            residue = residue.max(z.im.abs());
            z.re
        })
        .collect();
    (
        Field {
            grid: s.grid,
            values,
        },
        residue,
    )
}

/// Complex synthesis on the physical lattice.
pub fn synthesize(s: &SpectralField) -> Vec<Complex64> {
    let mut buf = s.coeffs.clone();
    fft::inverse_axes(&mut buf, &s.grid, fft::all_axes(&s.grid));
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> TorusGrid {
        TorusGrid::new(1, 16, 32, 2.0 * std::f64::consts::PI, 6.0).unwrap()
    }

    #[test]
    fn constant_has_only_mean_mode() {
        let s = forward(&Field::constant(grid(), 1.0)).unwrap();
        assert!((s.coeffs()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(s.coeffs()[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn cosine_splits_into_two_halves() {
        // k0 = 3 on a 2 pi period
        let f = Field::from_fn(grid(), |x, _| (3.0 * x[0]).cos()).unwrap();
        let s = forward(&f).unwrap();
        for (i, c) in s.coeffs().iter().enumerate() {
            let m = grid().freq_index(0, i / 32);
            let mv = grid().freq_index(1, i % 32);
            let expect = if mv == 0 && (m == 3 || m == -3) { 0.5 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-14, "{m} {mv} {c}");
        }
    }

    #[test]
    fn parseval_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = Field::new(grid(), (0..grid().len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .unwrap();
        let s = forward(&f).unwrap();
        assert!((s.l2() - f.l2()).abs() <= 1e-12 * f.l2());
        let back = inverse(&s).unwrap();
        let err = back.sub(&f).l2() / f.l2();
        assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn mode_pair_synthesizes_cosine() {
        let g = grid();
        let mut s = SpectralField::mode(g, &[2, 1], Complex64::new(0.5, 0.0)).unwrap();
        s.axpy(
            Complex64::new(1.0, 0.0),
            &SpectralField::mode(g, &[-2, -1], Complex64::new(0.5, 0.0)).unwrap(),
        );
        let f = inverse(&s).unwrap();
        let xi = 2.0 * std::f64::consts::PI / 6.0;
        g.for_each_point(|i, x, v| {
            assert!((f.values()[i] - (2.0 * x[0] + xi * v[0]).cos()).abs() < 1e-13);
        });
    }

    #[test]
    fn zero_spectrum_gives_zero_field() {
        let f = inverse(&SpectralField::zeros(grid())).unwrap();
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn rejects_asymmetric_spectrum_naming_mode() {
        let s = SpectralField::mode(grid(), &[2, 1], Complex64::new(1.0, 0.0)).unwrap();
        match inverse(&s) {
            Err(Error::ImaginaryResidue { mode, .. }) => assert!(mode == vec![2, 1] || mode == vec![-2, -1]),
            other => panic!("expected residue error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut v = vec![0.0; grid().len()];
        v[5] = f64::NAN;
        assert!(matches!(Field::new(grid(), v), Err(Error::NonFinite { index: 5, .. })));
    }

    #[test]
    fn real_part_norm_matches_synthesis() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let coeffs = (0..g.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let s = SpectralField::new(g, coeffs).unwrap();
        let direct = inverse_with_residue(&s).0.l2();
        assert!((s.real_part_l2() - direct).abs() < 1e-12 * direct);
    }
}
