use rustfft::num_complex::Complex64;

use super::shear::gamma_shear;
use crate::error::Result;
use crate::spectral::{forward, inverse_with_residue, Field, SpectralField};

/// `(f *_t g)(x, v) = int f(x - y - t w, v - w) g(y, w) dy dw`,
/// evaluated as the ordinary convolution `(Gamma(-t) g) * f`.
pub fn twisted_convolution(f: &Field, g: &Field, t: f64) -> Result<Field> {
    f.check_grid(g.grid())?;
    let fh = forward(f)?;
    let gh = forward(g)?;
    let out = twisted_convolution_spectral(&fh, &gh, t)?;
    Ok(inverse_with_residue(&out).0)
}

/// Spectral form: `c = |torus| * f^ * (Gamma(-t) g)^`.
pub fn twisted_convolution_spectral(
    fh: &SpectralField,
    gh: &SpectralField,
    t: f64,
) -> Result<SpectralField> {
    fh.check_grid(gh.grid())?;
    let sheared = gamma_shear(gh, -t)?;
    let vol = fh.grid().volume();
    let coeffs: Vec<Complex64> = fh
        .coeffs()
        .iter()
        .zip(sheared.coeffs())
        .map(|(a, b)| a * b * vol)
        .collect();
    SpectralField::new(*fh.grid(), coeffs)
}
