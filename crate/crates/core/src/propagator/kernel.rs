use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::{homogeneous_solve, KolmogorovParams};
use crate::error::{Error, Result};
use crate::norms::lq_norm;
use crate::spectral::{
    apply_multiplier, forward, inverse_with_residue, Field, MultiplierSpec, SpectralField, TorusGrid,
};
use crate::transforms::twisted_convolution_spectral;

/// Fundamental solution of the Kolmogorov equation (β = 2):
/// `γ_n t^{-2n} exp(-|v|^2/t + 3<v,x>/t^2 - 3|x|^2/t^3)`, `γ_n = 3^{n/2} (2π)^{-n}`.
pub fn kernel_g2(t: f64, x: &[f64], v: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("kernel time t={t} must be > 0")));
    }
    if x.len() != v.len() || x.is_empty() {
        return Err(Error::InvalidParameter("x and v must share a nonzero dimension".into()));
    }
    let n = x.len() as i32;
    let vv: f64 = v.iter().map(|a| a * a).sum();
    let xx: f64 = x.iter().map(|a| a * a).sum();
    let vx: f64 = v.iter().zip(x).map(|(a, b)| a * b).sum();
    let gamma = 3f64.powf(0.5 * n as f64) / (2.0 * PI).powi(n);
    Ok(gamma / t.powi(2 * n) * (-vv / t + 3.0 * vx / (t * t) - 3.0 * xx / (t * t * t)).exp())
}

/// Fourier coefficients of the periodized kernel `G_2(t)` on `grid`,
/// computed by direct trapezoidal quadrature of the physical kernel on a
/// fine auxiliary lattice (Poisson summation makes this exact up to the
/// quadrature error).
pub fn kernel_g2_transform(grid: &TorusGrid, t: f64) -> Result<SpectralField> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("kernel time t={t} must be > 0")));
    }
    // fine step from the conditional widths, window from the marginal ones
    let (hx, hv) = ((t * t * t / 6.0).sqrt() / 4.0, (t / 2.0).sqrt() / 4.0);
    let (wx, wv) = (10.0 * (2.0 * t * t * t / 3.0).sqrt(), 10.0 * (2.0 * t).sqrt());
    let (ax, av) = ((wx / hx).ceil() as i64, (wv / hv).ceil() as i64);
    let ks = grid.wavenumbers(0);
    let xis = grid.wavenumbers(grid.n);
    let mut partial = vec![Complex64::default(); ks.len() * (2 * av + 1) as usize];
    for b in -av..=av {
        let v = b as f64 * hv;
        let row = (b + av) as usize;
        for a in -ax..=ax {
            let x = a as f64 * hx;
            let g = kernel_g2(t, &[x], &[v])? * hx;
            if g == 0.0 {
                continue;
            }
            for (ki, &k) in ks.iter().enumerate() {
                partial[ki * (2 * av + 1) as usize + row] += Complex64::cis(-k * x) * g;
            }
        }
    }
    let mut table = vec![Complex64::default(); ks.len() * xis.len()];
    for ki in 0..ks.len() {
        for (xj, &xi) in xis.iter().enumerate() {
            let mut acc = Complex64::default();
            for b in -av..=av {
                let v = b as f64 * hv;
                acc += partial[ki * (2 * av + 1) as usize + (b + av) as usize] * Complex64::cis(-xi * v);
            }
            table[ki * xis.len() + xj] = acc * hv;
        }
    }
    // G_2 factorizes over coordinate pairs (x_i, v_i)
    let vol = grid.volume();
    let mut coeffs = vec![Complex64::default(); grid.len()];
    let dims = grid.dims();
    let n = grid.n;
    for (flat, c) in coeffs.iter_mut().enumerate() {
        let mut rem = flat;
        let mut idx = vec![0usize; dims.len()];
        for a in (0..dims.len()).rev() {
            idx[a] = rem % dims[a];
            rem /= dims[a];
        }
        let mut prod = Complex64::new(1.0, 0.0);
        for i in 0..n {
            prod *= table[idx[i] * xis.len() + idx[n + i]];
        }
        *c = prod / vol;
    }
    SpectralField::new(*grid, coeffs)
}

/// `G_2(t) *_t g`: the physical-space representation of the β = 2 flow.
pub fn kernel_convolve_g2(g: &Field, t: f64, p: &KolmogorovParams) -> Result<Field> {
    if p.beta != 2.0 {
        return Err(Error::Unsupported(format!(
            "no closed physical kernel for beta={}; only beta = 2",
            p.beta
        )));
    }
    g.check_grid(&p.grid)?;
    let kernel = kernel_g2_transform(&p.grid, t)?;
    let out = twisted_convolution_spectral(&kernel, &forward(g)?, t)?;
    Ok(inverse_with_residue(&out).0)
}

/// `max_t t ||Δ_v T_2(t) g||_q / ||g||_q` over the sampled times.
pub fn semigroup_decay_constant(g: &Field, times: &[f64], q: f64, p: &KolmogorovParams) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::InvalidTimeGrid("no sample times".into()));
    }
    if p.beta != 2.0 {
        return Err(Error::Unsupported("semigroup decay constant is defined for beta = 2".into()));
    }
    let base = lq_norm(g, q)?;
    if base == 0.0 {
        return Ok(0.0);
    }
    let gh = forward(g)?;
    let lap = MultiplierSpec::laplace_v();
    let mut worst: f64 = 0.0;
    for &t in times {
        if !(t > 0.0) {
            return Err(Error::InvalidTimeGrid(format!("sample time {t} must be > 0")));
        }
        let u = apply_multiplier(&homogeneous_solve(&gh, t, p)?, &lap)?;
        let val = lq_norm(&inverse_with_residue(&u).0, q)?;
        worst = worst.max(t * val / base);
    }
    Ok(worst)
}
