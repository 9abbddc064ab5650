//! Seeded test data that does not depend on the lattice it is sampled on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::norms::AnisotropyParams;
use crate::spectral::{inverse_with_residue, Field, SpectralField, TorusGrid};
use crate::transforms::shear_field;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone)]
pub struct CorpusElement {
    pub id: String,
    pub field: Field,
}

impl CorpusElement {
    pub fn new(id: impl Into<String>, field: Field) -> Self {
        Self { id: id.into(), field }
    }
}

const KAPPAS: [f64; 3] = [0.5, 1.0, 2.0];
const SIGMAS: [f64; 4] = [0.6, 0.8, 1.0, 1.25];
const NOISE_BANDS: [f64; 3] = [1.0, 2.0, 3.0];
const SHEAR_TIMES: [f64; 2] = [0.5, 1.0];

/// Periods of the standard diagnostic box: `2π` in `x`, `6π` in `v`.
pub const STANDARD_PERIODS: (f64, f64) = (2.0 * PI, 6.0 * PI);

/// `n`-point (per axis) one-dimensional standard box.
pub fn standard_grid(n: usize) -> Result<TorusGrid> {
    TorusGrid::new(1, n, n, STANDARD_PERIODS.0, STANDARD_PERIODS.1)
}

fn envelope(v: &[f64], sigma: f64) -> f64 {
    let rv: f64 = v.iter().map(|z| (z + 0.2).powi(2)).sum();
    (-rv / (2.0 * sigma * sigma)).exp()
}

/// `exp(κ sum (cos(x_i - 0.3) - 1)) exp(-|v + 0.2|^2 / (2σ^2))`: periodic in
/// `x` with spectrum decaying like `I_m(κ)`, localized in `v`.
pub fn bump(grid: TorusGrid, kappa: f64, sigma: f64) -> Result<Field> {
    let w = 2.0 * PI / grid.lx;
    Field::from_fn(grid, |x, v| {
        let cx: f64 = x.iter().map(|z| (w * (z - 0.3)).cos() - 1.0).sum();
        (kappa * cx).exp() * envelope(v, sigma)
    })
}

/// Bumps: three x-concentrations `κ` times four velocity widths `σ`.
pub fn bump_family(grid: TorusGrid) -> Result<Vec<CorpusElement>> {
    let mut out = Vec::new();
    for &k in &KAPPAS {
        for &s in &SIGMAS {
            out.push(CorpusElement::new(format!("bump-k{k}-s{s}"), bump(grid, k, s)?));
        }
    }
    Ok(out)
}

/// Integer frequency indices `m` with `|2π m_l / L_l| <= band` on every axis,
/// in lexicographic order.
fn band_indices(grid: &TorusGrid, band: f64) -> Result<Vec<Vec<i64>>> {
    let axes = grid.axes();
    let tops: Vec<i64> = (0..axes)
        .map(|a| (band * grid.axis_period(a) / (2.0 * PI)).floor() as i64)
        .collect();
    for (a, &t) in tops.iter().enumerate() {
        if 2 * t >= grid.axis_len(a) as i64 {
            return Err(Error::InvalidParameter(format!(
                "band {band} exceeds the lattice on axis {a}"
            )));
        }
    }
    let mut out = vec![Vec::new()];
    for &t in &tops {
        out = out
            .into_iter()
            .flat_map(|m: Vec<i64>| {
                (-t..=t).map(move |j| {
                    let mut m = m.clone();
                    m.push(j);
                    m
                })
            })
            .collect();
    }
    Ok(out)
}

/// Stream seed for one mode, so a mode draws the same numbers whatever else
/// is in the band.
fn mode_seed(seed: u64, m: &[i64]) -> u64 {
    m.iter().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, &j| {
        let mut z = h.wrapping_add(j as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z ^= z >> 31;
        z.wrapping_mul(0x94d0_49bb_1331_11eb)
    })
}

/// Real field with prescribed amplitudes on the modes of `indices`; `amp` gets
/// the index and a per-mode rng and is called once per conjugate pair.
fn real_from_modes<F>(grid: TorusGrid, indices: &[Vec<i64>], seed: u64, mut amp: F) -> Result<Field>
where
    F: FnMut(&[i64], &mut ChaCha8Rng) -> Complex64,
{
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for m in indices {
        let first = m.iter().copied().find(|&j| j != 0);
        let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(seed, m));
        let c = match first {
            None => Complex64::new(amp(m, &mut rng).re, 0.0),
            Some(j) if j > 0 => amp(m, &mut rng),
            Some(_) => continue,
        };
        let neg: Vec<i64> = m.iter().map(|j| -j).collect();
        let (i, ineg) = (
            grid.mode_flat_index(m).ok_or_else(|| out_of_lattice(m))?,
            grid.mode_flat_index(&neg).ok_or_else(|| out_of_lattice(&neg))?,
        );
        coeffs[i] = c;
        coeffs[ineg] = c.conj();
    }
    Ok(inverse_with_residue(&SpectralField::new(grid, coeffs)?).0)
}

fn out_of_lattice(m: &[i64]) -> Error {
    Error::InvalidParameter(format!("mode {m:?} is outside the lattice"))
}

/// White noise in the box `|k_l|, |xi_l| <= band`, unit-scale amplitudes.
pub fn band_limited_noise(grid: TorusGrid, band: f64, seed: u64) -> Result<Field> {
    let idx = band_indices(&grid, band)?;
    real_from_modes(grid, &idx, seed, |_, rng| {
        Complex64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..2.0 * PI))
    })
}

/// Band-limited noise times the unit velocity envelope, so that shears with
/// off-lattice times stay periodic to machine precision.
pub fn enveloped_noise(grid: TorusGrid, band: f64, seed: u64) -> Result<Field> {
    let mut f = band_limited_noise(grid, band, seed)?;
    let mut scale = Vec::with_capacity(grid.len());
    grid.for_each_point(|_, _, v| scale.push(envelope(v, 1.0)));
    for (x, s) in f.values_mut().iter_mut().zip(scale) {
        *x *= s;
    }
    Ok(f)
}

/// Enveloped noise: three bands.
pub fn noise_family(grid: TorusGrid, seed: u64) -> Result<Vec<CorpusElement>> {
    NOISE_BANDS
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            Ok(CorpusElement::new(
                format!("noise-b{b}"),
                enveloped_noise(grid, b, seed.wrapping_add(i as u64))?,
            ))
        })
        .collect()
}

/// `Gamma(t0) g` for a mid-range bump `g`.
pub fn shear_family(grid: TorusGrid) -> Result<Vec<CorpusElement>> {
    let g = bump(grid, 1.0, 0.8)?;
    Ok(SHEAR_TIMES
        .iter()
        .map(|&t| CorpusElement::new(format!("shear-t{t}"), shear_field(&g, t)))
        .collect())
}

/// Bumps, enveloped band-limited noise and shear-concentrated data.
pub fn standard_corpus(grid: TorusGrid, seed: u64) -> Result<Vec<CorpusElement>> {
    let mut out = bump_family(grid)?;
    out.extend(noise_family(grid, seed)?);
    out.extend(shear_family(grid)?);
    Ok(out)
}

/// Random phases with `|g^| = (1 + rho_α(k, xi))^{-decay}` on every mode whose
/// anisotropic radius `rho_α = sum |z_l|^{1/α_l}` is at most `band`.
pub fn heavy_tailed(grid: TorusGrid, aniso: &AnisotropyParams, decay: f64, band: f64, seed: u64) -> Result<Field> {
    let axes = grid.axes();
    let all: Vec<Vec<i64>> = {
        let mut v = Vec::new();
        grid.for_each_mode_index(|_, m| v.push(m.to_vec()));
        v
    };
    let wn = |m: &[i64]| -> Vec<f64> {
        (0..axes)
            .map(|a| 2.0 * PI * m[a] as f64 / grid.axis_period(a))
            .collect()
    };
    let n = grid.n;
    let idx: Vec<Vec<i64>> = all
        .into_iter()
        .filter(|m| {
            let z = wn(m);
            // keep conjugate pairs together: drop the unpaired Nyquist rows
            m.iter().enumerate().all(|(a, &j)| 2 * j.abs() < grid.axis_len(a) as i64)
                && aniso.quasi_norm(&z[..n], &z[n..]) <= band
        })
        .collect();
    real_from_modes(grid, &idx, seed, |m, rng| {
        let z = wn(m);
        let r = aniso.quasi_norm(&z[..n], &z[n..]);
        Complex64::from_polar((1.0 + r).powf(-decay), rng.gen_range(0.0..2.0 * PI))
    })
}

/// Dilation levels `λ` of the anisotropic family.
pub const DILATION_LEVELS: [f64; 4] = [1.0, std::f64::consts::SQRT_2, 2.0, 2.0 * std::f64::consts::SQRT_2];

const DILATION_SHAPES: [&str; 3] = ["bump", "dipole", "ridge"];

fn dilation_shape(shape: &str, x: f64, v: f64, sigma: f64) -> f64 {
    let env = (-v * v / (2.0 * sigma * sigma)).exp();
    match shape {
        "bump" => (x.cos() - 1.0).exp() * env,
        "dipole" => x.sin() * v * env,
        _ => (0.5 * (x.cos() - 1.0)).exp() * v.cos() * env,
    }
}

/// Three shapes under the kinetic dilation `h(λ^{1+β} x, λ v)`, for every
/// level. The shapes have period `L_x` in `x`, so `λ^{1+β}` must be an integer.
pub fn dilation_family(grid: TorusGrid, beta: f64, levels: &[f64], sigma: f64) -> Result<Vec<CorpusElement>> {
    let w = 2.0 * PI / grid.lx;
    let mut out = Vec::new();
    for &lam in levels {
        let m = lam.powf(1.0 + beta);
        if (m - m.round()).abs() > 1e-9 || m.round() < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "x-dilation {m} for lambda={lam}, beta={beta} is not an integer"
            )));
        }
        let m = m.round();
        for shape in DILATION_SHAPES {
            let f = Field::from_fn(grid, |x, v| {
                x.iter()
                    .zip(v)
                    .map(|(&xi, &vi)| dilation_shape(shape, m * w * xi, lam * vi, sigma))
                    .product()
            })?;
            out.push(CorpusElement::new(format!("{shape}-l{lam:.4}"), f));
        }
    }
    Ok(out)
}

/// Random phases with `|g^| = (1 + |k|)^{-2} (1 + |xi|)^{-decay}` for
/// `|k_i| <= 2` (integer wavenumbers on a `2π` box) and `|xi| <= band`.
pub fn xi_heavy_tail(grid: TorusGrid, decay: f64, band: f64, seed: u64) -> Result<Field> {
    let n = grid.n;
    let mut idx = Vec::new();
    grid.for_each_mode_index(|_, m| {
        let paired = m.iter().enumerate().all(|(a, &j)| 2 * j.abs() < grid.axis_len(a) as i64);
        let kx = (0..n).all(|a| (2.0 * PI * m[a] as f64 / grid.lx).abs() <= 2.0 + 1e-12);
        let xi: f64 = (n..2 * n)
            .map(|a| (2.0 * PI * m[a] as f64 / grid.lv).powi(2))
            .sum::<f64>()
            .sqrt();
        if paired && kx && xi <= band {
            idx.push(m.to_vec());
        }
    });
    real_from_modes(grid, &idx, seed, |m, rng| {
        let k: f64 = (0..n).map(|a| (2.0 * PI * m[a] as f64 / grid.lx).powi(2)).sum::<f64>().sqrt();
        let xi: f64 = (n..2 * n)
            .map(|a| (2.0 * PI * m[a] as f64 / grid.lv).powi(2))
            .sum::<f64>()
            .sqrt();
        Complex64::from_polar((1.0 + k).powi(-2) * (1.0 + xi).powf(-decay), rng.gen_range(0.0..2.0 * PI))
    })
}
