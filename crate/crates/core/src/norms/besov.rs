use serde::{Deserialize, Serialize};

use super::spectral_lq_norm;
use crate::error::{Error, Result};
use crate::quadrature::gauss7;
use crate::spectral::{forward, Field, SpectralField, TorusGrid};

/// Dilation exponents `α` (one per phase-space axis) and order `σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyParams {
    pub alpha: Vec<f64>,
    pub sigma: f64,
}

impl AnisotropyParams {
    pub fn new(alpha: Vec<f64>, sigma: f64) -> Result<Self> {
        if alpha.is_empty() || alpha.len() % 2 != 0 || alpha.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "alpha must hold 2n positive entries, got {alpha:?}"
            )));
        }
        if !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma={sigma} must be finite")));
        }
        Ok(Self { alpha, sigma })
    }

    /// Kinetic space of order `a` for scale `β`:
    /// `α = (2(β+1)/(β+2), .., 2/(β+2), ..)`, `σ = 2aβ/(β+2)`.
    pub fn kinetic(n: usize, beta: f64, a: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::InvalidParameter(format!("beta={beta} must lie in (0, 2]")));
        }
        let ax = 2.0 * (beta + 1.0) / (beta + 2.0);
        let av = 2.0 / (beta + 2.0);
        let mut alpha = vec![ax; n];
        alpha.extend(vec![av; n]);
        Self::new(alpha, 2.0 * a * beta / (beta + 2.0))
    }

    /// Per-axis quasi-radii `|z_l|^{1/α_l}`.
    fn radii(&self, k: &[f64], xi: &[f64], out: &mut [f64]) {
        for (l, z) in k.iter().chain(xi).enumerate() {
            out[l] = z.abs().powf(1.0 / self.alpha[l]);
        }
    }

    /// Homogeneous quasi-norm `sum_l |z_l|^{1/α_l}`.
    pub fn quasi_norm(&self, k: &[f64], xi: &[f64]) -> f64 {
        k.iter()
            .chain(xi)
            .zip(&self.alpha)
            .map(|(z, a)| z.abs().powf(1.0 / a))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BesovMode {
    Continuous,
    Dyadic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub aniso: AnisotropyParams,
    pub q: f64,
    pub p: f64,
    pub mode: BesovMode,
    /// Upper limit of the continuous scale integral.
    pub c_upper: f64,
    /// Top dyadic level; `None` picks the smallest level covering the lattice.
    pub j_max: Option<u32>,
}

impl BesovSpec {
    pub fn new(aniso: AnisotropyParams, q: f64, p: f64, mode: BesovMode) -> Result<Self> {
        for (name, v) in [("q", q), ("p", p)] {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name}={v} must be >= 1")));
            }
        }
        Ok(Self {
            aniso,
            q,
            p,
            mode,
            c_upper: 1.0,
            j_max: None,
        })
    }

    pub fn kinetic(n: usize, beta: f64, a: f64, q: f64, p: f64) -> Result<Self> {
        Self::new(AnisotropyParams::kinetic(n, beta, a)?, q, p, BesovMode::Dyadic)
    }

    pub fn with_mode(mut self, mode: BesovMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Order-7 smoothstep cutoff: 1 on `[0, 1]`, 0 on `[2, inf)`.
fn cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let x = r - 1.0;
        let x4 = x * x * x * x;
        1.0 - x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
    }
}

/// `φ_0(2^{-jα} z) = prod_l cutoff(|z_l|^{1/α_l} / 2^j)`.
fn theta(radii: &[f64], j: i32) -> f64 {
    let s = 0.5f64.powi(j);
    radii.iter().map(|r| cutoff(r * s)).product()
}

/// Largest per-axis quasi-radius over the lattice.
fn max_radius(grid: &TorusGrid, aniso: &AnisotropyParams) -> f64 {
    (0..grid.axes())
        .map(|a| {
            let top = grid.wavenumbers(a).iter().fold(0.0f64, |m, k| m.max(k.abs()));
            top.powf(1.0 / aniso.alpha[a])
        })
        .fold(0.0, f64::max)
}

/// Top dyadic level for `spec` on `grid`: the requested one if it is valid,
/// else the smallest level whose partition covers every lattice mode.
pub fn dyadic_levels(grid: &TorusGrid, spec: &BesovSpec) -> Result<u32> {
    if spec.aniso.alpha.len() != grid.axes() {
        return Err(Error::InvalidParameter(format!(
            "alpha has {} entries for a {}-axis grid",
            spec.aniso.alpha.len(),
            grid.axes()
        )));
    }
    let r = max_radius(grid, &spec.aniso);
    let cover = if r <= 1.0 { 0 } else { r.log2().ceil() as u32 };
    match spec.j_max {
        None => Ok(cover),
        Some(j) => {
            if j < 3 {
                return Err(Error::InvalidParameter(format!("J_max={j} must be >= 3")));
            }
            if j < cover {
                return Err(Error::InvalidParameter(format!(
                    "J_max={j} leaves lattice modes uncovered (needs >= {cover})"
                )));
            }
            if 2f64.powi(j as i32 - 1) >= r {
                return Err(Error::InvalidParameter(format!(
                    "J_max={j} exceeds the resolved band: shell {j} has no lattice modes"
                )));
            }
            Ok(j)
        }
    }
}

/// `max |sum_{j<=J} φ_j - 1|` over the lattice.
pub fn partition_sum_error(grid: &TorusGrid, aniso: &AnisotropyParams, j_max: u32) -> f64 {
    let mut radii = vec![0.0; grid.axes()];
    let mut worst: f64 = 0.0;
    grid.for_each_mode(|_, k, xi| {
        aniso.radii(k, xi, &mut radii);
        let mut sum = theta(&radii, 0);
        for j in 1..=j_max as i32 {
            sum += theta(&radii, j) - theta(&radii, j - 1);
        }
        worst = worst.max((sum - 1.0).abs());
    });
    worst
}

fn masked(g: &SpectralField, mask: impl Fn(usize) -> f64) -> SpectralField {
    let mut out = g.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c *= mask(i);
    }
    out
}

fn dyadic(gh: &SpectralField, spec: &BesovSpec) -> Result<f64> {
    let grid = *gh.grid();
    let top = dyadic_levels(&grid, spec)?;
    let axes = grid.axes();
    let mut radii = vec![0.0; grid.len() * axes];
    grid.for_each_mode(|i, k, xi| spec.aniso.radii(k, xi, &mut radii[i * axes..(i + 1) * axes]));
    let phi = |i: usize, j: i32| {
        let r = &radii[i * axes..(i + 1) * axes];
        if j == 0 {
            theta(r, 0)
        } else {
            theta(r, j) - theta(r, j - 1)
        }
    };
    let low = spectral_lq_norm(&masked(gh, |i| phi(i, 0)), spec.q)?;
    let mut sum = 0.0;
    for j in 1..=top as i32 {
        let shell = spectral_lq_norm(&masked(gh, |i| phi(i, j)), spec.q)?;
        sum += (2f64.powf(j as f64 * spec.aniso.sigma) * shell).powf(spec.p);
    }
    Ok(low + sum.powf(1.0 / spec.p))
}

/// `φ^_0(ζ) > 0` for `|ζ|_α < 2`, zero beyond; smooth.
fn low_bump(r: f64) -> f64 {
    if r >= 2.0 {
        0.0
    } else {
        (0.5 - 1.0 / (2.0 - r)).exp()
    }
}

/// `φ^(ζ) > 0` for `1/2 < |ζ|_α < 2`, zero elsewhere; smooth, peak 1.
fn annulus_bump(r: f64) -> f64 {
    if r <= 0.5 || r >= 2.0 {
        0.0
    } else {
        (1.0 / 0.5625 - 1.0 / ((r - 0.5) * (2.0 - r))).exp()
    }
}

/// Scale panels per octave of `t` for the continuous definition.
const PANELS_PER_OCTAVE: f64 = 2.0;

fn continuous(gh: &SpectralField, spec: &BesovSpec) -> Result<f64> {
    let grid = *gh.grid();
    if spec.aniso.alpha.len() != grid.axes() {
        return Err(Error::InvalidParameter("alpha does not match the grid".into()));
    }
    if !(spec.c_upper > 0.0) {
        return Err(Error::InvalidParameter(format!("C={} must be > 0", spec.c_upper)));
    }
    let mut rho = vec![0.0; grid.len()];
    grid.for_each_mode(|i, k, xi| rho[i] = spec.aniso.quasi_norm(k, xi));
    let low = spectral_lq_norm(&masked(gh, |i| low_bump(rho[i])), spec.q)?;
    let r_max = rho.iter().fold(0.0f64, |m, r| m.max(*r));
    // φ^(t^α ζ) = bump(t |ζ|_α) vanishes for t <= 1/(2 r_max)
    let lo = (0.5 / r_max).ln();
    let hi = spec.c_upper.ln();
    if r_max == 0.0 || lo >= hi {
        return Ok(low);
    }
    let panels = ((hi - lo) / std::f64::consts::LN_2 * PANELS_PER_OCTAVE).ceil().max(1.0) as usize;
    let width = (hi - lo) / panels as f64;
    let rule = gauss7();
    let mut integral = 0.0;
    for panel in 0..panels {
        let a = lo + panel as f64 * width;
        for &(x, w) in &rule {
            let s = a + 0.5 * width * (1.0 + x);
            let t = s.exp();
            let band = spectral_lq_norm(&masked(gh, |i| annulus_bump(t * rho[i])), spec.q)?;
            integral += 0.5 * width * w * (band / t.powf(spec.aniso.sigma)).powf(spec.p);
        }
    }
    Ok(low + integral.powf(1.0 / spec.p))
}

/// Kinetic Besov norm in the definition selected by `spec.mode`.
pub fn besov_norm(g: &Field, spec: &BesovSpec) -> Result<f64> {
    let gh = forward(g)?;
    match spec.mode {
        BesovMode::Dyadic => dyadic(&gh, spec),
        BesovMode::Continuous => continuous(&gh, spec),
    }
}

/// `(continuous, dyadic)` values of the same norm.
pub fn besov_pair(g: &Field, spec: &BesovSpec) -> Result<(f64, f64)> {
    let gh = forward(g)?;
    Ok((continuous(&gh, spec)?, dyadic(&gh, spec)?))
}
