use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform lattice on the phase-space torus `T^n_x × T^n_v`.
///
/// Physical points sit at `x_j = -L/2 + j L/N`, so the origin is at index
/// `N/2` along every axis. Storage is row-major over the axes
/// `(x_1, .., x_n, v_1, .., v_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub n: usize,
    pub nx: usize,
    pub nv: usize,
    pub lx: f64,
    pub lv: f64,
}

impl TorusGrid {
    pub fn new(n: usize, nx: usize, nv: usize, lx: f64, lv: f64) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidGrid(format!("dimension n={n} must be 1 or 2")));
        }
        for (name, m) in [("Nx", nx), ("Nv", nv)] {
            if m < 4 || !m.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "{name}={m} must be a power of two >= 4"
                )));
            }
        }
        if !(lx.is_finite() && lx > 0.0 && lv.is_finite() && lv > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period lengths must be positive, got Lx={lx}, Lv={lv}"
            )));
        }
        Ok(Self { n, nx, nv, lx, lv })
    }

    /// n = 1, 128 x 128 points, periods 16 pi.
    pub fn desk() -> Self {
        Self::new(1, 128, 128, 16.0 * PI, 16.0 * PI).expect("desk grid is valid")
    }

    pub fn with_points(&self, nx: usize, nv: usize) -> Result<Self> {
        Self::new(self.n, nx, nv, self.lx, self.lv)
    }

    pub fn axes(&self) -> usize {
        2 * self.n
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..self.axes()).map(|a| self.axis_len(a)).collect()
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        if axis < self.n {
            self.nx
        } else {
            self.nv
        }
    }

    pub fn axis_period(&self, axis: usize) -> f64 {
        if axis < self.n {
            self.lx
        } else {
            self.lv
        }
    }

    pub fn is_x_axis(&self, axis: usize) -> bool {
        axis < self.n
    }

    pub fn len(&self) -> usize {
        self.nx.pow(self.n as u32) * self.nv.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hv(&self) -> f64 {
        self.lv / self.nv as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (self.hx() * self.hv()).powi(self.n as i32)
    }

    pub fn volume(&self) -> f64 {
        (self.lx * self.lv).powi(self.n as i32)
    }

    /// Row-major strides over the 2n axes.
    pub fn strides(&self) -> Vec<usize> {
        let dims = self.dims();
        let mut strides = vec![1; dims.len()];
        for a in (0..dims.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * dims[a + 1];
        }
        strides
    }

    pub fn coord(&self, axis: usize, j: usize) -> f64 {
        let l = self.axis_period(axis);
        -0.5 * l + j as f64 * l / self.axis_len(axis) as f64
    }

    pub fn coords(&self, axis: usize) -> Vec<f64> {
        (0..self.axis_len(axis)).map(|j| self.coord(axis, j)).collect()
    }

    /// Signed frequency index of storage position `j` (FFT order).
    pub fn freq_index(&self, axis: usize, j: usize) -> i64 {
        signed_index(j, self.axis_len(axis))
    }

    pub fn wavenumber(&self, axis: usize, j: usize) -> f64 {
        2.0 * PI / self.axis_period(axis) * self.freq_index(axis, j) as f64
    }

    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        (0..self.axis_len(axis)).map(|j| self.wavenumber(axis, j)).collect()
    }

    /// Largest resolved |frequency| along x and v axes.
    pub fn band_radius(&self) -> (f64, f64) {
        (
            PI * self.nx as f64 / self.lx,
            PI * self.nv as f64 / self.lv,
        )
    }

    /// Storage position of a signed frequency index, if it is on the lattice.
    pub fn storage_index(&self, axis: usize, m: i64) -> Option<usize> {
        let len = self.axis_len(axis) as i64;
        if m < -len / 2 || m >= len / 2 {
            return None;
        }
        Some(m.rem_euclid(len) as usize)
    }

    /// Flat index of a mode given signed frequency indices (x components then v).
    pub fn mode_flat_index(&self, m: &[i64]) -> Option<usize> {
        if m.len() != self.axes() {
            return None;
        }
        let strides = self.strides();
        let mut flat = 0;
        for (a, &mi) in m.iter().enumerate() {
            flat += self.storage_index(a, mi)? * strides[a];
        }
        Some(flat)
    }

    /// Storage position of the physical point nearest to `coord` along `axis`,
    /// after periodic wrapping.
    pub fn nearest_point(&self, axis: usize, coord: f64) -> usize {
        let l = self.axis_period(axis);
        let len = self.axis_len(axis);
        let s = ((coord + 0.5 * l) / (l / len as f64)).round() as i64;
        s.rem_euclid(len as i64) as usize
    }

    /// Visit every lattice mode with its wavevectors `(k, xi)`.
    pub fn for_each_mode<F: FnMut(usize, &[f64], &[f64])>(&self, mut visit: F) {
        let tables: Vec<Vec<f64>> = (0..self.axes()).map(|a| self.wavenumbers(a)).collect();
        self.walk(&tables, |flat, vals| {
            let (k, xi) = vals.split_at(self.n);
            visit(flat, k, xi)
        });
    }

    /// Visit every physical point with its coordinates `(x, v)`.
    pub fn for_each_point<F: FnMut(usize, &[f64], &[f64])>(&self, mut visit: F) {
        let tables: Vec<Vec<f64>> = (0..self.axes()).map(|a| self.coords(a)).collect();
        self.walk(&tables, |flat, vals| {
            let (x, v) = vals.split_at(self.n);
            visit(flat, x, v)
        });
    }

    /// Visit every point of the mixed representation with `(k, v)`:
    /// x-axes carry wavenumbers, v-axes carry physical coordinates.
    pub fn for_each_mixed<F: FnMut(usize, &[f64], &[f64])>(&self, mut visit: F) {
        let tables: Vec<Vec<f64>> = (0..self.axes())
            .map(|a| if a < self.n { self.wavenumbers(a) } else { self.coords(a) })
            .collect();
        self.walk(&tables, |flat, vals| {
            let (k, v) = vals.split_at(self.n);
            visit(flat, k, v)
        });
    }

    /// Visit every lattice mode with its signed frequency indices.
    pub fn for_each_mode_index<F: FnMut(usize, &[i64])>(&self, mut visit: F) {
        let dims = self.dims();
        let mut idx = vec![0usize; dims.len()];
        let mut m = vec![0i64; dims.len()];
        for flat in 0..self.len() {
            for a in 0..dims.len() {
                m[a] = signed_index(idx[a], dims[a]);
            }
            visit(flat, &m);
            increment(&mut idx, &dims);
        }
    }

    fn walk<F: FnMut(usize, &[f64])>(&self, tables: &[Vec<f64>], mut visit: F) {
        let dims = self.dims();
        let mut idx = vec![0usize; dims.len()];
        let mut vals: Vec<f64> = tables.iter().map(|t| t[0]).collect();
        for flat in 0..self.len() {
            visit(flat, &vals);
            let changed = increment(&mut idx, &dims);
            for a in changed..dims.len() {
                vals[a] = tables[a][idx[a]];
            }
        }
    }
}

pub(crate) fn signed_index(j: usize, len: usize) -> i64 {
    if j < len / 2 {
        j as i64
    } else {
        j as i64 - len as i64
    }
}

/// Odometer increment; returns the outermost axis that changed.
fn increment(idx: &mut [usize], dims: &[usize]) -> usize {
    let mut a = dims.len();
    while a > 0 {
        a -= 1;
        idx[a] += 1;
        if idx[a] < dims[a] {
            return a;
        }
        idx[a] = 0;
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(TorusGrid::new(1, 6, 8, 1.0, 1.0).is_err());
        assert!(TorusGrid::new(1, 2, 8, 1.0, 1.0).is_err());
        assert!(TorusGrid::new(3, 8, 8, 1.0, 1.0).is_err());
        assert!(TorusGrid::new(1, 8, 8, 0.0, 1.0).is_err());
    }

    #[test]
    fn origin_sits_at_half_index() {
        let g = TorusGrid::new(1, 8, 16, 4.0, 8.0).unwrap();
        assert_eq!(g.coord(0, 4), 0.0);
        assert_eq!(g.coord(1, 8), 0.0);
        assert_eq!(g.nearest_point(1, 0.0), 8);
        assert_eq!(g.nearest_point(1, 4.0), 0);
    }

    #[test]
    fn mode_walk_matches_strides() {
        let g = TorusGrid::new(2, 4, 8, 1.0, 2.0).unwrap();
        let strides = g.strides();
        let mut count = 0;
        g.for_each_mode_index(|flat, m| {
            assert_eq!(g.mode_flat_index(m), Some(flat));
            count += 1;
        });
        assert_eq!(count, g.len());
        assert_eq!(strides, vec![256, 64, 8, 1]);
    }
}
