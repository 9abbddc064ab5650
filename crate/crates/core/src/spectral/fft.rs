//! Axis-wise FFTs over row-major buffers.
//!
//! The transforms use the true lattice coordinates `x_j = -L/2 + j h`, so the
//! forward map is `c(m) = (1/N) sum_j g_j exp(-i k_m x_j)`, which equals the
//! plain DFT times `(-1)^j` at storage position `j`.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::TorusGrid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Transform `buf` along `axis` in place.
///
/// Forward: normalized by `1/N` and sign-corrected for centered coordinates.
/// Inverse: unnormalized synthesis `g_j = sum_m c(m) exp(i k_m x_j)`.
pub fn transform_axis(buf: &mut [Complex64], dims: &[usize], axis: usize, inverse: bool) {
    let len = dims[axis];
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let fft = plan(len, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let scale = if inverse { 1.0 } else { 1.0 / len as f64 };

    let apply_sign = |line: &mut [Complex64]| {
        for (j, c) in line.iter_mut().enumerate() {
            if j % 2 == 1 {
                *c = -*c;
            }
        }
    };

    if stride == 1 {
        for line in buf.chunks_exact_mut(len) {
            // (-1)^j commutes with the normalization; apply on the side that
            // carries coefficients.
            if inverse {
                apply_sign(line);
            }
            fft.process_with_scratch(line, &mut scratch);
            if !inverse {
                apply_sign(line);
                line.iter_mut().for_each(|c| *c *= scale);
            }
        }
        return;
    }

    let mut line = vec![Complex64::default(); len];
    for o in 0..outer {
        let base = o * len * stride;
        for s in 0..stride {
            for (j, l) in line.iter_mut().enumerate() {
                *l = buf[base + j * stride + s];
            }
            if inverse {
                apply_sign(&mut line);
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            if !inverse {
                apply_sign(&mut line);
            }
            for (j, l) in line.iter().enumerate() {
                buf[base + j * stride + s] = *l * scale;
            }
        }
    }
}

pub fn forward_axes(buf: &mut [Complex64], grid: &TorusGrid, axes: impl IntoIterator<Item = usize>) {
    let dims = grid.dims();
    for a in axes {
        transform_axis(buf, &dims, a, false);
    }
}

pub fn inverse_axes(buf: &mut [Complex64], grid: &TorusGrid, axes: impl IntoIterator<Item = usize>) {
    let dims = grid.dims();
    for a in axes {
        transform_axis(buf, &dims, a, true);
    }
}

pub fn x_axes(grid: &TorusGrid) -> std::ops::Range<usize> {
    0..grid.n
}

pub fn v_axes(grid: &TorusGrid) -> std::ops::Range<usize> {
    grid.n..2 * grid.n
}

pub fn all_axes(grid: &TorusGrid) -> std::ops::Range<usize> {
    0..2 * grid.n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum_with_centered_coordinates() {
        let grid = TorusGrid::new(1, 8, 4, 3.0, 2.0).unwrap();
        let dims = grid.dims();
        let data: Vec<Complex64> = (0..grid.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut buf = data.clone();
        forward_axes(&mut buf, &grid, all_axes(&grid));
        let xs = grid.coords(0);
        let vs = grid.coords(1);
        for a in 0..dims[0] {
            for b in 0..dims[1] {
                let k = grid.wavenumber(0, a);
                let xi = grid.wavenumber(1, b);
                let mut acc = Complex64::default();
                for (i, x) in xs.iter().enumerate() {
                    for (j, v) in vs.iter().enumerate() {
                        let ph = Complex64::from_polar(1.0, -(k * x + xi * v));
                        acc += data[i * dims[1] + j] * ph;
                    }
                }
                acc /= grid.len() as f64;
                assert!((acc - buf[a * dims[1] + b]).norm() < 1e-13);
            }
        }
        inverse_axes(&mut buf, &grid, all_axes(&grid));
        for (x, y) in buf.iter().zip(&data) {
            assert!((x - y).norm() < 1e-13);
        }
    }
}
