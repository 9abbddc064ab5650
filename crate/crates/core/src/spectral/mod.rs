//! Phase-space torus, FFT conventions and Fourier multipliers.

pub mod fft;
mod field;
mod grid;
mod multiplier;
pub mod snapshot;

pub use field::{
    forward, inverse, inverse_with_residue, synthesize, Field, SpectralField, IMAG_RESIDUE_TOL,
    SPILLOVER_WARN,
};
pub use grid::TorusGrid;
pub use multiplier::{abs_pow, apply_multiplier, apply_table, norm, tabulate, MultiplierSpec};
