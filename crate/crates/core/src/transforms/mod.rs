//! Galilean shear, temporal weight map and twisted convolution.

mod calculus;
mod shear;
mod twisted;

pub use calculus::{commutation_residual, kinetic_derivative, phi_mu, phi_mu_inverse};
pub use shear::{
    apply_shear_phase, from_mixed, gamma_shear, gamma_shear_with, lattice_shift, shear_field,
    to_mixed, ShearMode,
};
pub use twisted::{twisted_convolution, twisted_convolution_spectral};
