pub mod diagnostics;
pub mod error;
pub mod norms;
pub mod propagator;
pub mod quadrature;
pub mod quasilinear;
pub mod spectral;
pub mod trajectory;
pub mod transforms;
pub mod varcoef;

pub use error::{Error, Result};
pub use trajectory::{Trajectory, WeightParams};
