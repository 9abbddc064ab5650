//! Frozen-coefficient fixed point for `d_t u + v.grad_x u = div_v(kappa(u) grad_v u)`.

mod continuation;
mod fixed_point;
mod model;

pub use continuation::{continuation, ContinuationResult, SlabRecord, Verdict};
pub use fixed_point::{
    fixed_point_solve, integrability_gate, FixedPointOptions, FixedPointTrace, IterateRecord, QuasilinearRun,
};
pub use model::{A_of, F_of, DiffusivityKind, DiffusivityModel, Rational};
