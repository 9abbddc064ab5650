//! Strang-split solver for `d_t u + v.grad_x u = a:grad_v^2 u + b.grad_v u + c u + f`
//! with variable coefficients, and the sampled hypothesis check on `a`.

mod buc;
mod coefficient;
mod linalg;
mod stepper;

pub use buc::{check_hypotheses, BucOptions, BucReport};
pub use coefficient::{CoefSample, CoefficientField, SampledCoefficients, SYMMETRY_TOL};
pub use linalg::{bicgstab, solve_cyclic_tridiagonal};
pub use stepper::{
    solve_linear_varcoef, solve_linear_varcoef_trajectory, stability_limit, step, OperatorForm, Source, VarcoefOptions,
    VarcoefRun, SOLVE_TOL,
};
pub(crate) use stepper::{apply_slice, step_sampled};
