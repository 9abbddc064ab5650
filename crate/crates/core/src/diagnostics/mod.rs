//! Numerical checks of the regularity inequalities and norm equivalences.

pub mod corpus;
mod kinetic;
mod report;
mod smoothing;
mod trace_band;

pub use report::{refine, DiagnosticReport, Sample, Skipped, TrendPoint};
pub use kinetic::{
    duhamel_kinetic_derivative, dv_beta, dx_kinetic, forcing, kinetic_regularization_ratio,
    kinetic_profiles, maximal_regularity_constant, maxreg_report, phi_mu_conjugation, regularization_report,
    solution_corpus, weighted_norm, KineticProfile,
};
pub use smoothing::smoothing_profile;
pub use trace_band::trace_equivalence_band;
