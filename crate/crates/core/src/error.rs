use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("imaginary residue {residue:.3e} exceeds tolerance at mode {mode:?}")]
    ImaginaryResidue { residue: f64, mode: Vec<i64> },

    #[error("multiplier `{label}` is not finite at k={k:?}, xi={xi:?}")]
    SymbolNotFinite {
        label: String,
        k: Vec<f64>,
        xi: Vec<f64>,
    },

    #[error("shift t*k is off the xi-lattice for t={t}; use phase-multiplication mode")]
    OffLatticeShift { t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear solve did not converge (residual {residual:.3e})")]
    LinearSolve { residual: f64 },

    #[error("step dt={dt} exceeds stability budget {budget}")]
    StabilityBudget { dt: f64, budget: f64 },

    #[error("coefficient violates ellipticity: {0}")]
    Ellipticity(String),

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error("value {value} outside the diffusivity window [-{window}, {window}] at t={time}")]
    RangeExceeded { value: f64, window: f64, time: f64 },

    #[error("fixed-point iteration failed to contract (last ratio {ratio:.3}) at minimal horizon {horizon}")]
    NoContraction {
        ratio: f64,
        horizon: f64,
        trace: Box<crate::quasilinear::FixedPointTrace>,
    },

    #[error("empty corpus after skipping degenerate samples")]
    EmptyCorpus,

    #[error("expression error: {0}")]
    Expression(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
