use super::corpus::CorpusElement;
use super::report::DiagnosticReport;
use crate::error::Result;
use crate::norms::{besov_norm, trace_norm_flow, BesovMode, BesovSpec, TraceFlowOptions};
use crate::trajectory::WeightParams;

/// `trace_norm_flow(g) / besov_norm(g)` over the corpus, with Besov order
/// `a = s + μ - 1/p`; samples with a vanishing Besov norm are skipped.
/// `min_ratio()` and `worst_ratio` bound the observed band.
pub fn trace_equivalence_band(
    corpus: &[CorpusElement],
    s: f64,
    beta: f64,
    w: &WeightParams,
    mode: BesovMode,
    opts: &TraceFlowOptions,
) -> Result<DiagnosticReport> {
    let a = s + w.mu - 1.0 / w.p;
    let mut report = DiagnosticReport::new("trace_equivalence_band")
        .param("s", s)
        .param("beta", beta)
        .param("weights", w)
        .param("besov_order", a)
        .param("besov_mode", mode)
        .param("band_is_regression_pin", true);
    for el in corpus {
        let n = el.field.grid().n;
        let spec = BesovSpec::kinetic(n, beta, a, w.q, w.p)?.with_mode(mode);
        let b = besov_norm(&el.field, &spec)?;
        if b == 0.0 {
            report.skip(el.id.clone(), "Besov norm vanishes");
            continue;
        }
        let t = trace_norm_flow(&el.field, s, beta, w, opts)?;
        report.push(el.id.clone(), t / b);
    }
    let mut report = report.finish()?;
    let (lo, hi) = (report.min_ratio(), report.worst_ratio);
    report.set_param("band_min", lo);
    report.set_param("band_max", hi);
    Ok(report)
}
