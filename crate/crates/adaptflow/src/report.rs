//! CSV tables and JSON run reports.

use serde::Serialize;

use adaptflow_core::analysis::{ErrorReport, RegionError, SweepOutcome};
use adaptflow_core::solver::SolveReport;

pub const SWEEP_HEADER: &str = "delta,err_p,err_u,fast_fraction,converged";
pub const ERRORS_HEADER: &str = "model,region,err_p,err_u,cells";

/// One sweep row per delta with whole-domain errors.
pub fn sweep_csv(outcome: &SweepOutcome) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in &outcome.rows {
        s.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            r.delta,
            r.errors.whole.err_p,
            r.errors.whole.err_u,
            r.fast_fraction(),
            r.converged
        ));
    }
    s
}

/// Rows `model × region` of the error reports.
pub fn errors_csv(models: &[(&str, &ErrorReport)]) -> String {
    let mut s = String::from(ERRORS_HEADER);
    s.push('\n');
    for (model, rep) in models {
        for (region, e) in [("fast", rep.fast), ("slow", rep.slow), ("whole", rep.whole)] {
            s.push_str(&format!("{model},{region},{:.16e},{:.16e},{}\n", e.err_p, e.err_u, e.cells));
        }
    }
    s
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RegionErrorJson {
    pub err_p: f64,
    pub err_u: f64,
    pub cells: usize,
}

impl From<RegionError> for RegionErrorJson {
    fn from(e: RegionError) -> Self {
        Self { err_p: e.err_p, err_u: e.err_u, cells: e.cells }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ErrorsJson {
    pub fast: RegionErrorJson,
    pub slow: RegionErrorJson,
    pub whole: RegionErrorJson,
}

impl From<&ErrorReport> for ErrorsJson {
    fn from(e: &ErrorReport) -> Self {
        Self { fast: e.fast.into(), slow: e.slow.into(), whole: e.whole.into() }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    pub name: String,
    pub model: String,
    pub delta: Option<f64>,
    /// Flux threshold; absent when infinite or not applicable.
    pub u_bar: Option<f64>,
    pub epsilon: Option<f64>,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub relaxation: f64,
    pub mass_balance_defect: f64,
    pub fast_cells: Option<usize>,
    pub fast_fraction: Option<f64>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub errors: Option<ErrorsJson>,
}

impl RunReport {
    pub fn new(name: &str, model: &str, report: &SolveReport, mass_balance_defect: f64) -> Self {
        Self {
            name: name.into(),
            model: model.into(),
            delta: None,
            u_bar: None,
            epsilon: None,
            iterations: report.iterations,
            residuals: report.residuals.clone(),
            converged: report.converged,
            relaxation: report.relaxation,
            mass_balance_defect,
            fast_cells: None,
            fast_fraction: None,
            warnings: report.warnings.clone(),
            errors: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `Some(v)` for finite `v`.
pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}
