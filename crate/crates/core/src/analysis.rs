//! Slow/fast region labels, region-wise L2 errors and the tolerance sweep.

use alloc::string::String;
use alloc::vec::Vec;

use crate::constitutive::{AdaptiveSpec, Epsilon, LawSpec};
use crate::error::{invalid, Error, Result};
use crate::grid::{magnitudes, norm3, reconstruct_cell_flux, CartGrid, FaceField};
use crate::regularize::{SmoothedMultiplier, Smoothing};
use crate::solver::{solve_nonlinear, DiscreteProblem, FixedPointControls, FlowModel, LinearSolution, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Slow,
    Fast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionLabels {
    pub labels: Vec<Region>,
    pub u_bar: f64,
    pub fast_fraction: f64,
}

impl RegionLabels {
    /// Fast where the magnitude strictly exceeds `u_bar`.
    pub fn from_magnitudes(mags: &[f64], u_bar: f64) -> Self {
        let labels: Vec<Region> =
            mags.iter().map(|&a| if a > u_bar { Region::Fast } else { Region::Slow }).collect();
        let fast = labels.iter().filter(|&&r| r == Region::Fast).count();
        let fast_fraction = if labels.is_empty() { 0.0 } else { fast as f64 / labels.len() as f64 };
        Self { labels, u_bar, fast_fraction }
    }

    pub fn fast_count(&self) -> usize {
        self.labels.iter().filter(|&&r| r == Region::Fast).count()
    }

    pub fn is_fast(&self, cell: usize) -> bool {
        self.labels[cell] == Region::Fast
    }
}

/// Labels cells by their reconstructed flux magnitude against `adaptive.u_bar`.
pub fn classify(flux: &FaceField, adaptive: &AdaptiveSpec, grid: &CartGrid) -> Result<RegionLabels> {
    classify_with_threshold(flux, adaptive.u_bar, grid)
}

pub fn classify_with_threshold(flux: &FaceField, u_bar: f64, grid: &CartGrid) -> Result<RegionLabels> {
    let mags = magnitudes(&reconstruct_cell_flux(grid, flux)?);
    Ok(RegionLabels::from_magnitudes(mags.values(), u_bar))
}

/// Whether errors are divided by the reference norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMode {
    #[default]
    Relative,
    Absolute,
}

/// Errors over one region together with the squared sums behind them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegionError {
    pub err_p: f64,
    pub err_u: f64,
    pub cells: usize,
    /// `Σ vol·|p - p̂|²`
    pub diff_p2: f64,
    /// `Σ vol·|p̂|²`
    pub ref_p2: f64,
    pub diff_u2: f64,
    pub ref_u2: f64,
}

impl RegionError {
    fn finish(mut self, mode: ErrorMode) -> Self {
        let ratio = |num: f64, den: f64| match mode {
            ErrorMode::Absolute => libm::sqrt(num),
            ErrorMode::Relative if num == 0.0 => 0.0,
            ErrorMode::Relative => libm::sqrt(num) / libm::sqrt(den),
        };
        self.err_p = ratio(self.diff_p2, self.ref_p2);
        self.err_u = ratio(self.diff_u2, self.ref_u2);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub fast: RegionError,
    pub slow: RegionError,
    pub whole: RegionError,
}

/// Volume-weighted L2 errors of pressure and cell flux vectors of `sol`
/// against `reference`, per region of `labels`.
pub fn region_errors(
    grid: &CartGrid,
    sol: &LinearSolution,
    reference: &LinearSolution,
    labels: &RegionLabels,
    mode: ErrorMode,
) -> Result<ErrorReport> {
    let u = reconstruct_cell_flux(grid, &sol.flux)?;
    let ur = reconstruct_cell_flux(grid, &reference.flux)?;
    region_errors_cells(
        grid,
        (sol.pressure.values(), u.values()),
        (reference.pressure.values(), ur.values()),
        labels,
        mode,
    )
}

/// [`region_errors`] on cell pressures and cell flux vectors.
pub fn region_errors_cells(
    grid: &CartGrid,
    sol: (&[f64], &[[f64; 3]]),
    reference: (&[f64], &[[f64; 3]]),
    labels: &RegionLabels,
    mode: ErrorMode,
) -> Result<ErrorReport> {
    let n = grid.n_cells();
    let (p, u) = sol;
    let (pr, ur) = reference;
    for len in [p.len(), u.len(), pr.len(), ur.len(), labels.labels.len()] {
        if len != n {
            return Err(Error::GridMismatch { expected: n, found: len });
        }
    }
    let vol = grid.cell_volume();
    let mut report = ErrorReport::default();
    for c in 0..n {
        let dp = p[c] - pr[c];
        let du: [f64; 3] = core::array::from_fn(|a| u[c][a] - ur[c][a]);
        let (ndu, nur) = (norm3(&du), norm3(&ur[c]));
        let region = if labels.is_fast(c) { &mut report.fast } else { &mut report.slow };
        for r in [region, &mut report.whole] {
            r.cells += 1;
            r.diff_p2 += vol * dp * dp;
            r.ref_p2 += vol * pr[c] * pr[c];
            r.diff_u2 += vol * ndu * ndu;
            r.ref_u2 += vol * nur * nur;
        }
    }
    report.fast = report.fast.finish(mode);
    report.slow = report.slow.finish(mode);
    report.whole = report.whole.finish(mode);
    Ok(report)
}

impl SolveReport {
    pub fn solution(&self) -> LinearSolution {
        LinearSolution { flux: self.flux.clone(), pressure: self.pressure.clone() }
    }
}

/// Settings shared by every row of a sweep.
#[derive(Debug, Clone)]
pub struct SweepSettings {
    pub fast: LawSpec,
    pub epsilon: Epsilon,
    pub smoothing: Smoothing,
    pub controls: FixedPointControls,
    pub mode: ErrorMode,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub delta: f64,
    /// `+∞` when the threshold is undefined and the row fell back to Darcy.
    pub u_bar: f64,
    pub errors: ErrorReport,
    pub labels: RegionLabels,
    pub converged: bool,
    pub report: SolveReport,
}

impl SweepRow {
    pub fn fast_fraction(&self) -> f64 {
        self.labels.fast_fraction
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub reference: SolveReport,
    pub rows: Vec<SweepRow>,
    /// Fast fraction nondecreasing along the sweep.
    pub fraction_monotone: bool,
    pub warnings: Vec<String>,
}

/// Checks that `deltas` lie in `[0, 1)` and strictly decrease.
pub fn validate_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(invalid("at least one delta is required"));
    }
    if deltas.iter().any(|d| !(0.0..1.0).contains(d)) {
        return Err(invalid("deltas must lie in [0, 1)"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("deltas must be strictly decreasing"));
    }
    Ok(())
}

/// Solves the adaptive model for `delta` and labels the result.
pub fn adaptive_run(
    problem: &DiscreteProblem,
    settings: &SweepSettings,
    delta: f64,
    warnings: &mut Vec<String>,
) -> Result<(SolveReport, RegionLabels)> {
    match AdaptiveSpec::new(settings.fast.clone(), delta, settings.epsilon, &problem.medium, &problem.fluid) {
        Ok(spec) => {
            let u_bar = spec.u_bar;
            let model = FlowModel::Adaptive(SmoothedMultiplier::new(spec, settings.smoothing));
            let report = solve_nonlinear(&problem.with_model(model), &settings.controls)?;
            let labels = classify_with_threshold(&report.flux, u_bar, &problem.grid)?;
            Ok((report, labels))
        }
        Err(Error::ThresholdUndefined) => {
            warnings.push(alloc::format!(
                "delta {delta}: threshold undefined, reference law is linear; using Darcy"
            ));
            let report = solve_nonlinear(&problem.with_model(FlowModel::Law(LawSpec::Darcy)), &settings.controls)?;
            let labels = classify_with_threshold(&report.flux, f64::INFINITY, &problem.grid)?;
            Ok((report, labels))
        }
        Err(e) => Err(e),
    }
}

/// Runs the adaptive model for each `delta` against one global fast-law reference.
pub fn delta_sweep(problem: &DiscreteProblem, deltas: &[f64], settings: &SweepSettings) -> Result<SweepOutcome> {
    validate_deltas(deltas)?;
    let mut warnings = Vec::new();
    let reference = solve_nonlinear(&problem.with_model(FlowModel::Law(settings.fast.clone())), &settings.controls)?;
    if !reference.converged {
        warnings.push(String::from("reference solve did not converge"));
    }
    let ref_sol = reference.solution();
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let (report, labels) = adaptive_run(problem, settings, delta, &mut warnings)?;
        if !report.converged {
            warnings.push(alloc::format!("delta {delta}: adaptive solve did not converge"));
        }
        let errors = region_errors(&problem.grid, &report.solution(), &ref_sol, &labels, settings.mode)?;
        rows.push(SweepRow {
            delta,
            u_bar: labels.u_bar,
            errors,
            converged: report.converged,
            labels,
            report,
        });
    }
    let fraction_monotone = rows.windows(2).all(|w| w[1].fast_fraction() >= w[0].fast_fraction());
    if !fraction_monotone {
        warnings.push(String::from("fast-cell fraction decreased along the sweep"));
    }
    Ok(SweepOutcome { reference, rows, fraction_monotone, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CellField;
    use alloc::vec;

    fn grid() -> CartGrid {
        CartGrid::new_2d(3, 2, 1.0, 2.0, 1.0).unwrap()
    }

    fn uniform_x(grid: &CartGrid, u: f64) -> FaceField {
        let mut f = FaceField::zeros(grid);
        for i in 0..grid.n_faces_axis(0) {
            f[i] = u;
        }
        f
    }

    #[test]
    fn classify_examples() {
        let g = grid();
        let spec = AdaptiveSpec::with_threshold(LawSpec::Darcy, LawSpec::darcy_forchheimer(1.0), 0.1, 1.0, 0.1).unwrap();
        assert_eq!(classify(&uniform_x(&g, 2.0), &spec, &g).unwrap().fast_fraction, 1.0);
        assert_eq!(classify(&FaceField::zeros(&g), &spec, &g).unwrap().fast_count(), 0);
        // Ties are slow.
        assert_eq!(classify(&uniform_x(&g, 1.0), &spec, &g).unwrap().fast_count(), 0);
        let zero = AdaptiveSpec::with_threshold(LawSpec::Darcy, LawSpec::darcy_forchheimer(1.0), 0.0, 0.0, 0.1).unwrap();
        assert_eq!(classify(&uniform_x(&g, 1e-30), &zero, &g).unwrap().fast_fraction, 1.0);
    }

    fn solution(g: &CartGrid, p: Vec<f64>, u: f64) -> LinearSolution {
        LinearSolution { pressure: CellField::new(g, p).unwrap(), flux: uniform_x(g, u) }
    }

    #[test]
    fn identical_solutions_have_zero_error() {
        let g = grid();
        let s = solution(&g, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 0.3);
        let labels = RegionLabels::from_magnitudes(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0], 0.5);
        let r = region_errors(&g, &s, &s, &labels, ErrorMode::Relative).unwrap();
        for reg in [r.fast, r.slow, r.whole] {
            assert_eq!((reg.err_p, reg.err_u), (0.0, 0.0));
        }
    }

    #[test]
    fn uniform_scaling_gives_uniform_error() {
        let g = grid();
        let p: Vec<f64> = (1..=6).map(f64::from).collect();
        let reference = solution(&g, p.clone(), 2.0);
        let sol = solution(&g, p.iter().map(|v| v * (1.0 + 1e-3)).collect(), 2.0);
        let labels = RegionLabels::from_magnitudes(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0], 0.5);
        let r = region_errors(&g, &sol, &reference, &labels, ErrorMode::Relative).unwrap();
        for reg in [r.fast, r.slow, r.whole] {
            assert!((reg.err_p - 1e-3).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_region_reports_zero() {
        let g = grid();
        let a = solution(&g, vec![1.0; 6], 1.0);
        let b = solution(&g, vec![2.0; 6], 3.0);
        let labels = RegionLabels::from_magnitudes(&[0.0; 6], 0.5);
        let r = region_errors(&g, &a, &b, &labels, ErrorMode::Relative).unwrap();
        assert_eq!(r.fast.cells, 0);
        assert_eq!((r.fast.err_p, r.fast.err_u), (0.0, 0.0));
        assert!((r.whole.err_p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn delta_validation() {
        assert!(validate_deltas(&[0.05, 0.0125, 0.003125]).is_ok());
        assert!(validate_deltas(&[0.1, 0.1]).is_err());
        assert!(validate_deltas(&[1.0]).is_err());
        assert!(validate_deltas(&[]).is_err());
    }
}
