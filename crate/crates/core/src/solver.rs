//! Two-point flux discretization of the mixed problem and the explicit
//! fixed-point iteration for nonlinear drag.
//!
//! For a frozen multiplier field `β` each face carries the momentum balance
//! `-∇p + f = β 𝕕 u` integrated over the two half-cells next to it, which
//! yields a symmetric positive-definite system for the cell pressures. The
//! uniform part `f̄` of the body force is removed analytically by solving
//! for `P = p - f̄·(x - x₀) - C`, which keeps large hydrostatic offsets out
//! of the linear system.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::constitutive::{multiplier, Coefficient, FluidProps, LawSpec, Medium};
use crate::error::{invalid, Error, Result};
use crate::grid::{magnitudes, reconstruct_cell_flux, CartGrid, CellField, FaceField, Side};
use crate::linalg::{norm, pcg, solve_direct, CsrMatrix};
use crate::regularize::SmoothedMultiplier;

/// Condition on one boundary face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// Prescribed outward normal flux `u·n` [kg/(m²·s)]; inflow is negative.
    Flux(f64),
    /// Prescribed pressure [Pa].
    Pressure(f64),
}

/// Conditions on every boundary face plus an optional mean-pressure anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    faces: Vec<Option<BoundaryCondition>>,
    pub mean_pressure: Option<f64>,
}

impl BoundarySpec {
    /// Every boundary face gets zero flux.
    pub fn sealed(grid: &CartGrid) -> Self {
        Self::from_sides(grid, |_| BoundaryCondition::Flux(0.0))
    }

    pub fn from_sides(grid: &CartGrid, mut side_bc: impl FnMut(Side) -> BoundaryCondition) -> Self {
        let mut faces = vec![None; grid.n_faces()];
        for &side in grid.sides() {
            let bc = side_bc(side);
            for f in grid.boundary_faces(side) {
                faces[f] = Some(bc);
            }
        }
        Self { faces, mean_pressure: None }
    }

    /// Assigns a condition per face on one side, given face index and center.
    pub fn set_side_with(
        &mut self,
        grid: &CartGrid,
        side: Side,
        mut bc: impl FnMut(usize, [f64; 3]) -> BoundaryCondition,
    ) {
        for f in grid.boundary_faces(side) {
            self.faces[f] = Some(bc(f, face_center(grid, f)));
        }
    }

    pub fn set_face(&mut self, face: usize, bc: BoundaryCondition) {
        self.faces[face] = Some(bc);
    }

    pub fn with_mean_pressure(mut self, p_bar: f64) -> Self {
        self.mean_pressure = Some(p_bar);
        self
    }

    pub fn face(&self, face: usize) -> Option<BoundaryCondition> {
        self.faces.get(face).copied().flatten()
    }

    pub fn has_pressure_face(&self) -> bool {
        self.faces.iter().any(|b| matches!(b, Some(BoundaryCondition::Pressure(_))))
    }

    pub fn validate(&self, grid: &CartGrid) -> Result<()> {
        if self.faces.len() != grid.n_faces() {
            return Err(Error::GridMismatch { expected: grid.n_faces(), found: self.faces.len() });
        }
        for (f, bc) in self.faces.iter().enumerate() {
            let boundary = grid.face_side(f).is_some();
            match (boundary, bc) {
                (true, None) => {
                    return Err(invalid(alloc::format!("boundary face {f} has no condition")))
                }
                (false, Some(_)) => {
                    return Err(invalid(alloc::format!("interior face {f} has a boundary condition")))
                }
                (_, Some(BoundaryCondition::Flux(v) | BoundaryCondition::Pressure(v)))
                    if !v.is_finite() =>
                {
                    return Err(invalid("boundary values must be finite"))
                }
                _ => {}
            }
        }
        match (self.has_pressure_face(), self.mean_pressure) {
            (false, None) => Err(Error::PressureAnchorRequired),
            (true, Some(_)) => Err(invalid(
                "mean-pressure anchor is only used on domains without pressure boundary faces",
            )),
            _ => Ok(()),
        }
    }
}

/// Center of a face.
pub fn face_center(grid: &CartGrid, face: usize) -> [f64; 3] {
    let (axis, ijk) = grid.face_ijk(face);
    let (o, h) = (grid.origin(), grid.spacing());
    core::array::from_fn(|a| {
        let off = if a == axis { 0.0 } else { 0.5 };
        o[a] + (ijk[a] as f64 + off) * h[a]
    })
}

/// Constitutive model applied by the solver.
#[derive(Debug, Clone)]
pub enum FlowModel {
    Law(LawSpec),
    Adaptive(SmoothedMultiplier),
}

/// Grid, medium, fluid, model, sources, body force and boundary conditions.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub grid: CartGrid,
    pub medium: Medium,
    pub fluid: FluidProps,
    pub model: FlowModel,
    /// Mass source density `q` [kg/(m³·s)].
    pub sources: CellField<f64>,
    /// Body force density `f` [Pa/m].
    pub body_force: CellField<[f64; 3]>,
    pub boundary: BoundarySpec,
}

impl DiscreteProblem {
    pub fn validate(&self) -> Result<()> {
        let n = self.grid.n_cells();
        for len in [self.medium.len(), self.sources.len(), self.body_force.len()] {
            if len != n {
                return Err(Error::GridMismatch { expected: n, found: len });
            }
        }
        match &self.model {
            FlowModel::Law(law) => law.validate(n)?,
            FlowModel::Adaptive(s) => {
                s.adaptive().slow.validate(n)?;
                s.adaptive().fast.validate(n)?;
            }
        }
        if self.sources.values().iter().any(|v| !v.is_finite())
            || self.body_force.values().iter().flatten().any(|v| !v.is_finite())
        {
            return Err(invalid("sources and body force must be finite"));
        }
        self.boundary.validate(&self.grid)
    }

    /// Same problem with a different constitutive model.
    pub fn with_model(&self, model: FlowModel) -> Self {
        Self { model, ..self.clone() }
    }

    /// Drag multiplier of the model in `cell` at flux magnitude `u_mag`.
    pub fn multiplier_at(&self, cell: usize, u_mag: f64) -> Result<f64> {
        let point = self.medium.point(cell);
        match &self.model {
            FlowModel::Law(law) => multiplier(law, cell, u_mag, &point, &self.fluid),
            FlowModel::Adaptive(s) => s.eval(cell, u_mag, &point, &self.fluid),
        }
    }

    /// Multiplier field evaluated at the reconstructed cell flux magnitudes.
    pub fn multiplier_field(&self, flux: &FaceField) -> Result<Vec<f64>> {
        let mags = magnitudes(&reconstruct_cell_flux(&self.grid, flux)?);
        mags.values().iter().enumerate().map(|(c, &a)| self.multiplier_at(c, a)).collect()
    }
}

/// Linear solver used for each frozen-multiplier system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Backend {
    /// Banded Cholesky with two rounds of iterative refinement.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Cg { tol: f64, max_iter: usize },
}

/// Pressure and face fluxes of one linear solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub flux: FaceField,
    pub pressure: CellField<f64>,
}

struct FaceInfo {
    axis: usize,
    lower: Option<usize>,
    upper: Option<usize>,
}

/// Problem data that does not change between fixed-point steps.
struct Prepared {
    faces: Vec<FaceInfo>,
    /// Residual body-force term per face: `(h/2)(f'_L + f'_R)` inside,
    /// `(h/2) f'_c` on the boundary, with `f' = f - f̄`.
    gravity: Vec<f64>,
    /// Reduced pressure `p₀ - φ(x_f) - C` on pressure faces.
    reduced_p0: Vec<f64>,
    fbar: [f64; 3],
    shift: f64,
    anchored: bool,
}

impl Prepared {
    fn new(p: &DiscreteProblem) -> Result<Self> {
        p.validate()?;
        let g = &p.grid;
        let dim = g.dim();
        let h = g.spacing();
        let n = g.n_cells();
        let mut fbar = [0.0; 3];
        for f in p.body_force.values() {
            for a in 0..dim {
                fbar[a] += f[a];
            }
        }
        for v in fbar.iter_mut() {
            *v /= n as f64;
        }
        let origin = g.origin();
        let phi = |x: [f64; 3]| (0..dim).map(|a| fbar[a] * (x[a] - origin[a])).sum::<f64>();
        let faces: Vec<FaceInfo> = (0..g.n_faces())
            .map(|f| {
                let (axis, _) = g.face_ijk(f);
                let (lower, upper) = g.face_cells(f);
                FaceInfo { axis, lower, upper }
            })
            .collect();
        let fprime = |c: usize, a: usize| p.body_force[c][a] - fbar[a];
        let gravity = faces
            .iter()
            .map(|fi| {
                let half = 0.5 * h[fi.axis];
                let l = fi.lower.map_or(0.0, |c| fprime(c, fi.axis));
                let r = fi.upper.map_or(0.0, |c| fprime(c, fi.axis));
                half * (l + r)
            })
            .collect();
        let anchored = !p.boundary.has_pressure_face();
        let shift = if let Some(p_bar) = p.boundary.mean_pressure {
            let mean_phi = (0..n).map(|c| phi(g.cell_center(c))).sum::<f64>() / n as f64;
            p_bar - mean_phi
        } else {
            let mut sum = 0.0;
            let mut count = 0usize;
            for f in 0..faces.len() {
                if let Some(BoundaryCondition::Pressure(p0)) = p.boundary.face(f) {
                    sum += p0 - phi(face_center(g, f));
                    count += 1;
                }
            }
            sum / count as f64
        };
        let reduced_p0 = (0..faces.len())
            .map(|f| match p.boundary.face(f) {
                Some(BoundaryCondition::Pressure(p0)) => p0 - phi(face_center(g, f)) - shift,
                _ => 0.0,
            })
            .collect();
        Ok(Self { faces, gravity, reduced_p0, fbar, shift, anchored })
    }

    fn half_resistance(&self, p: &DiscreteProblem, beta: &Coefficient, cell: usize, axis: usize) -> f64 {
        let k = p.medium.point(cell).k[axis];
        0.5 * p.grid.spacing()[axis] * beta.at(cell) * p.fluid.nu / k
    }

    /// Transmissibility (inverse total resistance) of every face; zero on flux faces.
    fn transmissibilities(&self, p: &DiscreteProblem, beta: &Coefficient) -> Vec<f64> {
        self.faces
            .iter()
            .enumerate()
            .map(|(f, fi)| match (fi.lower, fi.upper) {
                (Some(l), Some(r)) => {
                    1.0 / (self.half_resistance(p, beta, l, fi.axis)
                        + self.half_resistance(p, beta, r, fi.axis))
                }
                (Some(c), None) | (None, Some(c)) => match p.boundary.face(f) {
                    Some(BoundaryCondition::Pressure(_)) => {
                        1.0 / self.half_resistance(p, beta, c, fi.axis)
                    }
                    _ => 0.0,
                },
                (None, None) => unreachable!(),
            })
            .collect()
    }

    fn solve(&self, p: &DiscreteProblem, beta: &Coefficient, backend: Backend) -> Result<LinearSolution> {
        let g = &p.grid;
        let n = g.n_cells();
        let vol = g.cell_volume();
        let trans = self.transmissibilities(p, beta);
        let mut rhs: Vec<f64> = p.sources.values().iter().map(|q| q * vol).collect();
        let mut triplets = Vec::with_capacity(n * (2 * g.dim() + 1));
        let mut scale: f64 = rhs.iter().map(|v| libm::fabs(*v)).sum();
        let mut imbalance: f64 = rhs.iter().sum();
        for (f, fi) in self.faces.iter().enumerate() {
            let area = g.face_area(fi.axis);
            let t = area * trans[f];
            match (fi.lower, fi.upper) {
                (Some(l), Some(r)) => {
                    triplets.push((l, l, t));
                    triplets.push((r, r, t));
                    triplets.push((l, r, -t));
                    triplets.push((r, l, -t));
                    rhs[l] -= t * self.gravity[f];
                    rhs[r] += t * self.gravity[f];
                }
                (Some(c), None) | (None, Some(c)) => {
                    let s = if fi.upper.is_none() { 1.0 } else { -1.0 };
                    match p.boundary.face(f) {
                        Some(BoundaryCondition::Pressure(_)) => {
                            triplets.push((c, c, t));
                            rhs[c] += t * (self.reduced_p0[f] - s * self.gravity[f]);
                        }
                        Some(BoundaryCondition::Flux(u0)) => {
                            rhs[c] -= area * u0;
                            imbalance -= area * u0;
                            scale += libm::fabs(area * u0);
                        }
                        None => unreachable!(),
                    }
                }
                (None, None) => unreachable!(),
            }
        }
        if self.anchored {
            if libm::fabs(imbalance) > 1e-10 * scale {
                return Err(Error::Incompatible { imbalance, scale });
            }
            // Also removes the roundoff of the body-force terms.
            let correction = rhs.iter().sum::<f64>() / n as f64;
            for v in rhs.iter_mut() {
                *v -= correction;
            }
            // Pin cell 0 symmetrically; the mean is restored afterwards.
            triplets.retain(|&(i, j, _)| i != 0 && j != 0);
            triplets.push((0, 0, 1.0));
            rhs[0] = 0.0;
        }
        let a = CsrMatrix::from_triplets(n, &triplets);
        let mut pr = match backend {
            Backend::Direct => solve_direct(&a, &rhs, 2)?,
            Backend::Cg { tol, max_iter } => pcg(&a, &rhs, tol, max_iter)?.x,
        };
        if self.anchored {
            let mean = pr.iter().sum::<f64>() / n as f64;
            for v in pr.iter_mut() {
                *v -= mean;
            }
        }
        let flux = self.recover_flux(p, beta, &trans, &pr);
        let origin = g.origin();
        let pressure = (0..n)
            .map(|c| {
                let x = g.cell_center(c);
                let phi: f64 = (0..g.dim()).map(|a| self.fbar[a] * (x[a] - origin[a])).sum();
                pr[c] + phi + self.shift
            })
            .collect();
        Ok(LinearSolution { flux, pressure: CellField::new(g, pressure)? })
    }

    fn recover_flux(&self, p: &DiscreteProblem, _beta: &Coefficient, trans: &[f64], pr: &[f64]) -> FaceField {
        let values = self
            .faces
            .iter()
            .enumerate()
            .map(|(f, fi)| match (fi.lower, fi.upper) {
                (Some(l), Some(r)) => trans[f] * (pr[l] - pr[r] + self.gravity[f]),
                (Some(c), None) | (None, Some(c)) => {
                    let s = if fi.upper.is_none() { 1.0 } else { -1.0 };
                    match p.boundary.face(f) {
                        Some(BoundaryCondition::Pressure(_)) => {
                            let out = trans[f] * (pr[c] - self.reduced_p0[f] + s * self.gravity[f]);
                            s * out
                        }
                        Some(BoundaryCondition::Flux(u0)) => s * u0,
                        None => unreachable!(),
                    }
                }
                (None, None) => unreachable!(),
            })
            .collect();
        FaceField::new(&p.grid, values).expect("face count matches grid")
    }
}

/// Solves the problem with a frozen multiplier field `β ≥ 1`.
pub fn solve_linear(problem: &DiscreteProblem, beta: &Coefficient, backend: Backend) -> Result<LinearSolution> {
    check_beta(problem, beta)?;
    Prepared::new(problem)?.solve(problem, beta, backend)
}

fn check_beta(problem: &DiscreteProblem, beta: &Coefficient) -> Result<()> {
    let ok = |b: f64| b.is_finite() && b >= 1.0 - 1e-8;
    let good = match beta {
        Coefficient::Uniform(b) => ok(*b),
        Coefficient::PerCell(v) => {
            if v.len() != problem.grid.n_cells() {
                return Err(Error::GridMismatch { expected: problem.grid.n_cells(), found: v.len() });
            }
            v.iter().all(|&b| ok(b))
        }
    };
    if good {
        Ok(())
    } else {
        Err(invalid("multiplier field must be finite and at least 1"))
    }
}

/// Stopping and relaxation parameters of the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointControls {
    /// Tolerance on `‖u^{k+1} - u^k‖₂ / max(‖u^k‖₂, atol)`.
    pub tol: f64,
    /// Absolute floor of the denominator; `None` uses `1e-14` times the
    /// largest face flux of the Darcy iterate.
    pub atol: Option<f64>,
    pub max_iter: usize,
    /// Initial relaxation `ω ∈ (0, 1]`.
    pub relaxation: f64,
    /// Relaxation used after three consecutive increment increases.
    pub fallback_relaxation: f64,
    pub backend: Backend,
}

impl Default for FixedPointControls {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            atol: None,
            max_iter: 200,
            relaxation: 1.0,
            fallback_relaxation: 0.5,
            backend: Backend::Direct,
        }
    }
}

impl FixedPointControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(invalid("fixed-point tolerance and iteration cap must be positive"));
        }
        for w in [self.relaxation, self.fallback_relaxation] {
            if !(w > 0.0 && w <= 1.0) {
                return Err(invalid("relaxation must lie in (0, 1]"));
            }
        }
        if let Some(a) = self.atol {
            if !(a > 0.0) {
                return Err(invalid("atol must be positive"));
            }
        }
        Ok(())
    }
}

/// Result of [`solve_nonlinear`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub flux: FaceField,
    pub pressure: CellField<f64>,
    /// Number of fixed-point steps after the Darcy start.
    pub iterations: usize,
    /// Relative increment of every step.
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// Relaxation in effect at the end.
    pub relaxation: f64,
    /// Diagnostics such as a relaxation fallback or an increasing residual.
    pub warnings: Vec<String>,
}

/// Explicit fixed-point iteration starting from the Darcy solution.
///
/// Exceeding `max_iter` is reported through `converged = false`, not as an error.
pub fn solve_nonlinear(problem: &DiscreteProblem, controls: &FixedPointControls) -> Result<SolveReport> {
    controls.validate()?;
    let prep = Prepared::new(problem)?;
    let darcy = prep.solve(problem, &Coefficient::Uniform(1.0), controls.backend)?;
    let mut u = darcy.flux.into_values();
    let mut pressure = darcy.pressure;
    let umax = u.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
    let atol = controls.atol.unwrap_or(1e-14 * umax).max(f64::MIN_POSITIVE);
    let mut omega = controls.relaxation;
    let mut residuals = Vec::new();
    let mut warnings = Vec::new();
    let mut increases = 0usize;
    let mut converged = false;
    for _ in 0..controls.max_iter {
        let beta = problem.multiplier_field(&FaceField::new(&problem.grid, u.clone())?)?;
        let beta = Coefficient::PerCell(beta);
        check_beta(problem, &beta)?;
        let next = prep.solve(problem, &beta, controls.backend)?;
        pressure = next.pressure;
        let new_u = next.flux.into_values();
        let mut diff2 = 0.0;
        let unorm = norm(&u);
        for (ui, ni) in u.iter_mut().zip(&new_u) {
            let relaxed = omega * ni + (1.0 - omega) * *ui;
            diff2 += (relaxed - *ui) * (relaxed - *ui);
            *ui = relaxed;
        }
        let inc = libm::sqrt(diff2) / unorm.max(atol);
        if let Some(&last) = residuals.last() {
            if inc > last {
                increases += 1;
                if residuals.len() >= 3 {
                    warnings.push(alloc::format!(
                        "fixed-point increment grew at step {} ({:e} > {:e})",
                        residuals.len() + 1,
                        inc,
                        last
                    ));
                }
            } else {
                increases = 0;
            }
        }
        residuals.push(inc);
        if inc <= controls.tol {
            converged = true;
            break;
        }
        if increases >= 3 && omega > controls.fallback_relaxation {
            omega = controls.fallback_relaxation;
            increases = 0;
            warnings.push(alloc::format!(
                "relaxation reduced to {omega} after three increasing increments"
            ));
        }
    }
    Ok(SolveReport {
        flux: FaceField::new(&problem.grid, u)?,
        pressure,
        iterations: residuals.len(),
        residuals,
        converged,
        relaxation: omega,
        warnings,
    })
}

/// Largest per-cell mass-balance defect `|div u - q|`.
pub fn mass_balance_defect(problem: &DiscreteProblem, flux: &FaceField) -> Result<f64> {
    let div = crate::grid::divergence(&problem.grid, flux)?;
    Ok(div
        .values()
        .iter()
        .zip(problem.sources.values())
        .map(|(d, q)| libm::fabs(d - q))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::Medium;

    fn column(nx: usize, k: f64) -> (CartGrid, Medium, FluidProps) {
        let grid = CartGrid::new_2d(nx, 1, 0.1, 1.0, 1.0).unwrap();
        let medium = Medium::isotropic(vec![k; nx], vec![0.3; nx]).unwrap();
        (grid, medium, FluidProps::new(1e-3, 1000.0).unwrap())
    }

    fn problem(grid: CartGrid, medium: Medium, fluid: FluidProps, law: LawSpec, boundary: BoundarySpec) -> DiscreteProblem {
        DiscreteProblem {
            sources: CellField::constant(&grid, 0.0),
            body_force: CellField::constant(&grid, [0.0; 3]),
            grid,
            medium,
            fluid,
            model: FlowModel::Law(law),
            boundary,
        }
    }

    #[test]
    fn darcy_column_is_exact() {
        let (grid, medium, fluid) = column(10, 1e-9);
        let bc = BoundarySpec::from_sides(&grid, |s| match s {
            Side::XMin => BoundaryCondition::Pressure(2e5),
            Side::XMax => BoundaryCondition::Pressure(1e5),
            _ => BoundaryCondition::Flux(0.0),
        });
        let p = problem(grid.clone(), medium, fluid, LawSpec::Darcy, bc);
        let sol = solve_linear(&p, &Coefficient::Uniform(1.0), Backend::Direct).unwrap();
        let drag = fluid.nu / 1e-9;
        let u = 1e5 / (drag * 1.0);
        for f in 0..grid.n_faces_axis(0) {
            assert!((sol.flux[f] - u).abs() <= 1e-10 * u);
        }
        for c in 0..10 {
            let x = grid.cell_center(c)[0];
            let exact = 2e5 - 1e5 * x;
            assert!((sol.pressure[c] - exact).abs() <= 1e-10 * exact);
        }
    }

    #[test]
    fn null_flow_with_anchor() {
        let grid = CartGrid::new_2d(4, 3, 1.0, 1.0, 1.0).unwrap();
        let medium = Medium::isotropic(vec![1e-10; 12], vec![0.3; 12]).unwrap();
        let fluid = FluidProps::new(1e-3, 1000.0).unwrap();
        let bc = BoundarySpec::sealed(&grid).with_mean_pressure(5.0);
        let p = problem(grid, medium, fluid, LawSpec::Darcy, bc);
        let sol = solve_linear(&p, &Coefficient::Uniform(1.0), Backend::Direct).unwrap();
        assert!(sol.flux.values().iter().all(|&u| u == 0.0));
        assert!(sol.pressure.values().iter().all(|&v| (v - 5.0).abs() < 1e-12));
    }

    #[test]
    fn sealed_without_anchor_is_rejected() {
        let grid = CartGrid::new_2d(2, 2, 1.0, 1.0, 1.0).unwrap();
        let medium = Medium::isotropic(vec![1e-10; 4], vec![0.3; 4]).unwrap();
        let fluid = FluidProps::new(1e-3, 1000.0).unwrap();
        let p = problem(grid.clone(), medium, fluid, LawSpec::Darcy, BoundarySpec::sealed(&grid));
        assert_eq!(
            solve_linear(&p, &Coefficient::Uniform(1.0), Backend::Direct).unwrap_err(),
            Error::PressureAnchorRequired
        );
    }

    #[test]
    fn incompatible_sources_rejected() {
        let grid = CartGrid::new_2d(2, 2, 1.0, 1.0, 1.0).unwrap();
        let medium = Medium::isotropic(vec![1e-10; 4], vec![0.3; 4]).unwrap();
        let fluid = FluidProps::new(1e-3, 1000.0).unwrap();
        let mut p = problem(grid.clone(), medium, fluid, LawSpec::Darcy, BoundarySpec::sealed(&grid).with_mean_pressure(0.0));
        p.sources[0] = 1.0;
        assert!(matches!(
            solve_linear(&p, &Coefficient::Uniform(1.0), Backend::Direct),
            Err(Error::Incompatible { .. })
        ));
    }

    #[test]
    fn uniform_beta_representation_is_irrelevant() {
        let (grid, medium, fluid) = column(6, 1e-9);
        let bc = BoundarySpec::from_sides(&grid, |s| match s {
            Side::XMin => BoundaryCondition::Flux(-0.5),
            Side::XMax => BoundaryCondition::Pressure(0.0),
            _ => BoundaryCondition::Flux(0.0),
        });
        let p = problem(grid, medium, fluid, LawSpec::Darcy, bc);
        let a = solve_linear(&p, &Coefficient::Uniform(1.7), Backend::Direct).unwrap();
        let b = solve_linear(&p, &Coefficient::PerCell(vec![1.7; 6]), Backend::Direct).unwrap();
        assert_eq!(a, b);
        assert!(solve_linear(&p, &Coefficient::Uniform(0.5), Backend::Direct).is_err());
    }

    #[test]
    fn linear_law_converges_in_one_step() {
        let (grid, medium, fluid) = column(6, 1e-9);
        let bc = BoundarySpec::from_sides(&grid, |s| match s {
            Side::XMin => BoundaryCondition::Flux(-0.5),
            Side::XMax => BoundaryCondition::Pressure(0.0),
            _ => BoundaryCondition::Flux(0.0),
        });
        let p = problem(grid, medium, fluid, LawSpec::darcy_forchheimer(0.0), bc);
        let report = solve_nonlinear(&p, &FixedPointControls::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
    }

    #[test]
    fn cg_backend_matches_direct() {
        let grid = CartGrid::new_2d(8, 6, 1.0, 1.0, 1.0).unwrap();
        let k: Vec<f64> = (0..48).map(|i| 1e-10 * (1.0 + (i % 5) as f64)).collect();
        let medium = Medium::isotropic(k, vec![0.3; 48]).unwrap();
        let fluid = FluidProps::new(1e-3, 1000.0).unwrap();
        let bc = BoundarySpec::from_sides(&grid, |s| match s {
            Side::YMax => BoundaryCondition::Flux(-1e-3),
            Side::YMin => BoundaryCondition::Pressure(1e5),
            _ => BoundaryCondition::Flux(0.0),
        });
        let p = problem(grid, medium, fluid, LawSpec::Darcy, bc);
        let a = solve_linear(&p, &Coefficient::Uniform(1.0), Backend::Direct).unwrap();
        let b = solve_linear(&p, &Coefficient::Uniform(1.0), Backend::Cg { tol: 1e-14, max_iter: 1000 }).unwrap();
        for (x, y) in a.flux.values().iter().zip(b.flux.values()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
