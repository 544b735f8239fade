//! Seepage laws, dimensionless numbers, local errors and flux thresholds.
//!
//! Every law has the form `-∇p + f = α(x, ‖u‖) 𝕕 u` with drag `𝕕 = ν/𝕜`
//! (per axis for diagonal permeability) and a dimensionless multiplier
//! `α = 1 + η` that is evaluated as a function of the Reynolds number
//! `Re = (ℓ/μ) ‖u‖`, where `ℓ = √𝕜` for scalar permeability and
//! `ℓ = det(K)^{1/6}` for a diagonal tensor.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::special::Truncation;

/// Largest `c·Re` accepted by exponential laws; `exp(709)` overflows.
pub const EXP_RANGE_CAP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidProps {
    /// Dynamic viscosity [Pa·s].
    pub mu: f64,
    /// Density [kg/m³].
    pub rho: f64,
    /// Kinematic viscosity `mu / rho` [m²/s].
    pub nu: f64,
}

impl FluidProps {
    pub fn new(mu: f64, rho: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) || !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid("fluid viscosity and density must be positive"));
        }
        Ok(Self { mu, rho, nu: mu / rho })
    }
}

/// Permeability (diagonal tensor) and porosity at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumPoint {
    pub k: [f64; 3],
    pub phi: f64,
}

impl MediumPoint {
    pub fn new(k: [f64; 3], phi: f64) -> Result<Self> {
        if k.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("permeability components must be positive"));
        }
        if !(phi > 0.0 && phi < 1.0) {
            return Err(invalid("porosity must lie in (0, 1)"));
        }
        Ok(Self { k, phi })
    }

    pub fn isotropic(k: f64, phi: f64) -> Result<Self> {
        Self::new([k; 3], phi)
    }

    pub fn is_isotropic(&self) -> bool {
        self.k[0] == self.k[1] && self.k[1] == self.k[2]
    }

    /// Length scale of the Reynolds number: `√k`, or `det(K)^{1/6}` when
    /// the tensor is anisotropic.
    pub fn reynolds_length(&self) -> f64 {
        if self.is_isotropic() {
            libm::sqrt(self.k[0])
        } else {
            libm::sqrt(libm::cbrt(self.k[0] * self.k[1] * self.k[2]))
        }
    }

    /// Drag `ν / k_axis`.
    pub fn drag(&self, axis: usize, fluid: &FluidProps) -> f64 {
        fluid.nu / self.k[axis]
    }
}

/// Cell-wise permeability and porosity.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    k: Vec<[f64; 3]>,
    phi: Vec<f64>,
}

impl Medium {
    pub fn new(k: Vec<[f64; 3]>, phi: Vec<f64>) -> Result<Self> {
        if k.len() != phi.len() {
            return Err(Error::GridMismatch { expected: k.len(), found: phi.len() });
        }
        for (kc, &p) in k.iter().zip(&phi) {
            MediumPoint::new(*kc, p)?;
        }
        Ok(Self { k, phi })
    }

    pub fn isotropic(k: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        Self::new(k.into_iter().map(|v| [v; 3]).collect(), phi)
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn point(&self, cell: usize) -> MediumPoint {
        MediumPoint { k: self.k[cell], phi: self.phi[cell] }
    }

    pub fn permeability(&self) -> &[[f64; 3]] {
        &self.k
    }

    pub fn porosity(&self) -> &[f64] {
        &self.phi
    }
}

/// A coefficient field given either as one value broadcast to every cell or
/// as one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Uniform(f64),
    PerCell(Vec<f64>),
}

impl Coefficient {
    #[inline]
    pub fn at(&self, cell: usize) -> f64 {
        match self {
            Coefficient::Uniform(v) => *v,
            Coefficient::PerCell(v) => v[cell],
        }
    }

    fn validate(&self, n_cells: usize, what: &str) -> Result<()> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        match self {
            Coefficient::Uniform(v) if !ok(*v) => {
                Err(invalid(alloc::format!("{what} must be finite and nonnegative")))
            }
            Coefficient::PerCell(v) if v.len() != n_cells => {
                Err(Error::GridMismatch { expected: n_cells, found: v.len() })
            }
            Coefficient::PerCell(v) if !v.iter().all(|&x| ok(x)) => {
                Err(invalid(alloc::format!("{what} must be finite and nonnegative")))
            }
            _ => Ok(()),
        }
    }
}

impl From<f64> for Coefficient {
    fn from(v: f64) -> Self {
        Coefficient::Uniform(v)
    }
}

impl From<Vec<f64>> for Coefficient {
    fn from(v: Vec<f64>) -> Self {
        Coefficient::PerCell(v)
    }
}

/// One constitutive law.
#[derive(Debug, Clone, PartialEq)]
pub enum LawSpec {
    /// `α ≡ 1`.
    Darcy,
    /// `α = 1 + c_F Re^m`, any real `m > 0`.
    SinglePower { exponent: f64, cf: Coefficient },
    /// `α = 1 + Σ_i c_i Re^i` over distinct indices `i ≥ 1`.
    PowerExpansion { terms: Vec<(u32, Coefficient)> },
    /// `α = G_m(c Re) exp(c Re) = Σ_{j≤m} (c Re)^j / j!`.
    Exponential { c: Coefficient, truncation: Truncation },
}

impl LawSpec {
    pub fn darcy_forchheimer(cf: impl Into<Coefficient>) -> Self {
        LawSpec::SinglePower { exponent: 1.0, cf: cf.into() }
    }

    pub fn single_power(exponent: f64, cf: impl Into<Coefficient>) -> Self {
        LawSpec::SinglePower { exponent, cf: cf.into() }
    }

    pub fn validate(&self, n_cells: usize) -> Result<()> {
        match self {
            LawSpec::Darcy => Ok(()),
            LawSpec::SinglePower { exponent, cf } => {
                if !(*exponent > 0.0 && exponent.is_finite()) {
                    return Err(invalid("single-power exponent must be positive"));
                }
                cf.validate(n_cells, "Forchheimer coefficient")
            }
            LawSpec::PowerExpansion { terms } => {
                for (pos, (i, c)) in terms.iter().enumerate() {
                    if *i == 0 {
                        return Err(invalid("power-expansion indices start at 1"));
                    }
                    if terms[..pos].iter().any(|(j, _)| j == i) {
                        return Err(invalid("power-expansion indices must be distinct"));
                    }
                    c.validate(n_cells, "inertial coefficient")?;
                }
                Ok(())
            }
            LawSpec::Exponential { c, .. } => c.validate(n_cells, "exponential coefficient"),
        }
    }

    /// True when the law reduces to Darcy in `cell`.
    pub fn is_linear_at(&self, cell: usize) -> bool {
        match self {
            LawSpec::Darcy => true,
            LawSpec::SinglePower { cf, .. } => cf.at(cell) == 0.0,
            LawSpec::PowerExpansion { terms } => terms.iter().all(|(_, c)| c.at(cell) == 0.0),
            LawSpec::Exponential { c, truncation } => {
                c.at(cell) == 0.0 || *truncation == Truncation::Finite(0)
            }
        }
    }

    /// Inertial correction `η = α - 1` at Reynolds number `re`.
    pub fn excess(&self, cell: usize, re: f64) -> Result<f64> {
        Ok(match self {
            LawSpec::Darcy => 0.0,
            LawSpec::SinglePower { exponent, cf } => cf.at(cell) * libm::pow(re, *exponent),
            LawSpec::PowerExpansion { terms } => terms
                .iter()
                .map(|(i, c)| c.at(cell) * libm::pow(re, f64::from(*i)))
                .sum(),
            LawSpec::Exponential { c, truncation } => {
                let b = c.at(cell) * re;
                if b > EXP_RANGE_CAP {
                    return Err(Error::Range { value: b, cap: EXP_RANGE_CAP });
                }
                match truncation {
                    Truncation::Infinite => libm::expm1(b),
                    Truncation::Finite(m) => {
                        let mut term = 1.0;
                        let mut sum = 0.0;
                        for j in 1..=*m {
                            term *= b / f64::from(j);
                            sum += term;
                        }
                        sum
                    }
                }
            }
        })
    }

    /// Multiplier `α = 1 + η` at Reynolds number `re`.
    pub fn alpha(&self, cell: usize, re: f64) -> Result<f64> {
        Ok(1.0 + self.excess(cell, re)?)
    }
}

pub fn reynolds(u_mag: f64, medium: &MediumPoint, fluid: &FluidProps) -> f64 {
    medium.reynolds_length() / fluid.mu * u_mag
}

/// Dimensionless drag multiplier `α` of `law` in `cell` at flux magnitude `u_mag`.
pub fn multiplier(
    law: &LawSpec,
    cell: usize,
    u_mag: f64,
    medium: &MediumPoint,
    fluid: &FluidProps,
) -> Result<f64> {
    law.alpha(cell, reynolds(u_mag, medium, fluid))
}

/// `m`th Forchheimer number `c_F^{1/m} Re`.
pub fn forchheimer_number(
    u_mag: f64,
    m: f64,
    cf: f64,
    medium: &MediumPoint,
    fluid: &FluidProps,
) -> f64 {
    libm::pow(cf, 1.0 / m) * reynolds(u_mag, medium, fluid)
}

/// Local relative error of the `slow` law with respect to the reference
/// `fast` law: `|α - α̂| / α̂`.
pub fn local_error(
    slow: &LawSpec,
    fast: &LawSpec,
    cell: usize,
    u_mag: f64,
    medium: &MediumPoint,
    fluid: &FluidProps,
) -> Result<f64> {
    let re = reynolds(u_mag, medium, fluid);
    let eta_slow = slow.excess(cell, re)?;
    let eta_fast = fast.excess(cell, re)?;
    Ok(libm::fabs(eta_slow - eta_fast) / (1.0 + eta_fast))
}

/// Per-cell flux levels `w_δ` at which the Darcy error reaches `δ`, and
/// their minimum `ū_δ` over the cells where `w_δ` is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdField {
    pub w: Vec<f64>,
    pub u_bar: f64,
}

/// Threshold field of a Darcy slow law against the reference `fast` law.
///
/// Closed forms are used for single-power and full exponential laws; other
/// laws are inverted per cell by bisection on `η(Re) = δ/(1-δ)`. Cells where
/// `fast` is linear get `w_δ = +∞`.
pub fn threshold_field(
    fast: &LawSpec,
    delta: f64,
    medium: &Medium,
    fluid: &FluidProps,
) -> Result<ThresholdField> {
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid("error tolerance delta must lie in [0, 1)"));
    }
    fast.validate(medium.len())?;
    let target = delta / (1.0 - delta);
    let mut w = vec![f64::INFINITY; medium.len()];
    for (cell, wc) in w.iter_mut().enumerate() {
        if fast.is_linear_at(cell) {
            continue;
        }
        let scale = fluid.mu / medium.point(cell).reynolds_length();
        let re_crit = match fast {
            LawSpec::Darcy => unreachable!(),
            LawSpec::SinglePower { exponent, cf } => {
                libm::pow(target, 1.0 / exponent) / libm::pow(cf.at(cell), 1.0 / exponent)
            }
            LawSpec::Exponential { c, truncation: Truncation::Infinite } => {
                -libm::log1p(-delta) / c.at(cell)
            }
            _ => invert_excess(fast, cell, target)?,
        };
        *wc = re_crit * scale;
    }
    let u_bar = w.iter().copied().fold(f64::INFINITY, f64::min);
    if !u_bar.is_finite() {
        return Err(Error::ThresholdUndefined);
    }
    Ok(ThresholdField { w, u_bar })
}

/// Smallest `re` with `law.excess(cell, re) = target`, by bracketing and bisection.
fn invert_excess(law: &LawSpec, cell: usize, target: f64) -> Result<f64> {
    if target == 0.0 {
        return Ok(0.0);
    }
    let eval = |re: f64| match law.excess(cell, re) {
        Ok(v) => Ok(v),
        Err(Error::Range { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while eval(hi)? < target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Ok(f64::INFINITY);
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Regularization width of the adaptive model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    /// Width in flux-magnitude units [kg/(m²·s)].
    Absolute(f64),
    /// Width as a fraction of the flux threshold `ū_δ`.
    Relative(f64),
}

impl Default for Epsilon {
    fn default() -> Self {
        Epsilon::Absolute(0.1)
    }
}

/// Slow (Darcy) / fast law pair with tolerance, threshold and smoothing width.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveSpec {
    pub slow: LawSpec,
    pub fast: LawSpec,
    pub delta: f64,
    /// Absolute regularization width [kg/(m²·s)].
    pub epsilon: f64,
    /// Flux threshold `ū_δ`.
    pub u_bar: f64,
    /// Critical Forchheimer number (single-power fast law only).
    pub fo_crit: Option<f64>,
}

impl AdaptiveSpec {
    pub fn new(
        fast: LawSpec,
        delta: f64,
        epsilon: Epsilon,
        medium: &Medium,
        fluid: &FluidProps,
    ) -> Result<Self> {
        let threshold = threshold_field(&fast, delta, medium, fluid)?;
        let eps = match epsilon {
            Epsilon::Absolute(e) => e,
            Epsilon::Relative(r) => {
                if threshold.u_bar <= 0.0 {
                    return Err(invalid("relative epsilon needs a positive flux threshold"));
                }
                r * threshold.u_bar
            }
        };
        Self::with_threshold(LawSpec::Darcy, fast, delta, threshold.u_bar, eps)
    }

    /// Builds a pair with an explicitly given threshold instead of deriving
    /// it from the medium.
    pub fn with_threshold(
        slow: LawSpec,
        fast: LawSpec,
        delta: f64,
        u_bar: f64,
        epsilon: f64,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(invalid("error tolerance delta must lie in [0, 1)"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid("regularization width epsilon must be positive"));
        }
        if !(u_bar >= 0.0) {
            return Err(invalid("flux threshold must be nonnegative"));
        }
        let fo_crit = match &fast {
            LawSpec::SinglePower { exponent, .. } => {
                Some(libm::pow(delta / (1.0 - delta), 1.0 / exponent))
            }
            _ => None,
        };
        Ok(Self { slow, fast, delta, epsilon, u_bar, fo_crit })
    }
}
