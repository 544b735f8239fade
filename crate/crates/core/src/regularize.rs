//! Dissipation potentials and the Gaussian-regularized adaptive multiplier.
//!
//! A law with multiplier `α(a)` has potential `Ψ(s) = ∫₀^s α(√σ) dσ`, so that
//! `Ψ'(‖u‖²) 𝕕 u` is its drag force. The adaptive model selects `Ψ_slow` below
//! the flux threshold `ū` and `Ψ_fast` above it; [`SmoothedMultiplier`]
//! replaces the discontinuous selection by a Gaussian-smoothed one and returns
//! `β_ε(a) = H̃'(a) / (2a)` for the smoothed profile `H̃`.

use alloc::vec::Vec;

use crate::constitutive::{AdaptiveSpec, FluidProps, LawSpec, MediumPoint, EXP_RANGE_CAP};
use crate::error::{Error, Result};
use crate::special::{GaussLegendre, Truncation};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Half-width of the smoothing window in units of `ε`.
pub const WINDOW: f64 = 6.0;

/// Distance from `ū` (in units of `ε`) beyond which the selection-smoothed
/// multiplier equals the branch law exactly.
pub const SELECTION_CUTOFF: f64 = 8.0;

/// `Ψ(s)` of `law` in `cell`.
pub fn potential_value(
    law: &LawSpec,
    cell: usize,
    s: f64,
    medium: &MediumPoint,
    fluid: &FluidProps,
) -> Result<f64> {
    Ok(s + excess_potential(law, cell, s, medium, fluid)?)
}

/// `Ψ(s) - s = ∫₀^s η(√σ) dσ`, the inertial part of the potential.
pub fn excess_potential(
    law: &LawSpec,
    cell: usize,
    s: f64,
    medium: &MediumPoint,
    fluid: &FluidProps,
) -> Result<f64> {
    debug_assert!(s >= 0.0);
    let a = libm::sqrt(s);
    let l = medium.reynolds_length() / fluid.mu;
    Ok(match law {
        LawSpec::Darcy => 0.0,
        LawSpec::SinglePower { exponent, cf } => {
            let m = *exponent;
            2.0 * cf.at(cell) * libm::pow(l, m) * libm::pow(a, m + 2.0) / (m + 2.0)
        }
        LawSpec::PowerExpansion { terms } => terms
            .iter()
            .map(|(i, c)| {
                let m = f64::from(*i);
                2.0 * c.at(cell) * libm::pow(l, m) * libm::pow(a, m + 2.0) / (m + 2.0)
            })
            .sum(),
        LawSpec::Exponential { c, truncation } => {
            let kappa = c.at(cell) * l;
            let b = kappa * a;
            if b > EXP_RANGE_CAP {
                return Err(Error::Range { value: b, cap: EXP_RANGE_CAP });
            }
            match truncation {
                // ∫₀^a 2t Σ_{j=1}^m (κt)^j/j! dt
                Truncation::Finite(m) => {
                    let mut term = 1.0;
                    let mut sum = 0.0;
                    for j in 1..=*m {
                        let jf = f64::from(j);
                        term *= b / jf;
                        sum += 2.0 * term / (jf + 2.0);
                    }
                    sum * s
                }
                Truncation::Infinite => exp_excess_quadrature(kappa, a),
            }
        }
    })
}

/// `∫₀^a 2t (e^{κt} - 1) dt` by composite 16-point Gauss–Legendre with panels
/// no longer than `1/κ`.
fn exp_excess_quadrature(kappa: f64, a: f64) -> f64 {
    if a == 0.0 || kappa == 0.0 {
        return 0.0;
    }
    let rule = gl16();
    let panels = libm::ceil(kappa * a).max(1.0) as usize;
    let width = a / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = width * p as f64;
            rule.integrate(lo, lo + width, |t| 2.0 * t * libm::expm1(kappa * t))
        })
        .sum()
}

fn gl16() -> GaussLegendre {
    GaussLegendre::new(16)
}

/// Unsmoothed adaptive profile `H(a)`: `Ψ_slow(a²)` below `ū`, `Ψ_fast(a²)`
/// at and above it.
pub fn raw_mixture(
    adaptive: &AdaptiveSpec,
    cell: usize,
    a: f64,
    medium: &MediumPoint,
    fluid: &FluidProps,
) -> Result<f64> {
    let a = libm::fabs(a);
    let law = if a < adaptive.u_bar { &adaptive.slow } else { &adaptive.fast };
    potential_value(law, cell, a * a, medium, fluid)
}

/// Pointwise-selected multiplier of the unregularized adaptive model.
pub fn raw_multiplier(
    adaptive: &AdaptiveSpec,
    cell: usize,
    a: f64,
    medium: &MediumPoint,
    fluid: &FluidProps,
) -> Result<f64> {
    let law = if a < adaptive.u_bar { &adaptive.slow } else { &adaptive.fast };
    crate::constitutive::multiplier(law, cell, a, medium, fluid)
}

/// Which part of the adaptive profile is mollified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// Smooth the slow/fast selection indicator and keep both potentials
    /// exact: `H̃ = Ψ_slow + (𝟙_{|·|>ū} * G_ε)(Ψ_fast - Ψ_slow)`. The result
    /// equals the branch law exactly farther than [`SELECTION_CUTOFF`]·ε from `ū`.
    #[default]
    Selection,
    /// Convolve the whole even profile `H` with `G_ε` by kink-aware
    /// Gauss–Legendre quadrature on `[a - 6ε, a + 6ε]`.
    Profile,
}

/// Regularized multiplier `β_ε` of an adaptive law pair.
#[derive(Debug, Clone)]
pub struct SmoothedMultiplier {
    adaptive: AdaptiveSpec,
    smoothing: Smoothing,
    rule: GaussLegendre,
}

impl SmoothedMultiplier {
    pub fn new(adaptive: AdaptiveSpec, smoothing: Smoothing) -> Self {
        Self { adaptive, smoothing, rule: GaussLegendre::new(64) }
    }

    pub fn adaptive(&self) -> &AdaptiveSpec {
        &self.adaptive
    }

    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }

    /// `β_ε(a)` in `cell`.
    pub fn eval(
        &self,
        cell: usize,
        a: f64,
        medium: &MediumPoint,
        fluid: &FluidProps,
    ) -> Result<f64> {
        let a = libm::fabs(a);
        let value = match self.smoothing {
            Smoothing::Selection => self.eval_selection(cell, a, medium, fluid)?,
            Smoothing::Profile => self.eval_profile(cell, a, medium, fluid)?,
        };
        if !value.is_finite() {
            return Err(Error::Quadrature { flux: a, epsilon: self.adaptive.epsilon });
        }
        Ok(value)
    }

    fn eval_selection(
        &self,
        cell: usize,
        a: f64,
        medium: &MediumPoint,
        fluid: &FluidProps,
    ) -> Result<f64> {
        let ad = &self.adaptive;
        let (ubar, eps) = (ad.u_bar, ad.epsilon);
        let mult = |law: &LawSpec| crate::constitutive::multiplier(law, cell, a, medium, fluid);
        if ubar == 0.0 || a >= ubar + SELECTION_CUTOFF * eps {
            return mult(&ad.fast);
        }
        if a <= ubar - SELECTION_CUTOFF * eps {
            return mult(&ad.slow);
        }
        let scale = core::f64::consts::SQRT_2 * eps;
        let x1 = (ubar - a) / scale;
        let x2 = (ubar + a) / scale;
        let w_slow = 0.5 * (libm::erf(x1) + libm::erf(x2));
        let w_fast = 0.5 * (libm::erfc(x1) + libm::erfc(x2));
        let alpha_s = mult(&ad.slow)?;
        let alpha_f = mult(&ad.fast)?;
        let mut beta = w_slow * alpha_s + w_fast * alpha_f;
        if a > 0.0 {
            let dchi = gauss(a - ubar, eps) - gauss(a + ubar, eps);
            let s = a * a;
            let gap = excess_potential(&ad.fast, cell, s, medium, fluid)?
                - excess_potential(&ad.slow, cell, s, medium, fluid)?;
            beta += dchi * gap / (2.0 * a);
        }
        Ok(beta)
    }

    fn eval_profile(
        &self,
        cell: usize,
        a: f64,
        medium: &MediumPoint,
        fluid: &FluidProps,
    ) -> Result<f64> {
        let eps = self.adaptive.epsilon;
        // Below this the ratio is evaluated at a small positive flux, which
        // approximates the even limit H_ε''(0)/2.
        let a = if a < eps * 1e-6 { eps * 1e-3 } else { a };
        let lo = a - WINDOW * eps;
        let hi = a + WINDOW * eps;
        let ubar = self.adaptive.u_bar;
        let mut cuts: Vec<f64> = Vec::with_capacity(6);
        cuts.push(lo);
        for c in [-ubar, 0.0, ubar, a] {
            if c > lo && c < hi {
                cuts.push(c);
            }
        }
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut num = 0.0;
        let mut den = 0.0;
        for w in cuts.windows(2) {
            num += self.rule.try_integrate(w[0], w[1], |tau| -> Result<f64> {
                let h = raw_mixture(&self.adaptive, cell, tau, medium, fluid)?;
                Ok(h * gauss_derivative(a - tau, eps))
            })?;
            den += self
                .rule
                .integrate(w[0], w[1], |tau| tau * tau * gauss_derivative(a - tau, eps));
        }
        if !(den > 0.0) {
            return Err(Error::Quadrature { flux: a, epsilon: eps });
        }
        Ok(num / den)
    }
}

/// Centered Gaussian density with standard deviation `eps`.
fn gauss(t: f64, eps: f64) -> f64 {
    let z = t / eps;
    INV_SQRT_2PI / eps * libm::exp(-0.5 * z * z)
}

fn gauss_derivative(t: f64, eps: f64) -> f64 {
    -t / (eps * eps) * gauss(t, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{multiplier, AdaptiveSpec};

    fn unit_context() -> (MediumPoint, FluidProps) {
        // ℓ/μ = 1e-6 / 1e-3 ... chosen so that √k/μ = 1.
        let medium = MediumPoint::isotropic(1e-6, 0.3).unwrap();
        let fluid = FluidProps::new(1e-3, 1000.0).unwrap();
        (medium, fluid)
    }

    fn unit_pair(epsilon: f64) -> AdaptiveSpec {
        AdaptiveSpec::with_threshold(LawSpec::Darcy, LawSpec::darcy_forchheimer(1.0), 0.5, 1.0, epsilon)
            .unwrap()
    }

    #[test]
    fn potential_examples() {
        let (m, f) = unit_context();
        assert_eq!(potential_value(&LawSpec::Darcy, 0, 3.0, &m, &f).unwrap(), 3.0);
        let df = LawSpec::darcy_forchheimer(1.0);
        let v = potential_value(&df, 0, 1.0, &m, &f).unwrap();
        assert!((v - 5.0 / 3.0).abs() < 1e-14);
        for law in [
            LawSpec::Darcy,
            df,
            LawSpec::Exponential { c: 1.0.into(), truncation: Truncation::Infinite },
        ] {
            assert_eq!(potential_value(&law, 0, 0.0, &m, &f).unwrap(), 0.0);
        }
    }

    /// Composite Simpson on `∫₀^√s 2t α(t) dt` (the potential after `σ = t²`)
    /// as an independent oracle.
    fn potential_oracle(law: &LawSpec, s: f64, m: &MediumPoint, f: &FluidProps) -> f64 {
        let n = 20_000;
        let a = libm::sqrt(s);
        let h = a / n as f64;
        let g = |t: f64| 2.0 * t * multiplier(law, 0, t, m, f).unwrap();
        let mut acc = g(0.0) + g(a);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(h * i as f64);
        }
        acc * h / 3.0
    }

    fn sample_laws() -> Vec<LawSpec> {
        alloc::vec![
            LawSpec::Darcy,
            LawSpec::darcy_forchheimer(0.55),
            LawSpec::single_power(1.5, 0.3),
            LawSpec::PowerExpansion { terms: alloc::vec![(1, 0.2.into()), (3, 0.05.into())] },
            LawSpec::Exponential { c: 0.4.into(), truncation: Truncation::Finite(3) },
            LawSpec::Exponential { c: 0.4.into(), truncation: Truncation::Infinite },
        ]
    }

    #[test]
    fn potential_matches_quadrature_oracle() {
        let (m, f) = unit_context();
        for law in sample_laws() {
            for s in [0.01, 1.0, 30.0] {
                let got = potential_value(&law, 0, s, &m, &f).unwrap();
                let oracle = potential_oracle(&law, s, &m, &f);
                assert!((got - oracle).abs() <= 1e-9 * oracle, "{law:?} s={s}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn potential_derivative_is_multiplier() {
        let (m, f) = unit_context();
        for law in sample_laws() {
            for s in [0.01f64, 1.0, 100.0] {
                let h = 1e-5 * s.max(1.0);
                let d = (potential_value(&law, 0, s + h, &m, &f).unwrap()
                    - potential_value(&law, 0, s - h, &m, &f).unwrap())
                    / (2.0 * h);
                let alpha = multiplier(&law, 0, libm::sqrt(s), &m, &f).unwrap();
                assert!((d - alpha).abs() <= 1e-6 * alpha, "{law:?} s={s}");
            }
        }
    }

    #[test]
    fn raw_mixture_examples() {
        let (m, f) = unit_context();
        let pair = unit_pair(0.1);
        assert_eq!(raw_mixture(&pair, 0, 0.0, &m, &f).unwrap(), 0.0);
        assert_eq!(raw_mixture(&pair, 0, 0.5, &m, &f).unwrap(), 0.25);
        let v = raw_mixture(&pair, 0, 2.0, &m, &f).unwrap();
        assert!((v - (4.0 + 16.0 / 3.0)).abs() < 1e-13);
        // Fast branch at the threshold itself.
        let at = raw_mixture(&pair, 0, 1.0, &m, &f).unwrap();
        assert!((at - 5.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_pair_is_darcy() {
        let (m, f) = unit_context();
        let pair = AdaptiveSpec::with_threshold(LawSpec::Darcy, LawSpec::Darcy, 0.1, 1.0, 0.1).unwrap();
        for smoothing in [Smoothing::Selection, Smoothing::Profile] {
            let beta = SmoothedMultiplier::new(pair.clone(), smoothing);
            for a in [0.0, 1e-9, 0.3, 0.95, 1.0, 1.07, 4.0] {
                let v = beta.eval(0, a, &m, &f).unwrap();
                assert!((v - 1.0).abs() < 1e-8, "{smoothing:?} a={a}: {v}");
            }
        }
    }

    #[test]
    fn far_field_matches_branch_laws() {
        let (m, f) = unit_context();
        let eps = 0.05;
        let pair = unit_pair(eps);
        let above = 1.0 + 10.0 * eps;
        let below = 1.0 - 10.0 * eps;
        let fast = multiplier(&pair.fast, 0, above, &m, &f).unwrap();
        let sel = SmoothedMultiplier::new(pair.clone(), Smoothing::Selection);
        assert!((sel.eval(0, above, &m, &f).unwrap() - fast).abs() <= 1e-6);
        assert!((sel.eval(0, below, &m, &f).unwrap() - 1.0).abs() <= 1e-6);
        // Smoothing the whole profile a² + (2/3)a³ shifts the fast branch to
        // 1 + a + ε²/a.
        let prof = SmoothedMultiplier::new(pair.clone(), Smoothing::Profile);
        let shifted = 1.0 + above + eps * eps / above;
        assert!((prof.eval(0, above, &m, &f).unwrap() - shifted).abs() <= 1e-6);
        assert!((prof.eval(0, below, &m, &f).unwrap() - 1.0).abs() <= 1e-6);
        // Beyond the cutoff the selection variant is exactly the fast law.
        let above = 1.0 + 9.0 * eps;
        assert_eq!(
            sel.eval(0, above, &m, &f).unwrap(),
            multiplier(&pair.fast, 0, above, &m, &f).unwrap()
        );
    }

    #[test]
    fn zero_threshold_is_global_fast_law() {
        let (m, f) = unit_context();
        let pair =
            AdaptiveSpec::with_threshold(LawSpec::Darcy, LawSpec::darcy_forchheimer(1.0), 0.0, 0.0, 0.1)
                .unwrap();
        let beta = SmoothedMultiplier::new(pair.clone(), Smoothing::Selection);
        for a in [0.0, 0.01, 0.3, 2.0] {
            assert_eq!(
                beta.eval(0, a, &m, &f).unwrap(),
                multiplier(&pair.fast, 0, a, &m, &f).unwrap()
            );
        }
    }

    #[test]
    fn continuous_across_threshold() {
        let (m, f) = unit_context();
        let eps = 0.1;
        for smoothing in [Smoothing::Selection, Smoothing::Profile] {
            let beta = SmoothedMultiplier::new(unit_pair(eps), smoothing);
            let h = eps / 100.0;
            let mut prev = beta.eval(0, 1.0 - 10.0 * eps, &m, &f).unwrap();
            let mut a = 1.0 - 10.0 * eps;
            let mut max_jump: f64 = 0.0;
            while a < 1.0 + 10.0 * eps {
                a += h;
                let v = beta.eval(0, a, &m, &f).unwrap();
                max_jump = max_jump.max((v - prev).abs());
                prev = v;
            }
            // The raw law jumps by 1 at a = 1; a Lipschitz bound of 10/ε
            // keeps each step below 0.1.
            assert!(max_jump <= 10.0 / eps * h, "{smoothing:?}: {max_jump}");
        }
    }

    #[test]
    fn deviation_shrinks_with_epsilon() {
        let (m, f) = unit_context();
        for smoothing in [Smoothing::Selection, Smoothing::Profile] {
            let mut last = f64::INFINITY;
            for eps in [0.2, 0.1, 0.05, 0.025] {
                let beta = SmoothedMultiplier::new(unit_pair(eps), smoothing);
                let pair = beta.adaptive().clone();
                let dev = [0.8, 1.2]
                    .iter()
                    .map(|&a| {
                        let exact = raw_multiplier(&pair, 0, a, &m, &f).unwrap();
                        (beta.eval(0, a, &m, &f).unwrap() - exact).abs()
                    })
                    .fold(0.0, f64::max);
                assert!(dev <= last, "{smoothing:?} eps={eps}: {dev} > {last}");
                last = dev;
            }
            if smoothing == Smoothing::Selection {
                assert!(last < 1e-6);
            }
        }
    }

    #[test]
    fn small_flux_limit() {
        let (m, f) = unit_context();
        for smoothing in [Smoothing::Selection, Smoothing::Profile] {
            let beta = SmoothedMultiplier::new(unit_pair(0.1), smoothing);
            let v = beta.eval(0, 0.0, &m, &f).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "{smoothing:?}: {v}");
        }
    }
}
