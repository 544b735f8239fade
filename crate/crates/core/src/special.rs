//! Special functions used by the exponential seepage laws and the smoothing
//! quadrature.

use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Truncation index of an exponential law, `m ∈ ℕ₀ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Finite(u32),
    Infinite,
}

impl Truncation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Truncation::Infinite)
    }
}

/// Ratio of upper incomplete gamma values `Γ(m+1, b) / Γ(m+1, 0)`.
///
/// For finite `m` this is `e^{-b} Σ_{j=0}^{m} b^j / j!`; when `b < m + 1`
/// the complement is summed instead so that values close to 1 keep their
/// relative accuracy. `G_∞ ≡ 1`.
pub fn gm(m: Truncation, b: f64) -> f64 {
    debug_assert!(b >= 0.0);
    let m = match m {
        Truncation::Infinite => return 1.0,
        Truncation::Finite(m) => m,
    };
    if b <= 0.0 {
        return 1.0;
    }
    if m == 0 {
        return libm::exp(-b);
    }
    let mf = f64::from(m);
    let value = if b < mf + 1.0 {
        1.0 - lower_tail(m, b)
    } else {
        partial_sum(m, b)
    };
    value.clamp(0.0, 1.0)
}

/// `e^{-b} Σ_{j>m} b^j/j!`, valid for `b < m + 1`.
fn lower_tail(m: u32, b: f64) -> f64 {
    let first = f64::from(m + 1);
    let lead = libm::exp(-b + first * libm::log(b) - libm::lgamma(first + 1.0));
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > f64::EPSILON * sum * 1e-3 {
        term *= b / (first + k);
        sum += term;
        k += 1.0;
        if k > 10_000.0 {
            break;
        }
    }
    lead * sum
}

/// `e^{-b} Σ_{j=0}^{m} b^j/j!`, summed downward from the largest term.
fn partial_sum(m: u32, b: f64) -> f64 {
    let mf = f64::from(m);
    let mut term = libm::exp(-b + mf * libm::log(b) - libm::lgamma(mf + 1.0));
    let mut sum = term;
    let mut j = m;
    while j > 0 {
        term *= f64::from(j) / b;
        sum += term;
        if term < sum * f64::EPSILON * 1e-3 {
            break;
        }
        j -= 1;
    }
    sum
}

/// Derivative of [`gm`] with respect to `b`: `-e^{-b} b^m / m!`.
pub fn gm_derivative(m: Truncation, b: f64) -> f64 {
    match m {
        Truncation::Infinite => 0.0,
        Truncation::Finite(0) => -libm::exp(-b),
        Truncation::Finite(m) => {
            if b <= 0.0 {
                return 0.0;
            }
            let mf = f64::from(m);
            -libm::exp(-b + mf * libm::log(b) - libm::lgamma(mf + 1.0))
        }
    }
}

/// Inverse of [`gm`] in `b`: the `b ≥ 0` with `G_m(b) = y`, for `0 < y ≤ 1`.
pub fn gm_inverse(m: Truncation, y: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(invalid("gm_inverse expects 0 < y <= 1"));
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    let m_fin = match m {
        Truncation::Infinite => {
            return Err(invalid("G_inf is identically 1 and has no inverse below 1"))
        }
        Truncation::Finite(0) => return Ok(-libm::log(y)),
        Truncation::Finite(m) => m,
    };
    let mut lo = 0.0;
    let mut hi = f64::from(m_fin) + 1.0;
    while gm(m, hi) > y {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(invalid("gm_inverse: target below representable range"));
        }
    }
    let mut b = 0.5 * (lo + hi);
    for _ in 0..200 {
        let g = gm(m, b) - y;
        if g == 0.0 {
            break;
        }
        if g > 0.0 {
            lo = b;
        } else {
            hi = b;
        }
        let d = gm_derivative(m, b);
        let newton = if d != 0.0 { b - g / d } else { f64::NAN };
        b = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi.max(1e-300) || libm::fabs(g) <= 1e-16 * y {
            break;
        }
    }
    Ok(b)
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// Same as [`integrate`](Self::integrate) for a fallible integrand.
    pub fn try_integrate<E, F: FnMut(f64) -> core::result::Result<f64, E>>(
        &self,
        a: f64,
        b: f64,
        mut f: F,
    ) -> core::result::Result<f64, E> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x)?;
        }
        Ok(sum * half)
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
