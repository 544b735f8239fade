use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument or field violates its documented domain.
    InvalidInput(String),
    /// Exponential law evaluated with `c·Re` above the overflow cap.
    Range { value: f64, cap: f64 },
    /// Every cell has a linear reference law, so no finite threshold exists.
    ThresholdUndefined,
    /// Sealed domain without a mean-pressure anchor.
    PressureAnchorRequired,
    /// Sources and boundary fluxes do not balance on a sealed domain.
    Incompatible { imbalance: f64, scale: f64 },
    /// Matrix lost positive definiteness during factorization.
    Singular { row: usize },
    /// Iterative linear solver stopped before reaching its tolerance.
    LinearNotConverged { iterations: usize, residual: f64 },
    /// Smoothing quadrature produced a non-finite or inconsistent value.
    Quadrature { flux: f64, epsilon: f64 },
    /// Fields defined on different grids.
    GridMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Range { value, cap } => {
                write!(f, "exponential law argument {value:e} exceeds range cap {cap}")
            }
            Error::ThresholdUndefined => {
                write!(f, "threshold undefined (reference law is linear everywhere)")
            }
            Error::PressureAnchorRequired => write!(
                f,
                "pressure anchor required: no pressure boundary condition and no mean pressure set"
            ),
            Error::Incompatible { imbalance, scale } => write!(
                f,
                "sources and boundary fluxes do not balance (imbalance {imbalance:e}, scale {scale:e})"
            ),
            Error::Singular { row } => write!(f, "singular system (pivot breakdown at row {row})"),
            Error::LinearNotConverged { iterations, residual } => write!(
                f,
                "linear solver did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::Quadrature { flux, epsilon } => {
                write!(f, "smoothing quadrature failed at flux {flux:e}, epsilon {epsilon:e}")
            }
            Error::GridMismatch { expected, found } => {
                write!(f, "field size {found} does not match grid size {expected}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
