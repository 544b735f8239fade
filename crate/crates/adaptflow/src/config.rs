//! Scenario configuration files (TOML). The schema is documented in
//! `docs/config.md`; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use adaptflow_core::analysis::ErrorMode;
use adaptflow_core::constitutive::{Epsilon, LawSpec};
use adaptflow_core::regularize::Smoothing;
use adaptflow_core::solver::{Backend, FixedPointControls};
use adaptflow_core::special::Truncation;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub name: String,
    /// Seed of every random generator used to build the scenario.
    #[serde(default)]
    pub seed: u64,
    pub grid: GridConfig,
    pub fluid: FluidConfig,
    pub medium: MediumConfig,
    pub law: LawConfig,
    #[serde(default)]
    pub adaptive: AdaptiveConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    pub boundary: BoundaryConfig,
    /// Gravitational acceleration vector [m/s²]; the body force is `ρ g`.
    #[serde(default)]
    pub gravity: [f64; 3],
    #[serde(default)]
    pub wells: Vec<WellSpec>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub cells: [usize; 3],
    /// Cell size per axis [m]; in 2D the third entry is the slab thickness.
    pub spacing: [f64; 3],
    #[serde(default)]
    pub origin: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidConfig {
    pub mu: f64,
    pub rho: f64,
}

/// Scalar or diagonal-tensor permeability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Permeability {
    Scalar(f64),
    Tensor([f64; 3]),
}

impl Permeability {
    pub fn tensor(self) -> [f64; 3] {
        match self {
            Permeability::Scalar(k) => [k; 3],
            Permeability::Tensor(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PorosityRule {
    /// Invert the Kozeny–Carman relation cell by cell.
    KozenyCarman,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Porosity {
    Constant(f64),
    Rule(PorosityRule),
}

impl Default for Porosity {
    fn default() -> Self {
        Porosity::Rule(PorosityRule::KozenyCarman)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Background {
    /// `log k` uniform between `ln min` and `ln max`, one draw per cell.
    LogUniform { min: f64, max: f64 },
    Constant { value: f64 },
}

/// Axis-aligned box with its permeability; `z` defaults to the full height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub x: [f64; 2],
    pub y: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<[f64; 2]>,
    pub permeability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockRole {
    Kx,
    Ky,
    Kz,
    Porosity,
    Skip,
}

/// Half-open index ranges `[lo, hi)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubBox {
    pub i: [usize; 2],
    pub j: [usize; 2],
    pub k: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MediumConfig {
    Uniform {
        permeability: Permeability,
        #[serde(default)]
        porosity: Porosity,
    },
    Channels {
        background: Background,
        #[serde(default)]
        channels: Vec<ChannelConfig>,
        /// Require every channel to stay clear of the domain boundary.
        #[serde(default)]
        immersed: bool,
        #[serde(default)]
        porosity: Porosity,
    },
    /// Whitespace-separated raw blocks, x-fastest (SPE10 layout).
    File {
        /// Data file; relative paths and a missing value resolve against
        /// `ADAPTFLOW_DATA`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
        /// Dimensions of every block in the file.
        file_dims: [usize; 3],
        blocks: Vec<BlockRole>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subbox: Option<SubBox>,
        /// Values are in millidarcy.
        #[serde(default)]
        millidarcy: bool,
        #[serde(default = "default_md_to_m2")]
        md_to_m2: f64,
        /// Floor applied to permeability values (same units as the file).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_permeability: Option<f64>,
        #[serde(default)]
        porosity: Porosity,
    },
    /// Seeded layered lognormal field in millidarcy, used where benchmark
    /// data is unavailable.
    Lognormal {
        log10_mean: f64,
        /// Spread of per-layer mean log-permeability.
        log10_layer_std: f64,
        /// Cell-to-cell spread within a layer.
        log10_cell_std: f64,
        /// `kz / kx`.
        vertical_ratio: f64,
        #[serde(default = "default_md_to_m2")]
        md_to_m2: f64,
        #[serde(default)]
        porosity: Porosity,
    },
}

pub fn default_md_to_m2() -> f64 {
    9.869233e-16
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TruncationConfig {
    Finite(u32),
    Named(InfiniteTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfiniteTag {
    Inf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawConfig {
    Darcy,
    DarcyForchheimer { cf: f64 },
    SinglePower { m: f64, cf: f64 },
    PowerExpansion { terms: Vec<(u32, f64)> },
    Exponential { c: f64, truncation: TruncationConfig },
}

impl LawConfig {
    pub fn to_law(&self) -> LawSpec {
        match self {
            LawConfig::Darcy => LawSpec::Darcy,
            LawConfig::DarcyForchheimer { cf } => LawSpec::darcy_forchheimer(*cf),
            LawConfig::SinglePower { m, cf } => LawSpec::single_power(*m, *cf),
            LawConfig::PowerExpansion { terms } => LawSpec::PowerExpansion {
                terms: terms.iter().map(|&(i, c)| (i, c.into())).collect(),
            },
            LawConfig::Exponential { c, truncation } => LawSpec::Exponential {
                c: (*c).into(),
                truncation: match truncation {
                    TruncationConfig::Finite(m) => Truncation::Finite(*m),
                    TruncationConfig::Named(InfiniteTag::Inf) => Truncation::Infinite,
                },
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingConfig {
    #[default]
    Selection,
    Profile,
}

impl From<SmoothingConfig> for Smoothing {
    fn from(s: SmoothingConfig) -> Self {
        match s {
            SmoothingConfig::Selection => Smoothing::Selection,
            SmoothingConfig::Profile => Smoothing::Profile,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveConfig {
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Absolute width [kg/(m²·s)].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Width as a fraction of the flux threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_relative: Option<f64>,
    #[serde(default)]
    pub smoothing: SmoothingConfig,
}

fn default_delta() -> f64 {
    0.1
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self { delta: 0.1, epsilon: None, epsilon_relative: None, smoothing: SmoothingConfig::Selection }
    }
}

impl AdaptiveConfig {
    pub fn epsilon(&self) -> Result<Epsilon> {
        match (self.epsilon, self.epsilon_relative) {
            (Some(_), Some(_)) => Err(Error::config("set only one of adaptive.epsilon and adaptive.epsilon_relative")),
            (Some(e), None) => Ok(Epsilon::Absolute(e)),
            (None, Some(r)) => Ok(Epsilon::Relative(r)),
            (None, None) => Ok(Epsilon::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendConfig {
    #[default]
    Direct,
    Cg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    pub max_iter: usize,
    pub relaxation: f64,
    pub fallback_relaxation: f64,
    pub backend: BackendConfig,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = FixedPointControls::default();
        Self {
            tol: d.tol,
            atol: d.atol,
            max_iter: d.max_iter,
            relaxation: d.relaxation,
            fallback_relaxation: d.fallback_relaxation,
            backend: BackendConfig::Direct,
            cg_tol: 1e-12,
            cg_max_iter: 20_000,
        }
    }
}

impl SolverConfig {
    pub fn controls(&self) -> FixedPointControls {
        FixedPointControls {
            tol: self.tol,
            atol: self.atol,
            max_iter: self.max_iter,
            relaxation: self.relaxation,
            fallback_relaxation: self.fallback_relaxation,
            backend: match self.backend {
                BackendConfig::Direct => Backend::Direct,
                BackendConfig::Cg => Backend::Cg { tol: self.cg_tol, max_iter: self.cg_max_iter },
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BcConfig {
    /// Outward normal flux [kg/(m²·s)]; inflow is negative.
    Flux { value: f64 },
    Pressure { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub x_min: BcConfig,
    pub x_max: BcConfig,
    pub y_min: BcConfig,
    pub y_max: BcConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_min: Option<BcConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_max: Option<BcConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_pressure: Option<f64>,
}

impl BoundaryConfig {
    pub fn sealed() -> Self {
        let zero = BcConfig::Flux { value: 0.0 };
        Self { x_min: zero, x_max: zero, y_min: zero, y_max: zero, z_min: None, z_max: None, mean_pressure: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WellKind {
    Injector,
    Producer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellSpec {
    pub kind: WellKind,
    pub i: usize,
    pub j: usize,
    /// Pierced depth in cells from the first layer (3D only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    /// Mass rate [kg/s]; positive for injectors, negative for producers.
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModeConfig {
    #[default]
    Relative,
    Absolute,
}

impl From<ErrorModeConfig> for ErrorMode {
    fn from(m: ErrorModeConfig) -> Self {
        match m {
            ErrorModeConfig::Relative => ErrorMode::Relative,
            ErrorModeConfig::Absolute => ErrorMode::Absolute,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub error_mode: ErrorModeConfig,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), error_mode: ErrorModeConfig::Relative }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}
