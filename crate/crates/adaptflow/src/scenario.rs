//! Validation scenarios and general scenarios built from a [`Config`].

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use adaptflow_core::analysis::{ErrorMode, SweepSettings};
use adaptflow_core::constitutive::{AdaptiveSpec, Epsilon, FluidProps, LawSpec, Medium};
use adaptflow_core::grid::{CartGrid, CellField, Side};
use adaptflow_core::regularize::{SmoothedMultiplier, Smoothing};
use adaptflow_core::solver::{
    BoundaryCondition, BoundarySpec, DiscreteProblem, FixedPointControls, FlowModel,
};

pub use crate::config::{WellKind, WellSpec};
use crate::config::{
    AdaptiveConfig, Background, BcConfig, BlockRole, BoundaryConfig, ChannelConfig, Config,
    FluidConfig, GridConfig, LawConfig, MediumConfig, OutputConfig, Porosity, PorosityRule,
    SmoothingConfig, SolverConfig, SubBox,
};
use crate::error::{Error, Result};

/// Kozeny–Carman reference permeability [m²] at [`PHI_REF`].
pub const K_REF: f64 = 1.0152441851e-9;
pub const PHI_REF: f64 = 0.35;
/// Atmospheric pressure [Pa].
pub const P_ATM: f64 = 1.01325e5;
pub const GRAVITY: f64 = 9.81;
pub const MD_TO_M2: f64 = 9.869233e-16;

/// Dimensions of the SPE10 model 2 permeability blocks.
pub const SPE10_DIMS: [usize; 3] = [60, 220, 85];
/// SPE10 cell size (20 ft × 10 ft × 2 ft) [m].
pub const SPE10_CELL: [f64; 3] = [6.096, 3.048, 0.6096];
pub const SPE10_FILE: &str = "spe_perm.dat";
/// Environment variable naming the directory holding the SPE10 data.
pub const DATA_ENV: &str = "ADAPTFLOW_DATA";
/// Zero-based index of layer 35 in the SPE10 file.
pub const SPE10_LAYER35: usize = 34;

pub const PRESETS: [&str; 4] = ["two_channels", "network", "spe10_layer35", "spe10_3d"];

fn kc_factor(phi: f64) -> f64 {
    phi * phi * phi / ((1.0 - phi) * (1.0 - phi))
}

/// Kozeny–Carman permeability [m²] for porosity `phi`.
pub fn kozeny_carman(phi: f64) -> Result<f64> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::config(format!("porosity {phi} outside (0, 1)")));
    }
    Ok(K_REF * kc_factor(phi) / kc_factor(PHI_REF))
}

/// Porosity whose Kozeny–Carman permeability is `k`, by bisection on (0, 1).
pub fn kc_inverse(k: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::config(format!("permeability {k} must be positive and finite")));
    }
    let target = (k * kc_factor(PHI_REF) / K_REF).ln();
    let g = |phi: f64| 3.0 * phi.ln() - 2.0 * (1.0 - phi).ln() - target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi = 0.5 * (lo + hi);
    if phi <= 0.0 || phi >= 1.0 {
        return Err(Error::config(format!("permeability {k} has no porosity in (0, 1)")));
    }
    Ok(phi)
}

/// Axis-aligned box; a cell belongs to it when its center lies strictly inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Rect {
    pub fn contains(&self, p: [f64; 3], dim: usize) -> bool {
        (0..dim).all(|a| p[a] > self.lo[a] && p[a] < self.hi[a])
    }
}

fn channel_rect(grid: &CartGrid, ch: &ChannelConfig) -> Rect {
    let o = grid.origin();
    let e = grid.extent();
    let z = ch.z.unwrap_or([o[2], o[2] + e[2]]);
    Rect { lo: [ch.x[0], ch.y[0], z[0]], hi: [ch.x[1], ch.y[1], z[1]] }
}

/// Channel boxes of `channels` on `grid`, validated against the domain.
pub fn channel_rects(grid: &CartGrid, channels: &[ChannelConfig], immersed: bool) -> Result<Vec<Rect>> {
    let o = grid.origin();
    let e = grid.extent();
    channels
        .iter()
        .enumerate()
        .map(|(n, ch)| {
            if !(ch.permeability > 0.0 && ch.permeability.is_finite()) {
                return Err(Error::config(format!("channel {n}: permeability must be positive")));
            }
            let r = channel_rect(grid, ch);
            for a in 0..grid.dim() {
                let (dlo, dhi) = (o[a], o[a] + e[a]);
                let tol = 1e-12 * e[a];
                if !(r.lo[a] < r.hi[a]) || r.lo[a] < dlo - tol || r.hi[a] > dhi + tol {
                    return Err(Error::config(format!("channel {n} lies outside the domain")));
                }
                if immersed && (r.lo[a] <= dlo + tol || r.hi[a] >= dhi - tol) {
                    return Err(Error::config(format!("channel {n} touches the domain boundary")));
                }
            }
            Ok(r)
        })
        .collect()
}

/// Cellwise maximum of `background` and the permeability of every channel
/// containing the cell.
pub fn gen_channels(
    grid: &CartGrid,
    background: &[f64],
    channels: &[ChannelConfig],
    immersed: bool,
) -> Result<Vec<f64>> {
    if background.len() != grid.n_cells() {
        return Err(Error::config("background field does not match the grid"));
    }
    let rects = channel_rects(grid, channels, immersed)?;
    Ok((0..grid.n_cells())
        .map(|c| {
            let p = grid.cell_center(c);
            rects
                .iter()
                .zip(channels)
                .filter(|(r, _)| r.contains(p, grid.dim()))
                .fold(background[c], |k, (_, ch)| k.max(ch.permeability))
        })
        .collect())
}

/// Background permeability field; random draws use `seed`.
pub fn background_field(grid: &CartGrid, spec: &Background, seed: u64) -> Result<Vec<f64>> {
    match *spec {
        Background::Constant { value } => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::config("background permeability must be positive"));
            }
            Ok(vec![value; grid.n_cells()])
        }
        Background::LogUniform { min, max } => {
            if !(min > 0.0 && min <= max && max.is_finite()) {
                return Err(Error::config("log-uniform background needs 0 < min <= max"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b) = (min.ln(), max.ln());
            Ok((0..grid.n_cells()).map(|_| (a + (b - a) * rng.gen::<f64>()).exp()).collect())
        }
    }
}

/// Parses at least `n` whitespace-separated numbers from `text`.
pub fn parse_raw(text: &str, n: usize, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    for tok in text.split_ascii_whitespace().take(n) {
        let offset = tok.as_ptr() as usize - text.as_ptr() as usize;
        let v: f64 = tok.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            offset,
            message: format!("non-numeric token `{tok}`"),
        })?;
        out.push(v);
    }
    if out.len() < n {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            offset: text.len(),
            message: format!("expected {n} values, found {}", out.len()),
        });
    }
    Ok(out)
}

/// Reads `n_blocks` consecutive x-fastest blocks of `dims` cells.
pub fn load_raw_field(path: &Path, dims: [usize; 3], n_blocks: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    split_blocks(parse_raw(&text, dims.iter().product::<usize>() * n_blocks, path)?, dims, n_blocks)
}

fn split_blocks(values: Vec<f64>, dims: [usize; 3], n_blocks: usize) -> Result<Vec<Vec<f64>>> {
    let n: usize = dims.iter().product();
    if values.len() < n * n_blocks {
        return Err(Error::config("not enough values for the requested blocks"));
    }
    Ok(values.chunks(n).take(n_blocks).map(<[f64]>::to_vec).collect())
}

/// Extracts an x-fastest sub-box from an x-fastest block of `dims` cells.
pub fn extract_subbox(block: &[f64], dims: [usize; 3], sub: &SubBox) -> Result<Vec<f64>> {
    let ranges = [sub.i, sub.j, sub.k];
    for (a, r) in ranges.iter().enumerate() {
        if !(r[0] < r[1] && r[1] <= dims[a]) {
            return Err(Error::config(format!("sub-box range {r:?} invalid for axis of size {}", dims[a])));
        }
    }
    if block.len() != dims.iter().product::<usize>() {
        return Err(Error::config("block size does not match its dimensions"));
    }
    let mut out = Vec::with_capacity((sub.i[1] - sub.i[0]) * (sub.j[1] - sub.j[0]) * (sub.k[1] - sub.k[0]));
    for k in sub.k[0]..sub.k[1] {
        for j in sub.j[0]..sub.j[1] {
            let row = (k * dims[1] + j) * dims[0];
            out.extend_from_slice(&block[row + sub.i[0]..row + sub.i[1]]);
        }
    }
    Ok(out)
}

/// Per-cell source density `q` [kg/(m³·s)] of `wells`. Each rate is spread
/// over the column cells the well pierces, weighted by pierced fraction.
pub fn wells_to_sources(grid: &CartGrid, wells: &[WellSpec]) -> Result<CellField<f64>> {
    let [nx, ny, nz] = grid.dims();
    let vol = grid.cell_volume();
    let mut q = vec![0.0; grid.n_cells()];
    for (n, w) in wells.iter().enumerate() {
        if w.i >= nx || w.j >= ny {
            return Err(Error::config(format!("well {n}: column ({}, {}) outside the grid", w.i, w.j)));
        }
        let sign_ok = match w.kind {
            WellKind::Injector => w.rate > 0.0,
            WellKind::Producer => w.rate < 0.0,
        };
        if !sign_ok || !w.rate.is_finite() {
            return Err(Error::config(format!("well {n}: injectors need rate > 0, producers rate < 0")));
        }
        let weights: Vec<f64> = if grid.dim() == 2 {
            if w.depth.is_some() {
                return Err(Error::config(format!("well {n}: depth is only meaningful in 3D")));
            }
            vec![1.0]
        } else {
            let d = w.depth.unwrap_or(nz as f64);
            if !(d >= 0.0 && d <= nz as f64) {
                return Err(Error::config(format!("well {n}: depth {d} outside [0, {nz}]")));
            }
            (0..nz).map(|l| (d - l as f64).clamp(0.0, 1.0)).collect()
        };
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::config(format!("well {n}: zero pierced volume")));
        }
        for (l, wt) in weights.iter().enumerate() {
            q[grid.cell_index(w.i, w.j, l)] += w.rate * wt / total / vol;
        }
    }
    Ok(CellField::new(grid, q)?)
}

/// Lognormal layered field standing in for SPE10 data: `[kx, ky, kz]` in m².
pub fn lognormal_layers(
    grid: &CartGrid,
    log10_mean: f64,
    log10_layer_std: f64,
    log10_cell_std: f64,
    vertical_ratio: f64,
    md_to_m2: f64,
    seed: u64,
) -> Result<Vec<[f64; 3]>> {
    let bad = |s: f64| !(s >= 0.0 && s.is_finite());
    if bad(log10_layer_std) || bad(log10_cell_std) || !(vertical_ratio > 0.0) || !(md_to_m2 > 0.0) {
        return Err(Error::config("invalid lognormal field parameters"));
    }
    let layer = Normal::new(log10_mean, log10_layer_std).map_err(|e| Error::config(e.to_string()))?;
    let cell = Normal::new(0.0, log10_cell_std).map_err(|e| Error::config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [nx, ny, nz] = grid.dims();
    let mut k = Vec::with_capacity(grid.n_cells());
    for _ in 0..nz {
        let mean = layer.sample(&mut rng);
        for _ in 0..nx * ny {
            let kh = 10f64.powf(mean + cell.sample(&mut rng)) * md_to_m2;
            k.push([kh, kh, vertical_ratio * kh]);
        }
    }
    Ok(k)
}

fn data_file(path: Option<&Path>, data_dir: Option<&Path>) -> PathBuf {
    let env_dir = || std::env::var_os(DATA_ENV).map(PathBuf::from);
    match path {
        Some(p) if p.is_absolute() => p.to_path_buf(),
        Some(p) => data_dir.map(Path::to_path_buf).or_else(env_dir).map_or_else(|| p.to_path_buf(), |d| d.join(p)),
        None => data_dir
            .map(Path::to_path_buf)
            .or_else(env_dir)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(SPE10_FILE),
    }
}

/// A fully specified flow problem with its adaptive-model settings.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    /// Configuration the scenario was built from.
    pub config: Config,
    /// Problem with the fast law applied globally.
    pub problem: DiscreteProblem,
    pub fast: LawSpec,
    pub delta: f64,
    pub epsilon: Epsilon,
    pub smoothing: Smoothing,
    pub controls: FixedPointControls,
    pub error_mode: ErrorMode,
    /// Channel boxes of channel media, empty otherwise.
    pub channels: Vec<Rect>,
}

impl Scenario {
    /// Builds the scenario; data files resolve against `ADAPTFLOW_DATA`.
    pub fn from_config(config: Config) -> Result<Self> {
        Self::from_config_with_data(config, None)
    }

    pub fn from_config_with_data(config: Config, data_dir: Option<&Path>) -> Result<Self> {
        let gc = &config.grid;
        if gc.dim != 2 && gc.dim != 3 {
            return Err(Error::config("grid.dim must be 2 or 3"));
        }
        if gc.dim == 2 && gc.cells[2] != 1 {
            return Err(Error::config("2D grids need cells[2] = 1"));
        }
        let grid = CartGrid::new(gc.dim, gc.cells, gc.spacing, gc.origin)?;
        let fluid = FluidProps::new(config.fluid.mu, config.fluid.rho)?;
        let (k, channels) = build_permeability(&config, &grid, data_dir)?;
        let phi = build_porosity(&config.medium, &k)?;
        let medium = Medium::new(k, phi)?;
        let fast = config.law.to_law();
        fast.validate(grid.n_cells())?;
        let boundary = build_boundary(&config.boundary, &grid)?;
        let sources = wells_to_sources(&grid, &config.wells)?;
        let f = config.gravity.map(|g| g * fluid.rho);
        let problem = DiscreteProblem {
            body_force: CellField::constant(&grid, f),
            grid,
            medium,
            fluid,
            model: FlowModel::Law(fast.clone()),
            sources,
            boundary,
        };
        problem.validate()?;
        let controls = config.solver.controls();
        controls.validate()?;
        let epsilon = config.adaptive.epsilon()?;
        Ok(Self {
            name: config.name.clone(),
            fast,
            delta: config.adaptive.delta,
            epsilon,
            smoothing: config.adaptive.smoothing.into(),
            controls,
            error_mode: config.output.error_mode.into(),
            channels,
            problem,
            config,
        })
    }

    pub fn grid(&self) -> &CartGrid {
        &self.problem.grid
    }

    pub fn adaptive_spec(&self, delta: f64) -> Result<AdaptiveSpec> {
        Ok(AdaptiveSpec::new(self.fast.clone(), delta, self.epsilon, &self.problem.medium, &self.problem.fluid)?)
    }

    /// Problem carrying the regularized adaptive model for `delta`.
    pub fn adaptive_problem(&self, delta: f64) -> Result<DiscreteProblem> {
        let spec = self.adaptive_spec(delta)?;
        Ok(self.problem.with_model(FlowModel::Adaptive(SmoothedMultiplier::new(spec, self.smoothing))))
    }

    pub fn darcy_problem(&self) -> DiscreteProblem {
        self.problem.with_model(FlowModel::Law(LawSpec::Darcy))
    }

    pub fn sweep_settings(&self) -> SweepSettings {
        SweepSettings {
            fast: self.fast.clone(),
            epsilon: self.epsilon,
            smoothing: self.smoothing,
            controls: self.controls,
            mode: self.error_mode,
        }
    }

    /// `log10` of the geometric mean of the in-plane (2D) or all (3D)
    /// permeability components.
    pub fn log10_permeability(&self) -> Vec<f64> {
        let d = self.grid().dim();
        self.problem
            .medium
            .permeability()
            .iter()
            .map(|k| k[..d].iter().map(|v| v.log10()).sum::<f64>() / d as f64)
            .collect()
    }

    pub fn in_channel(&self, cell: usize) -> bool {
        let p = self.grid().cell_center(cell);
        self.channels.iter().any(|r| r.contains(p, self.grid().dim()))
    }
}

fn build_permeability(config: &Config, grid: &CartGrid, data_dir: Option<&Path>) -> Result<(Vec<[f64; 3]>, Vec<Rect>)> {
    let iso = |k: Vec<f64>| k.into_iter().map(|v| [v; 3]).collect::<Vec<_>>();
    match &config.medium {
        MediumConfig::Uniform { permeability, .. } => Ok((vec![permeability.tensor(); grid.n_cells()], Vec::new())),
        MediumConfig::Channels { background, channels, immersed, .. } => {
            let bg = background_field(grid, background, config.seed)?;
            let k = gen_channels(grid, &bg, channels, *immersed)?;
            Ok((iso(k), channel_rects(grid, channels, *immersed)?))
        }
        MediumConfig::Lognormal { log10_mean, log10_layer_std, log10_cell_std, vertical_ratio, md_to_m2, .. } => {
            let mut k = lognormal_layers(
                grid, *log10_mean, *log10_layer_std, *log10_cell_std, *vertical_ratio, *md_to_m2, config.seed,
            )?;
            if grid.dim() == 2 {
                for v in &mut k {
                    v[2] = v[0];
                }
            }
            Ok((k, Vec::new()))
        }
        MediumConfig::File { path, file_dims, blocks, subbox, millidarcy, md_to_m2, min_permeability, .. } => {
            let file = data_file(path.as_deref(), data_dir);
            if !file.exists() {
                return Err(Error::DatasetRequired { what: "permeability data".into(), path: file });
            }
            let raw = load_raw_field(&file, *file_dims, blocks.len())?;
            let mut comps: [Option<Vec<f64>>; 3] = [None, None, None];
            for (role, block) in blocks.iter().zip(raw) {
                let axis = match role {
                    BlockRole::Kx => 0,
                    BlockRole::Ky => 1,
                    BlockRole::Kz => 2,
                    BlockRole::Porosity | BlockRole::Skip => continue,
                };
                let vals = match subbox {
                    Some(sb) => extract_subbox(&block, *file_dims, sb)?,
                    None => block,
                };
                if vals.len() != grid.n_cells() {
                    return Err(Error::config(format!(
                        "data block has {} cells, grid has {}",
                        vals.len(),
                        grid.n_cells()
                    )));
                }
                comps[axis] = Some(vals);
            }
            let kx = comps[0].take().ok_or_else(|| Error::config("file medium needs a kx block"))?;
            let ky = comps[1].take().unwrap_or_else(|| kx.clone());
            let kz = comps[2].take().unwrap_or_else(|| kx.clone());
            let scale = if *millidarcy { *md_to_m2 } else { 1.0 };
            let floor = min_permeability.unwrap_or(0.0);
            let k = (0..grid.n_cells())
                .map(|c| {
                    let x = kx[c].max(floor) * scale;
                    let y = ky[c].max(floor) * scale;
                    // The out-of-plane entry of a 2D slab only enters the
                    // Reynolds length; use the in-plane geometric mean.
                    let z = if grid.dim() == 2 { (x * y).sqrt() } else { kz[c].max(floor) * scale };
                    [x, y, z]
                })
                .collect();
            Ok((k, Vec::new()))
        }
    }
}

fn build_porosity(medium: &MediumConfig, k: &[[f64; 3]]) -> Result<Vec<f64>> {
    let rule = match medium {
        MediumConfig::Uniform { porosity, .. }
        | MediumConfig::Channels { porosity, .. }
        | MediumConfig::File { porosity, .. }
        | MediumConfig::Lognormal { porosity, .. } => *porosity,
    };
    match rule {
        Porosity::Constant(phi) => Ok(vec![phi; k.len()]),
        Porosity::Rule(PorosityRule::KozenyCarman) => {
            k.iter().map(|v| kc_inverse((v[0] * v[1] * v[2]).cbrt())).collect()
        }
    }
}

fn build_boundary(bc: &BoundaryConfig, grid: &CartGrid) -> Result<BoundarySpec> {
    let conv = |c: BcConfig| match c {
        BcConfig::Flux { value } => BoundaryCondition::Flux(value),
        BcConfig::Pressure { value } => BoundaryCondition::Pressure(value),
    };
    let z = match (grid.dim(), bc.z_min, bc.z_max) {
        (2, None, None) => None,
        (2, _, _) => return Err(Error::config("z boundary conditions are not allowed in 2D")),
        (_, Some(lo), Some(hi)) => Some((lo, hi)),
        _ => return Err(Error::config("3D grids need z_min and z_max boundary conditions")),
    };
    let mut spec = BoundarySpec::from_sides(grid, |side| {
        conv(match side {
            Side::XMin => bc.x_min,
            Side::XMax => bc.x_max,
            Side::YMin => bc.y_min,
            Side::YMax => bc.y_max,
            Side::ZMin => z.map_or(bc.x_min, |p| p.0),
            Side::ZMax => z.map_or(bc.x_max, |p| p.1),
        })
    });
    spec.mean_pressure = bc.mean_pressure;
    spec.validate(grid)?;
    Ok(spec)
}

/// Adjustments applied to a preset before it is built.
#[derive(Debug, Clone, Default)]
pub struct PresetOverrides {
    /// Cell counts of the channel presets; the 10 m domain is kept.
    pub cells: Option<[usize; 2]>,
    pub seed: Option<u64>,
    /// Directory holding `spe_perm.dat`.
    pub data_dir: Option<PathBuf>,
}

fn variant_index(preset: &str, variant: &str, allowed: usize) -> Result<usize> {
    let idx = match variant {
        "a" => 0,
        "b" => 1,
        "c" => 2,
        _ => usize::MAX,
    };
    if idx >= allowed {
        let valid = ["a", "b", "c"][..allowed].join(", ");
        return Err(Error::config(format!("preset {preset} has variants {valid}, got `{variant}`")));
    }
    Ok(idx)
}

fn unknown_preset(name: &str) -> Error {
    Error::UnknownPreset { name: name.into(), valid: PRESETS.join(", ") }
}

/// Channel preset inflow rates [kg/(m²·s)] for variants a and b.
pub const CHANNEL_INFLOW: [f64; 2] = [7e-3, 7e-2];
/// Injection rates [kg/s] of the layer preset variants.
pub const LAYER_RATES: [f64; 3] = [10.0, 50.0, 200.0];
/// Well depths [cells] of the 3D preset variants.
pub const WELL_DEPTHS: [f64; 3] = [3.5, 7.5, 9.5];

/// Log-uniform background range [m²] of the channel presets.
pub const K_BACKGROUND: [f64; 2] = [2e-7, 8e-7];
/// Channel permeability [m²], a hundred times the background geometric mean.
pub const K_CHANNEL: f64 = 4e-5;

const CHANNEL_SEED: u64 = 20_240_611;
const DOMAIN: f64 = 10.0;
const RHO_WATER: f64 = 998.0;

fn adaptive_defaults() -> AdaptiveConfig {
    AdaptiveConfig { delta: 0.1, epsilon: None, epsilon_relative: Some(0.1), smoothing: SmoothingConfig::Selection }
}

fn channel_preset(name: &str, variant: usize, channels: Vec<ChannelConfig>, immersed: bool, ov: &PresetOverrides) -> Result<Config> {
    let [nx, ny] = ov.cells.unwrap_or([100, 100]);
    if nx == 0 || ny == 0 {
        return Err(Error::config("cell counts must be positive"));
    }
    let zero = BcConfig::Flux { value: 0.0 };
    Ok(Config {
        name: format!("{name}_{}", ["a", "b"][variant]),
        seed: ov.seed.unwrap_or(CHANNEL_SEED),
        grid: GridConfig {
            dim: 2,
            cells: [nx, ny, 1],
            spacing: [DOMAIN / nx as f64, DOMAIN / ny as f64, 1.0],
            origin: [0.0; 3],
        },
        fluid: FluidConfig { mu: 1e-3, rho: RHO_WATER },
        medium: MediumConfig::Channels {
            background: Background::LogUniform { min: K_BACKGROUND[0], max: K_BACKGROUND[1] },
            channels,
            immersed,
            porosity: Porosity::Rule(PorosityRule::KozenyCarman),
        },
        law: LawConfig::DarcyForchheimer { cf: 0.55 },
        adaptive: adaptive_defaults(),
        solver: SolverConfig::default(),
        boundary: BoundaryConfig {
            x_min: zero,
            x_max: zero,
            y_min: BcConfig::Pressure { value: P_ATM + RHO_WATER * GRAVITY * DOMAIN },
            y_max: BcConfig::Flux { value: -CHANNEL_INFLOW[variant] },
            z_min: None,
            z_max: None,
            mean_pressure: None,
        },
        gravity: [0.0, -GRAVITY, 0.0],
        wells: Vec::new(),
        output: OutputConfig::default(),
    })
}

fn vertical(x: [f64; 2], y: [f64; 2], permeability: f64) -> ChannelConfig {
    ChannelConfig { x, y, z: None, permeability }
}

fn spe_medium(subbox: SubBox, data_dir: Option<&Path>) -> MediumConfig {
    MediumConfig::File {
        path: data_dir.map(|d| d.join(SPE10_FILE)),
        file_dims: SPE10_DIMS,
        blocks: vec![BlockRole::Kx, BlockRole::Ky, BlockRole::Kz],
        subbox: Some(subbox),
        millidarcy: true,
        md_to_m2: MD_TO_M2,
        min_permeability: None,
        porosity: Porosity::Rule(PorosityRule::KozenyCarman),
    }
}

fn corner_wells(nx: usize, ny: usize, injector: (usize, usize), rate: f64, depth: Option<f64>) -> Vec<WellSpec> {
    let mut wells = vec![WellSpec { kind: WellKind::Injector, i: injector.0, j: injector.1, depth, rate }];
    for (i, j) in [(0, 0), (nx - 1, 0), (0, ny - 1), (nx - 1, ny - 1)] {
        wells.push(WellSpec { kind: WellKind::Producer, i, j, depth, rate: -rate / 4.0 });
    }
    wells
}

fn spe_common(name: String, dim: usize, cells: [usize; 3], medium: MediumConfig, wells: Vec<WellSpec>) -> Config {
    let mut boundary = BoundaryConfig::sealed();
    if dim == 3 {
        boundary.z_min = Some(BcConfig::Flux { value: 0.0 });
        boundary.z_max = Some(BcConfig::Flux { value: 0.0 });
    }
    boundary.mean_pressure = Some(P_ATM);
    Config {
        name,
        seed: 0,
        grid: GridConfig { dim, cells, spacing: SPE10_CELL, origin: [0.0; 3] },
        fluid: FluidConfig { mu: 3e-4, rho: 1025.0 },
        medium,
        law: LawConfig::DarcyForchheimer { cf: 0.55 },
        adaptive: adaptive_defaults(),
        solver: SolverConfig::default(),
        boundary,
        gravity: [0.0; 3],
        wells,
        output: OutputConfig::default(),
    }
}

/// Configuration of a named preset. Channel presets accept variants a and b,
/// SPE10 presets a, b and c.
pub fn preset_config(name: &str, variant: &str, ov: &PresetOverrides) -> Result<Config> {
    if !PRESETS.contains(&name) {
        return Err(unknown_preset(name));
    }
    let spe = name.starts_with("spe10");
    if spe && (ov.cells.is_some() || ov.seed.is_some()) {
        return Err(Error::config("cell and seed overrides apply to channel presets only"));
    }
    match name {
        "two_channels" => {
            let v = variant_index(name, variant, 2)?;
            // Narrow left channel, wide right channel, both spanning the height.
            let channels = vec![vertical([2.0, 2.3], [0.0, DOMAIN], K_CHANNEL), vertical([6.0, 6.6], [0.0, DOMAIN], K_CHANNEL)];
            channel_preset(name, v, channels, false, ov)
        }
        "network" => {
            let v = variant_index(name, variant, 2)?;
            let channels = vec![
                vertical([2.7, 3.3], [1.0, 9.0], K_CHANNEL),
                vertical([6.7, 7.3], [1.0, 9.0], K_CHANNEL),
                vertical([1.0, 9.0], [2.7, 3.3], K_CHANNEL),
                vertical([1.0, 9.0], [6.7, 7.3], K_CHANNEL),
            ];
            channel_preset(name, v, channels, true, ov)
        }
        "spe10_layer35" => {
            let v = variant_index(name, variant, 3)?;
            let [nx, ny, _] = SPE10_DIMS;
            let sub = SubBox { i: [0, nx], j: [0, ny], k: [SPE10_LAYER35, SPE10_LAYER35 + 1] };
            let wells = corner_wells(nx, ny, (nx / 2, ny / 2), LAYER_RATES[v], None);
            Ok(spe_common(
                format!("spe10_layer35_{variant}"),
                2,
                [nx, ny, 1],
                spe_medium(sub, ov.data_dir.as_deref()),
                wells,
            ))
        }
        _ => {
            let v = variant_index(name, variant, 3)?;
            let (nx, ny, nz) = (10, 20, 15);
            let sub = SubBox { i: [0, nx], j: [0, ny], k: [0, nz] };
            let wells = corner_wells(nx, ny, (nx / 2, ny / 2), 10.0, Some(WELL_DEPTHS[v]));
            Ok(spe_common(
                format!("spe10_3d_{variant}"),
                3,
                [nx, ny, nz],
                spe_medium(sub, ov.data_dir.as_deref()),
                wells,
            ))
        }
    }
}

pub fn build_preset(name: &str, variant: &str, ov: &PresetOverrides) -> Result<Scenario> {
    Scenario::from_config_with_data(preset_config(name, variant, ov)?, ov.data_dir.as_deref())
}

/// Seeded synthetic medium replacing the SPE10 data in the 3D preset when
/// the data set is unavailable.
pub fn spe10_standin_medium() -> MediumConfig {
    MediumConfig::Lognormal {
        log10_mean: 1.5,
        log10_layer_std: 0.8,
        log10_cell_std: 0.6,
        vertical_ratio: 0.1,
        md_to_m2: MD_TO_M2,
        porosity: Porosity::Rule(PorosityRule::KozenyCarman),
    }
}
