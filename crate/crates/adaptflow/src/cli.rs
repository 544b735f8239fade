//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 when a solve did not converge, 1 on input
//! errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use adaptflow_core::analysis::{
    adaptive_run, classify_with_threshold, delta_sweep, region_errors_cells, RegionLabels,
};
use adaptflow_core::constitutive::Epsilon;
use adaptflow_core::grid::reconstruct_cell_flux;
use adaptflow_core::solver::{mass_balance_defect, solve_nonlinear, DiscreteProblem, SolveReport};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::report::{errors_csv, finite, sweep_csv, ErrorsJson, RunReport};
use crate::scenario::{build_preset, PresetOverrides, Scenario};
use crate::vtk::{solution_dataset, CellData, VtkDataset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "adaptflow", version, about = "Adaptive Darcy / Forchheimer flow solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one scenario and write `solution.vtk` and `report.json`.
    Run(RunArgs),
    /// Solve the adaptive model for several tolerances and write `sweep.csv`.
    Sweep(SweepArgs),
    /// Compare adaptive and Darcy solutions with a reference; writes `errors.csv`.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Scenario configuration file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in scenario: two_channels, network, spe10_layer35 or spe10_3d.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value = "a", requires = "preset")]
    pub variant: String,
    /// Cell counts NX,NY for channel presets.
    #[arg(long, value_delimiter = ',', requires = "preset")]
    pub cells: Option<Vec<usize>>,
    /// Directory holding the SPE10 data (defaults to $ADAPTFLOW_DATA).
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Adaptive,
    Fast,
    Darcy,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "adaptive")]
    pub model: ModelArg,
    /// Tolerance (overrides adaptive.delta).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Also solve the global fast-law model and report errors against it.
    #[arg(long)]
    pub reference: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Strictly decreasing tolerances.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.0125,0.003125")]
    pub deltas: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write `regions_<i>.vtk` for every tolerance.
    #[arg(long)]
    pub dump_regions: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// `global_fast` or a VTK file with `pressure` and `flux` cell data.
    #[arg(long, default_value = "global_fast")]
    pub reference: String,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Diagnostics go to standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn execute(command: &Command) -> Result<i32> {
    match command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

fn load(source: &SourceArgs) -> Result<Scenario> {
    match (&source.config, &source.preset) {
        (Some(path), _) => Scenario::from_config_with_data(Config::load(path)?, source.data_dir.as_deref()),
        (None, Some(name)) => {
            let cells = match source.cells.as_deref() {
                None => None,
                Some(&[nx, ny]) => Some([nx, ny]),
                Some(_) => return Err(Error::config("--cells takes two values NX,NY")),
            };
            let ov = PresetOverrides { cells, seed: None, data_dir: source.data_dir.clone() };
            build_preset(name, &source.variant, &ov)
        }
        (None, None) => Err(Error::config("either --config or --preset is required")),
    }
}

fn out_dir(arg: &Option<PathBuf>, scenario: &Scenario) -> Result<PathBuf> {
    let dir = arg.clone().unwrap_or_else(|| scenario.config.output.dir.clone());
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn solve(problem: &DiscreteProblem, scenario: &Scenario) -> Result<SolveReport> {
    Ok(solve_nonlinear(problem, &scenario.controls)?)
}

fn epsilon_abs(scenario: &Scenario, u_bar: f64) -> Option<f64> {
    match scenario.epsilon {
        Epsilon::Absolute(e) => Some(e),
        Epsilon::Relative(r) => finite(r * u_bar),
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<i32> {
    let scenario = load(&args.source)?;
    let dir = out_dir(&args.out, &scenario)?;
    let delta = args.delta.unwrap_or(scenario.delta);
    let settings = scenario.sweep_settings();
    let mut warnings = Vec::new();
    let (report, labels, model) = match args.model {
        ModelArg::Adaptive => {
            let (r, l) = adaptive_run(&scenario.problem, &settings, delta, &mut warnings)?;
            (r, Some(l), "adaptive")
        }
        ModelArg::Fast | ModelArg::Darcy => {
            let (problem, name) = match args.model {
                ModelArg::Fast => (scenario.problem.clone(), "fast"),
                _ => (scenario.darcy_problem(), "darcy"),
            };
            let r = solve(&problem, &scenario)?;
            let labels = match scenario.adaptive_spec(delta) {
                Ok(spec) => Some(classify_with_threshold(&r.flux, spec.u_bar, scenario.grid())?),
                Err(_) => None,
            };
            (r, labels, name)
        }
    };
    let defect = mass_balance_defect(&scenario.problem, &report.flux)?;
    let mut json = RunReport::new(&scenario.name, model, &report, defect);
    json.warnings.extend(warnings);
    json.delta = Some(delta);
    if let Some(l) = &labels {
        json.u_bar = finite(l.u_bar);
        json.epsilon = epsilon_abs(&scenario, l.u_bar);
        json.fast_cells = Some(l.fast_count());
        json.fast_fraction = Some(l.fast_fraction);
    }
    let mut converged = report.converged;
    if args.reference {
        let reference = solve(&scenario.problem, &scenario)?;
        converged &= reference.converged;
        let all_slow = RegionLabels::from_magnitudes(&vec![0.0; scenario.grid().n_cells()], 1.0);
        let errs = errors_against(&scenario, &report, &reference_fields(&scenario, &reference)?, labels.as_ref().unwrap_or(&all_slow))?;
        json.errors = Some(ErrorsJson::from(&errs));
    }
    let ds = solution_dataset(
        scenario.grid(),
        &scenario.name,
        &report.pressure,
        &report.flux,
        labels.as_ref(),
        &scenario.log10_permeability(),
    )?;
    ds.write(&dir.join("solution.vtk"))?;
    write(&dir.join("report.json"), &json.to_json())?;
    for w in &json.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{}: model {model}, {} iterations, converged {}, fast cells {}",
        scenario.name,
        report.iterations,
        report.converged,
        json.fast_cells.map_or_else(|| "n/a".to_string(), |n| n.to_string())
    );
    Ok(if converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let scenario = load(&args.source)?;
    let dir = out_dir(&args.out, &scenario)?;
    let outcome = delta_sweep(&scenario.problem, &args.deltas, &scenario.sweep_settings())?;
    write(&dir.join("sweep.csv"), &sweep_csv(&outcome))?;
    if args.dump_regions {
        let logk = scenario.log10_permeability();
        for (i, row) in outcome.rows.iter().enumerate() {
            let title = format!("{} delta {}", scenario.name, row.delta);
            let ds = solution_dataset(
                scenario.grid(),
                &title,
                &row.report.pressure,
                &row.report.flux,
                Some(&row.labels),
                &logk,
            )?;
            ds.write(&dir.join(format!("regions_{i}.vtk")))?;
        }
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for r in &outcome.rows {
        println!(
            "delta {:e}: err_p {:e}, err_u {:e}, fast fraction {}, converged {}",
            r.delta,
            r.errors.whole.err_p,
            r.errors.whole.err_u,
            r.fast_fraction(),
            r.converged
        );
    }
    Ok(EXIT_OK)
}

type CellFields = (Vec<f64>, Vec<[f64; 3]>);

fn reference_fields(scenario: &Scenario, report: &SolveReport) -> Result<CellFields> {
    let u = reconstruct_cell_flux(scenario.grid(), &report.flux)?;
    Ok((report.pressure.values().to_vec(), u.into_values()))
}

fn file_reference(path: &Path, scenario: &Scenario) -> Result<CellFields> {
    let ds = VtkDataset::read(path)?;
    let n = scenario.grid().n_cells();
    if ds.n_cells() != n {
        return Err(Error::Vtk(format!("reference has {} cells, scenario has {n}", ds.n_cells())));
    }
    let p = match ds.field("pressure") {
        Some(CellData::Scalars(v)) => v.clone(),
        _ => return Err(Error::Vtk("reference lacks scalar field `pressure`".into())),
    };
    let u = match ds.field("flux") {
        Some(CellData::Vectors(v)) => v.clone(),
        _ => return Err(Error::Vtk("reference lacks vector field `flux`".into())),
    };
    Ok((p, u))
}

fn errors_against(
    scenario: &Scenario,
    report: &SolveReport,
    reference: &CellFields,
    labels: &RegionLabels,
) -> Result<adaptflow_core::analysis::ErrorReport> {
    let u = reconstruct_cell_flux(scenario.grid(), &report.flux)?;
    Ok(region_errors_cells(
        scenario.grid(),
        (report.pressure.values(), u.values()),
        (&reference.0, &reference.1),
        labels,
        scenario.error_mode,
    )?)
}

pub fn cmd_compare(args: &CompareArgs) -> Result<i32> {
    let scenario = load(&args.source)?;
    let (reference, mut converged) = if args.reference == "global_fast" {
        let r = solve(&scenario.problem, &scenario)?;
        (reference_fields(&scenario, &r)?, r.converged)
    } else {
        (file_reference(Path::new(&args.reference), &scenario)?, true)
    };
    let dir = out_dir(&args.out, &scenario)?;
    let delta = args.delta.unwrap_or(scenario.delta);
    let mut warnings = Vec::new();
    let (adaptive, labels) = adaptive_run(&scenario.problem, &scenario.sweep_settings(), delta, &mut warnings)?;
    let darcy = solve(&scenario.darcy_problem(), &scenario)?;
    converged &= adaptive.converged && darcy.converged;
    let e_darcy = errors_against(&scenario, &darcy, &reference, &labels)?;
    let e_adaptive = errors_against(&scenario, &adaptive, &reference, &labels)?;
    write(&dir.join("errors.csv"), &errors_csv(&[("darcy", &e_darcy), ("adaptive", &e_adaptive)]))?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{}: whole-domain err_u darcy {:e}, adaptive {:e}; fast cells {}",
        scenario.name,
        e_darcy.whole.err_u,
        e_adaptive.whole.err_u,
        labels.fast_count()
    );
    Ok(if converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sweep_deltas() {
        let cli = Cli::try_parse_from(["adaptflow", "sweep", "--preset", "two_channels", "--deltas", "0.1,0.01"]).unwrap();
        match cli.command {
            Command::Sweep(a) => assert_eq!(a.deltas, vec![0.1, 0.01]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn source_is_required_and_exclusive() {
        assert!(Cli::try_parse_from(["adaptflow", "run"]).is_err());
        assert!(Cli::try_parse_from(["adaptflow", "run", "--config", "x.toml", "--preset", "network"]).is_err());
        assert!(Cli::try_parse_from(["adaptflow", "run", "--preset", "network", "--cells", "10,20"]).is_ok());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["adaptflow", "frobnicate"]), EXIT_INPUT);
        assert_eq!(main_with_args(["adaptflow", "run", "--preset", "bogus"]), EXIT_INPUT);
    }
}
