use std::path::Path;
use std::process::{Command, Output};

use adaptflow::report::{ERRORS_HEADER, SWEEP_HEADER};
use adaptflow::vtk::{CellData, VtkDataset};

fn adaptflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adaptflow")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SEALED: &str = r#"
name = "sealed"
[grid]
dim = 2
cells = [6, 4, 1]
spacing = [1.0, 1.0, 1.0]
[fluid]
mu = 1e-3
rho = 998.0
[medium]
kind = "uniform"
permeability = 1e-10
porosity = 0.3
[law]
kind = "darcy_forchheimer"
cf = 0.55
[boundary]
x_min = { kind = "flux", value = 0.0 }
x_max = { kind = "flux", value = 0.0 }
y_min = { kind = "flux", value = 0.0 }
y_max = { kind = "flux", value = 0.0 }
"#;

#[test]
fn run_preset_writes_solution_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = adaptflow(&["run", "--preset", "two_channels", "--cells", "20,20", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ds = VtkDataset::read(&dir.path().join("solution.vtk")).unwrap();
    assert_eq!(ds.n_cells(), 400);
    for f in ["pressure", "flux", "flux_magnitude", "log10_permeability"] {
        assert!(ds.field(f).is_some(), "missing {f}");
    }
    match ds.field("region") {
        Some(CellData::Ints(v)) => assert!(v.iter().all(|&r| r == 0 || r == 1)),
        other => panic!("region field {other:?}"),
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["converged"], true);
    assert_eq!(report["model"], "adaptive");
}

#[test]
fn unknown_preset_exits_one_and_lists_presets() {
    let o = adaptflow(&["run", "--preset", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("two_channels") && e.contains("spe10_3d"), "{e}");
}

#[test]
fn sealed_config_without_anchor_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sealed.toml");
    std::fs::write(&cfg, SEALED).unwrap();
    let o = adaptflow(&["run", "--config", path(&cfg), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pressure anchor required"), "{}", stderr(&o));
}

#[test]
fn sweep_reports_non_convergence_in_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_text = adaptflow::scenario::preset_config(
        "two_channels",
        "b",
        &adaptflow::scenario::PresetOverrides { cells: Some([12, 12]), ..Default::default() },
    )
    .unwrap()
    .to_toml()
    .unwrap();
    let mut cfg: adaptflow::config::Config = adaptflow::config::Config::from_toml(&cfg_text).unwrap();
    cfg.solver.max_iter = 1;
    let file = dir.path().join("c.toml");
    std::fs::write(&file, cfg.to_toml().unwrap()).unwrap();
    let o = adaptflow(&["sweep", "--config", path(&file), "--deltas", "0.1,0.01", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1..].iter().any(|l| l.ends_with(",false")), "{csv}");
}

#[test]
fn compare_with_missing_reference_fails() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.vtk");
    let o = adaptflow(&["compare", "--preset", "two_channels", "--cells", "10,10", "--reference", path(&missing)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("none.vtk"), "{}", stderr(&o));
}

#[test]
fn compare_against_global_fast_and_file_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    let o = adaptflow(&["compare", "--preset", "two_channels", "--cells", "16,16", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], ERRORS_HEADER);

    // A fast-law solution written by `run` reproduces the global_fast table.
    let fast = dir.path().join("fast");
    let o = adaptflow(&["run", "--preset", "two_channels", "--cells", "16,16", "--model", "fast", "--out", path(&fast)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let other = dir.path().join("cmp");
    let reference = fast.join("solution.vtk");
    let o = adaptflow(&[
        "compare", "--preset", "two_channels", "--cells", "16,16", "--reference", path(&reference), "--out", path(&other),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv2 = std::fs::read_to_string(other.join("errors.csv")).unwrap();
    for (a, b) in csv.lines().zip(csv2.lines()).skip(1) {
        let fa: Vec<&str> = a.split(',').collect();
        let fb: Vec<&str> = b.split(',').collect();
        assert_eq!(fa[..2], fb[..2]);
        for c in 2..4 {
            let (x, y): (f64, f64) = (fa[c].parse().unwrap(), fb[c].parse().unwrap());
            assert!((x - y).abs() <= 1e-6 * x.abs().max(1e-12), "{a} vs {b}");
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = adaptflow(&["run", "--preset", "network", "--cells", "16,16", "--reference", "--out", path(d.path())]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["solution.vtk", "report.json"] {
        let a = std::fs::read(dirs[0].path().join(f)).unwrap();
        let b = std::fs::read(dirs[1].path().join(f)).unwrap();
        assert!(a == b, "{f} differs between runs");
    }
}

#[test]
fn bad_cells_argument_is_an_input_error() {
    let o = adaptflow(&["run", "--preset", "two_channels", "--cells", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let o = adaptflow(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}
