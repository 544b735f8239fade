use std::path::Path;

use proptest::prelude::*;

use adaptflow::config::{Config, SubBox, WellKind, WellSpec};
use adaptflow::scenario::{
    build_preset, extract_subbox, load_raw_field, preset_config, wells_to_sources, PresetOverrides, Scenario,
    K_CHANNEL, PRESETS,
};
use adaptflow::Error;
use adaptflow_core::grid::CartGrid;

fn small() -> PresetOverrides {
    PresetOverrides { cells: Some([20, 20]), ..Default::default() }
}

#[test]
fn preset_toml_round_trip_builds_identical_medium() {
    for name in ["two_channels", "network"] {
        for variant in ["a", "b"] {
            let cfg = preset_config(name, variant, &small()).unwrap();
            let text = cfg.to_toml().unwrap();
            let back = Config::from_toml(&text).unwrap();
            assert_eq!(back, cfg);
            let a = Scenario::from_config(cfg).unwrap();
            let b = Scenario::from_config(back).unwrap();
            let (ka, kb) = (a.log10_permeability(), b.log10_permeability());
            assert!(ka.iter().zip(&kb).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}

#[test]
fn two_channels_permeability_matches_golden() {
    let sc = build_preset("two_channels", "a", &small()).unwrap();
    let text: String = sc.log10_permeability().iter().map(|v| format!("{v:.12e}\n")).collect();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/two_channels_log10k_20x20.txt");
    if std::env::var_os("ADAPTFLOW_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let want = std::fs::read_to_string(&path).expect("golden file; run with ADAPTFLOW_BLESS=1 to create");
    assert_eq!(text, want);
}

#[test]
fn left_channel_is_narrower_than_right() {
    let sc = build_preset("two_channels", "a", &PresetOverrides { cells: Some([100, 10]), ..Default::default() }).unwrap();
    let row: Vec<bool> = (0..100).map(|i| sc.in_channel(i)).collect();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < row.len() {
        if row[i] {
            let start = i;
            while i < row.len() && row[i] {
                i += 1;
            }
            runs.push(i - start);
        }
        i += 1;
    }
    assert_eq!(runs.len(), 2);
    assert!(runs[0] < runs[1]);
    let logk = sc.log10_permeability();
    for (c, inside) in row.iter().enumerate() {
        assert_eq!(*inside, logk[c] == K_CHANNEL.log10());
    }
}

#[test]
fn seed_changes_background_only() {
    let a = build_preset("two_channels", "a", &small()).unwrap();
    let ov = PresetOverrides { seed: Some(7), ..small() };
    let b = build_preset("two_channels", "a", &ov).unwrap();
    let (ka, kb) = (a.log10_permeability(), b.log10_permeability());
    assert_ne!(ka, kb);
    for c in 0..ka.len() {
        assert_eq!(a.in_channel(c), b.in_channel(c));
        if a.in_channel(c) {
            assert_eq!(ka[c], kb[c]);
        }
    }
}

#[test]
fn unknown_preset_lists_valid_names() {
    let err = build_preset("nope", "a", &PresetOverrides::default()).unwrap_err();
    assert!(matches!(err, Error::UnknownPreset { .. }));
    let msg = err.to_string();
    for p in PRESETS {
        assert!(msg.contains(p), "{msg}");
    }
}

#[test]
fn spe10_without_data_reports_instructions() {
    let dir = tempfile::tempdir().unwrap();
    let ov = PresetOverrides { data_dir: Some(dir.path().to_path_buf()), ..Default::default() };
    let err = build_preset("spe10_layer35", "a", &ov).unwrap_err();
    assert!(matches!(err, Error::DatasetRequired { .. }), "{err}");
}

fn nested_subbox(block: &[f64], dims: [usize; 3], sub: &SubBox) -> Vec<f64> {
    let mut out = Vec::new();
    for k in sub.k[0]..sub.k[1] {
        for j in sub.j[0]..sub.j[1] {
            for i in sub.i[0]..sub.i[1] {
                out.push(block[i + dims[0] * (j + dims[1] * k)]);
            }
        }
    }
    out
}

fn range(n: usize) -> impl Strategy<Value = [usize; 2]> {
    (0..n).prop_flat_map(move |a| (a + 1..=n).prop_map(move |b| [a, b]))
}

fn dims_and_box() -> impl Strategy<Value = ([usize; 3], SubBox, usize)> {
    (1usize..6, 1usize..6, 1usize..5, 1usize..4).prop_flat_map(|(nx, ny, nz, blocks)| {
        (range(nx), range(ny), range(nz), 0..blocks)
            .prop_map(move |(i, j, k, b)| ([nx, ny, nz], SubBox { i, j, k }, blocks * 10 + b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn file_subbox_matches_nested_loops((dims, sub, code) in dims_and_box(), seed in any::<u32>()) {
        let (blocks, pick) = (code / 10, code % 10);
        let n: usize = dims.iter().product();
        let values: Vec<f64> = (0..n * blocks).map(|v| (v as f64 + 0.5) * (1.0 + f64::from(seed % 97))).collect();
        let text: String = values.chunks(7).map(|c| c.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join("  ") + "\n").collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.dat");
        std::fs::write(&path, text).unwrap();
        let loaded = load_raw_field(&path, dims, blocks).unwrap();
        prop_assert_eq!(loaded.len(), blocks);
        let block = &values[pick * n..(pick + 1) * n];
        prop_assert_eq!(&loaded[pick][..], block);
        prop_assert_eq!(extract_subbox(block, dims, &sub).unwrap(), nested_subbox(block, dims, &sub));
    }

    #[test]
    fn wells_conserve_total_rate(
        nz in 1usize..6,
        rates in prop::collection::vec((0usize..4, 0usize..4, 0.01f64..100.0, any::<bool>(), 0.0f64..1.0), 1..5),
    ) {
        let grid = CartGrid::new_3d([4, 4, nz], [2.0, 3.0, 0.5]).unwrap();
        let wells: Vec<WellSpec> = rates
            .iter()
            .map(|&(i, j, r, inj, d)| WellSpec {
                kind: if inj { WellKind::Injector } else { WellKind::Producer },
                i,
                j,
                depth: Some((d * nz as f64).max(0.25)),
                rate: if inj { r } else { -r },
            })
            .collect();
        let q = wells_to_sources(&grid, &wells).unwrap();
        let total: f64 = q.values().iter().sum::<f64>() * grid.cell_volume();
        let want: f64 = wells.iter().map(|w| w.rate).sum();
        let scale: f64 = wells.iter().map(|w| w.rate.abs()).sum();
        prop_assert!((total - want).abs() <= 1e-12 * scale);
        for (n, w) in wells.iter().enumerate() {
            let d = w.depth.unwrap();
            for l in (d.ceil() as usize)..nz {
                let hit = wells.iter().enumerate().any(|(m, o)| m != n && o.i == w.i && o.j == w.j);
                if !hit {
                    prop_assert_eq!(q.values()[grid.cell_index(w.i, w.j, l)], 0.0);
                }
            }
        }
    }
}
