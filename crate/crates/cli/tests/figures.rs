//! Golden files for the shipped figures. Regenerate with `UPDATE_GOLDEN=1`.

use std::fs;
use std::path::{Path, PathBuf};

use crisis_bargain_cli::emit::read_region_csv;
use crisis_bargain_cli::{run_captured, Context};

const CELLS: &str = "40";

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Runs a figure command into a fresh directory and returns it with the
/// names of the files written.
fn render(args: &[&str]) -> (tempfile::TempDir, Vec<String>) {
    let dir = tempfile::tempdir().unwrap();
    let ctx = Context { out_dir: Some(dir.path().to_path_buf()) };
    let argv = ["crisis-bargain", "figure"].into_iter().chain(args.iter().copied()).chain(["--cells", CELLS]);
    let (code, out, err) = run_captured(&ctx, argv);
    assert_eq!(code, 0, "{err}");
    let summary: serde_json::Value = serde_json::from_str(&out).unwrap();
    let written = summary["written"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| Path::new(p.as_str().unwrap()).file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    (dir, written)
}

fn check_golden(args: &[&str]) {
    let (dir, written) = render(args);
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for name in written {
        let produced = fs::read(dir.path().join(&name)).unwrap();
        let golden = golden_dir().join(&name);
        if update {
            fs::create_dir_all(golden_dir()).unwrap();
            fs::write(&golden, &produced).unwrap();
            continue;
        }
        let expected = fs::read(&golden).unwrap_or_else(|e| panic!("{}: {e} (run with UPDATE_GOLDEN=1)", golden.display()));
        assert!(produced == expected, "{name} differs from its golden file");
    }
}

#[test]
fn regions_golden() {
    check_golden(&["regions", "--preset", "demo-b", "-o", "regions.svg"]);
}

#[test]
fn mu_shift_golden() {
    check_golden(&["mu-shift", "--preset", "demo-b", "-o", "mu_shift.svg"]);
}

#[test]
fn p_shift_golden() {
    check_golden(&["p-shift", "--preset", "demo-b", "-o", "p_shift.svg"]);
}

#[test]
fn empty_band_golden() {
    check_golden(&["regions", "--preset", "empty-band", "-o", "empty_band.svg"]);
}

#[test]
fn rendering_is_byte_stable() {
    let (a, names) = render(&["p-shift", "-o", "f.svg"]);
    let (b, _) = render(&["p-shift", "-o", "f.svg"]);
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
    }
}

#[test]
fn csv_twin_round_trips() {
    let (dir, _) = render(&["regions", "-o", "r.svg"]);
    let rows = read_region_csv(fs::File::open(dir.path().join("r.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 40 * 40);
    for row in &rows {
        assert_eq!(Some(row.label().unwrap()), row.label_from_margins());
    }
    // c_D outer, c_R inner
    assert!(rows[0].c_d == rows[39].c_d && rows[0].c_r < rows[39].c_r && rows[40].c_d > rows[0].c_d);
}

#[test]
fn svg_has_axes_legend_and_boundaries() {
    let (dir, _) = render(&["regions", "-o", "r.svg"]);
    let svg = fs::read_to_string(dir.path().join("r.svg")).unwrap();
    for needle in [">c_R<", ">c_D<", "class=\"legend\"", "War", "Inefficient peace", "Efficient peace"] {
        assert!(svg.contains(needle), "missing {needle}");
    }
    assert_eq!(svg.matches("class=\"boundary-efficient\"").count(), 1);
    assert_eq!(svg.matches("class=\"boundary-inefficient\"").count(), 1);
    assert_eq!(svg.matches("stroke-dasharray").count(), 3); // two boundaries and the legend key
    assert!(svg.contains("class=\"joint-note\""));
}
