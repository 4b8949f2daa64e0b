use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn specgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specgap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn spec_path(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "specs", name].iter().collect();
    path.to_string_lossy().into_owned()
}

fn json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "exit {:?}: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("valid JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn certificate(report: &Value, name: &str) -> f64 {
    report["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no certificate {name}"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn two_state_report_is_reproducible() {
    let first = specgap(&["analyze", "@TwoState(0.5)"]);
    let second = specgap(&["analyze", "@TwoState(0.5)"]);
    assert_eq!(first.stdout, second.stdout);
    let report = json(&first);
    assert!((report["lambda1"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let best = &report["ranking"]["lambda1"]["best_lower"];
    assert!((best["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn constant_rates_are_sharp() {
    let report = json(&specgap(&["analyze", &spec_path("constant_rates.toml")]));
    assert!((certificate(&report, "one_sided_cheeger") - 1.0).abs() < 1e-10);
    assert!((certificate(&report, "tilted_conductance") - 1.0).abs() < 1e-10);
    assert!((report["lambda1"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-4);
}

#[test]
fn star_regime_separates_the_bounds() {
    let report = json(&specgap(&["analyze", &spec_path("star.toml")]));
    assert!((certificate(&report, "tilted_conductance") - 0.5).abs() < 1e-9);
    assert!(certificate(&report, "one_sided_cheeger") < 0.5);
}

#[test]
fn parity_chain_reports_trend_and_drift() {
    let report = json(&specgap(&["analyze", &spec_path("parity.toml")]));
    let trend = &report["k_prime_trend"][0]["minimum_up_to"];
    let at = |k: usize| trend[k]["minimum"].as_f64().unwrap();
    assert!(at(1) >= 10.0 * at(3));
    assert_eq!(report["drift"]["classification"], "negative_on_window");
}

#[test]
fn polynomial_spec_probes_integrability() {
    let report = json(&specgap(&["analyze", &spec_path("polynomial.toml")]));
    for entry in report["integrability"].as_array().unwrap() {
        assert_eq!(entry["verdict"], "diverges");
    }
}

#[test]
fn shipped_specs_verify() {
    for name in [
        "constant_rates.toml",
        "explicit.toml",
        "lattice.toml",
        "parity.toml",
        "polynomial.toml",
        "star.toml",
    ] {
        let out = specgap(&["verify", &spec_path(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn builtin_fixtures_verify() {
    for fixture in [
        "@TwoState(0.5)",
        "@TwoState(0.1)",
        "@Path(8)",
        "@Star(0.4, 50)",
        "@Star(2, 50)",
        "@ConstBD(4, 1, 2000)",
        "@PolyBD(2, 2000)",
        "@ParityBD(2000)",
    ] {
        assert_eq!(specgap(&["verify", fixture]).status.code(), Some(0), "{fixture}");
    }
}

#[test]
fn random_batch_verifies() {
    let report = json(&specgap(&["verify", "--seed", "11"]));
    assert_eq!(report["passed"], true);
    assert_eq!(report["chains"], 50);
}

#[test]
fn corrupted_certificate_fails_verification() {
    let out = specgap(&["verify", "@TwoState(0.5)", "--corrupt"]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["violations"][0]["certificate"]["name"], "corrupted");
    assert_eq!(specgap(&["verify", "--seed", "3", "--corrupt"]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.toml",
        "[chain]\nkind = \"birth_death\"\na = \"i^^2\"\nb = \"1\"\nN = 10\n",
    );
    let out = specgap(&["verify", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 3"));
    assert_eq!(specgap(&["analyze", "missing.toml"]).status.code(), Some(1));
    assert_eq!(specgap(&["analyze", "@NoSuch(1)"]).status.code(), Some(1));
    assert_eq!(specgap(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn sweep_shows_phase_change() {
    let out = specgap(&[
        "sweep",
        &spec_path("polynomial.toml"),
        "--param",
        "gamma",
        "--grid",
        "1.5,2.5",
        "--levels",
        "200,2000",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(3).map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1][2] < 0.5 * rows[0][2]);
    assert!(rows[3][2] >= 0.9 * rows[2][2]);
}

#[test]
fn sweep_over_constant_rates_tracks_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "const.toml",
        "[chain]\nkind = \"birth_death\"\na = \"$a\"\nb = \"1\"\nN = 400\n",
    );
    let csv = dir.path().join("out.csv");
    let out = specgap(&[
        "sweep",
        &spec,
        "--param",
        "a",
        "--grid",
        "2:6:2",
        "--levels",
        "400",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    for line in text.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').take(3).map(|x| x.parse().unwrap()).collect();
        let closed = (cells[0].sqrt() - 1.0).powi(2);
        assert!((cells[2] - closed).abs() < 0.05 * closed, "{line}");
    }
}

#[test]
fn empty_grid_gives_header_only() {
    let out = specgap(&["sweep", &spec_path("polynomial.toml"), "--param", "gamma", "--grid", ""]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "param,N,lambda1_exact,one_sided_cheeger,local_sandwich_lower,exponential_moment_upper\n"
    );
}

#[test]
fn moment_column_with_eps_star() {
    let out = specgap(&[
        "sweep",
        &spec_path("polynomial.toml"),
        "--param",
        "gamma",
        "--grid",
        "2",
        "--levels",
        "200",
        "--eps-star",
        "0.5",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().nth(1).unwrap().rsplit(',').next().unwrap();
    assert!(!last.is_empty());
}

#[test]
fn subsets_report_witnesses() {
    let report = json(&specgap(&["subsets", "@TwoState(0.3)", "--alpha", "0"]));
    assert_eq!(report["constants"][0]["witness_k_prime"], serde_json::json!([0]));
    let report = json(&specgap(&["subsets", "@Path(3)", "--alpha", "0"]));
    let witness = report["constants"][0]["witness_k"].as_array().unwrap();
    assert_eq!(witness[0], 0);
    assert_eq!(specgap(&["subsets", "@Path(25)"]).status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = specgap(&["analyze", "@Path(4)", "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(report["n"], 4);
}

#[test]
fn canonical_form_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["polynomial.toml", "explicit.toml", "lattice.toml", "star.toml"] {
        let once = specgap(&["show", &spec_path(name)]);
        assert!(once.status.success(), "{name}");
        let copy = write(dir.path(), name, std::str::from_utf8(&once.stdout).unwrap());
        let twice = specgap(&["show", &copy]);
        assert_eq!(once.stdout, twice.stdout, "{name}");
    }
}

#[test]
fn kappa_and_alpha_flags() {
    let report = json(&specgap(&["analyze", "@Path(5)", "--kappa", "2", "--alpha", "0.5"]));
    assert_eq!(report["kappa"], 2.0);
    assert!(report["skipped"].as_array().unwrap().is_empty());
    assert_eq!(specgap(&["analyze", "@Path(5)", "--kappa", "0.5"]).status.code(), Some(1));
    assert_eq!(report["constants"].as_array().unwrap().len(), 1);
    assert_eq!(specgap(&["analyze", "@Path(5)", "--alpha", "0.3"]).status.code(), Some(1));
}
