use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spinent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinent"))
        .args(args)
        .env_remove("SPINENT_JOBS")
        .output()
        .expect("binary runs")
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sweep_writes_one_row_per_size_and_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ev.csv");
    let o = spinent(&[
        "sweep", "--model", "xxz-half", "--geometry", "chain", "--sizes", "12,16", "--param", "-1.5:3:91", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "family,geometry,size,param,energy,czz,cxx,ev,concurrence,degeneracy,degenerate_flag"
    );
    assert_eq!(lines.len() - 1, 182);
    assert!(text.starts_with("# spinent "));
    assert!(text.lines().any(|l| l.starts_with("# config {")));
    assert!(text.lines().any(|l| l.starts_with("# wall_clock_seconds ")));
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first.len(), 11);
    assert_eq!(&first[..3], &["xxz_half", "chain", "12"]);
    assert_eq!(first[3], "-1.50000000000e0");
}

#[test]
fn output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let path = dir.path().join(name);
        let mut args = vec!["sweep", "--model", "xxz-half", "--sizes", "8,10", "--param", "-0.5:1.5:9", "--jobs", "2"];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", path.to_str().unwrap()]);
        assert!(spinent(&args).status.success());
        fs::read_to_string(&path).unwrap()
    };
    // Same file name, so the echoed configuration is identical too.
    let a = run("a.csv", &["--no-wall-clock"]);
    let b = run("a.csv", &["--no-wall-clock"]);
    assert_eq!(a, b);
    let timed = run("a.csv", &[]);
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("# wall_clock")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&a), strip(&timed));
}

#[test]
fn spin_one_rows_have_empty_concurrence() {
    let o = spinent(&["sweep", "--model", "blbq", "--sizes", "6", "--param", "0:1:3", "--no-wall-clock"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for line in &data_lines(&text)[1..] {
        assert_eq!(line.split(',').nth(8), Some(""));
    }
}

#[test]
fn sweep_json_carries_metadata_and_rows() {
    let o = spinent(&[
        "sweep", "--model", "xxz-one", "--sizes", "6", "--param", "0.5:1.5:3", "--beta", "0.1", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tool"], "spinent");
    assert_eq!(v["config"]["beta"], 0.1);
    assert_eq!(v["config"]["model"], "xxz-one");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["rows"][0]["family"], "xxz_one");
}

#[test]
fn spectrum_resolves_eightfold_first_excited_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spec.json");
    let o = spinent(&[
        "spectrum", "--model", "blbq", "--size", "6", "--theta", "4.71238898", "--levels", "12", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v = read_json(&out);
    assert_eq!(v["first_excited_multiplicity"], 8);
    assert_eq!(v["multiplets"][0]["multiplicity"], 1);
    assert_eq!(v["levels"].as_array().unwrap().len(), 12);
}

#[test]
fn bethe_energy_matches_exact_diagonalization() {
    let dir = tempfile::tempdir().unwrap();
    let bethe = dir.path().join("bethe.json");
    let spec = dir.path().join("spec.json");
    assert!(spinent(&["bethe", "--size", "12", "--delta", "0.5", "--out", bethe.to_str().unwrap()]).status.success());
    assert!(spinent(&[
        "spectrum", "--model", "xxz-half", "--size", "12", "--delta", "0.5", "--levels", "1", "--out",
        spec.to_str().unwrap()
    ])
    .status
    .success());
    let eb = read_json(&bethe)["energy"].as_f64().unwrap();
    let ed = read_json(&spec)["ground_energy"].as_f64().unwrap();
    assert!((eb - ed).abs() <= 1e-8, "{eb} vs {ed}");
    let czz = read_json(&bethe)["hellmann_feynman"]["czz"].as_f64().unwrap();
    assert!(czz < 0.0);
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        vec!["sweep", "--model", "xxz-half", "--sizes", "8", "--param", "3:1:5"],
        vec!["sweep", "--model", "xxz-half", "--sizes", "8", "--param", "0:1"],
        vec!["sweep", "--model", "heisenberg", "--sizes", "8", "--param", "0:1:3"],
        vec!["sweep", "--model", "xxz-half", "--sizes", "1", "--param", "0:1:3"],
        vec!["sweep", "--model", "xxz-half", "--geometry", "square", "--sizes", "2", "--param", "0:1:3"],
        vec!["sweep", "--model", "blbq", "--sizes", "6", "--param", "0:1:3", "--beta", "0.2"],
        vec!["spectrum", "--model", "blbq", "--size", "6", "--delta", "1"],
        vec!["bethe", "--size", "7", "--delta", "0.5"],
        vec!["bethe", "--size", "8", "--delta", "1.5"],
        vec!["check", "--criteria", "11"],
        vec!["sweep", "--unknown-flag"],
    ] {
        let o = spinent(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(spinent(&["--help"]).status.code(), Some(0));
    assert_eq!(spinent(&["sweep", "--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_flushes_annotated_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial.csv");
    let o = spinent(&[
        "sweep", "--model", "xxz-half", "--sizes", "6", "--param", "0:1:2", "--tol", "1e-30", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("# failed")).count(), 2);
    let rows = data_lines(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains(",nan,"));
}

#[test]
fn jobs_default_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_spinent"))
        .args(["sweep", "--model", "xxz-half", "--sizes", "6", "--param", "0:1:2", "--format", "json"])
        .env("SPINENT_JOBS", "3")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["jobs"], 3);
}

#[test]
fn check_reports_selected_criteria() {
    let o = spinent(&["check", "--criteria", "3,4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("criterion  3 PASS"));
    assert!(text.contains("criterion  4 PASS"));
    assert!(text.contains("2/2 criteria passed"));
}

#[test]
fn failing_criterion_sets_exit_code_three() {
    let o = spinent(&["check", "--criteria", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stdout).unwrap().contains("criterion  5 FAIL"));
}
