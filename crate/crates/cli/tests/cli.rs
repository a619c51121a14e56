use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn gqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gqc")).args(args).output().expect("spawn gqc")
}

fn run_in(out: &Path, sub: &str, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    gqc(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unitary_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let spec = problem("unitary.json");
    let o = run_in(dir.path(), "unitary", &["--spec", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("G_hs(t=1) = 0.408248290464"));
    let csv = std::fs::read_to_string(dir.path().join("unitary_seed0.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "t,dim,complexity,traceless_complexity,hs_norm");
    assert!(lines[1].starts_with("1,2,0.408248290464,"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("unitary_seed0.meta.json")).unwrap()).unwrap();
    assert!(meta["timestamp"].is_string());
    assert_eq!(meta["kind"], "unitary");
}

#[test]
fn h_flag_and_t_grid() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    std::fs::write(&h, r#"{"dim":2,"matrix":[[[0.5,0],[0,0]],[[0,0],[-0.5,0]]]}"#).unwrap();
    let o = run_in(dir.path(), "unitary", &["--h", h.to_str().unwrap(), "--t-grid", "0:2:5", "--format", "csv,svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("unitary_seed0.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().nth(1).unwrap().starts_with("0,2,0,"));
    let svg = std::fs::read_to_string(dir.path().join("unitary_seed0.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn invalid_rho_e_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "channel", &["--spec", problem("invalid_rho_e.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rho_E: trace"), "{}", stderr(&o));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "no output on failure");
}

#[test]
fn nan_entry_names_its_index() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "unitary", &["--spec", problem("nan_entry.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("[1][1]"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(gqc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gqc(&["unitary", "--t", "1", "--t-grid", "0:1:2"]).status.code(), Some(2));
    assert_eq!(gqc(&["channel"]).status.code(), Some(2));
    assert_eq!(gqc(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(gqc(&["--help"]).status.code(), Some(0));
}

#[test]
fn subcommand_must_match_problem_kind() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "noise", &["--spec", problem("unitary.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind"));
}

#[test]
fn infeasible_intrinsic_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "intrinsic", &["--spec", problem("intrinsic_infeasible.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("infeasible"));
}

#[test]
fn missing_file_exits_one() {
    let o = gqc(&["channel", "--spec", "/nonexistent/problem.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "verify", &["--suite", "coherence", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(dir.path().join("verify_seed5.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.contains(",true,")), "{csv}");
}

#[test]
fn empty_grid_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("empty.json");
    let h = r#"{"dim":2,"matrix":[[[0.5,0],[0,0]],[[0,0],[-0.5,0]]]}"#;
    std::fs::write(&spec, format!(r#"{{"kind":"unitary","payload":{{"h":{h},"t_grid":[]}}}}"#)).unwrap();
    let o = run_in(dir.path(), "unitary", &["--spec", spec.to_str().unwrap(), "--format", "csv,svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("unitary_seed0.csv")).unwrap();
    assert_eq!(csv, "t,dim,complexity,traceless_complexity,hs_norm\n");
    assert!(!dir.path().join("unitary_seed0.svg").exists());
}

#[test]
fn gksl_bound_rows_dominate() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "gksl-bound", &["--spec", problem("gksl_dephasing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("gksl_bound_seed0.csv")).unwrap();
    let head = rdr.headers().unwrap().clone();
    let col = |n: &str| head.iter().position(|h| h == n).unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let v = |n: &str| rec[col(n)].parse::<f64>().unwrap();
        assert!(v("complexity_value") <= v("bound_reduced") + 1e-9);
        assert!(v("bound_reduced") <= v("bound_full") + 1e-9);
        assert!((v("lindblad_hs_sum") - 1.0).abs() < 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 7);
}

#[test]
fn bench_without_spec_uses_shipped_set() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "bench", &["--seed", "7", "--format", "csv,svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in [
        "bench_seed7_dephasing.csv",
        "bench_seed7_amplitude_damping.csv",
        "bench_seed7_depolarizing.csv",
        "bench_seed7_pauli.csv",
        "bench_seed7_trends.csv",
        "bench_seed7.svg",
        "bench_seed7.meta.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

fn csv_bodies(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn intrinsic_is_deterministic_across_thread_counts() {
    let spec = problem("intrinsic_dephasing.json");
    let mut runs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_gqc"))
            .args(["intrinsic", "--spec", spec.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
            .env("GQC_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(dir.path().join("intrinsic_seed3.dilation.json").exists());
        runs.push((csv_bodies(dir.path()), std::fs::read(dir.path().join("intrinsic_seed3.dilation.json")).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
}
