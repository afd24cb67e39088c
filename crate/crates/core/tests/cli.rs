use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qeraser::io::{matrix_json, parse_decomposition, parse_matrix, parse_pattern_csv, read_text, MatrixKind};
use qeraser::numerics::ComplexMatrix;
use qeraser::DensityMatrix;
use tempfile::TempDir;

fn qeraser(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qeraser"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn real_xi(dir: &Path, name: &str, d: usize, entries: &[f64]) -> PathBuf {
    let m = ComplexMatrix::from_real(d, entries).unwrap();
    write(dir, name, &matrix_json(MatrixKind::Correlation, &m))
}

#[test]
fn validate_reports_classification() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    real_xi(dir, "id.json", 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    real_xi(dir, "ones.json", 2, &[1.0; 4]);
    real_xi(dir, "bad.json", 2, &[1.0, 2.0, 2.0, 1.0]);

    let o = qeraser(&["validate", "id.json"], dir);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("valid, complete, not extremal"));

    let o = qeraser(&["validate", "ones.json"], dir);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("valid, not complete, extremal rank-1"));

    let o = qeraser(&["validate", "bad.json"], dir);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("-9.99999"));

    let o = qeraser(&["--json", "validate", "id.json"], dir);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["extremality"], "not_extremal");
    assert_eq!(v["rank"], 3);
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "garbage.json", "{ not json");
    assert_eq!(code(&qeraser(&["validate", "missing.json"], dir)), 4);
    assert_eq!(code(&qeraser(&["validate", "garbage.json"], dir)), 4);
    assert_eq!(code(&qeraser(&["eraser", "-d", "1"], dir)), 2);
    assert_eq!(code(&qeraser(&["no-such-command"], dir)), 2);
    assert_eq!(code(&qeraser(&["--help"], dir)), 0);

    // a decomposition of ξ = I cannot correct ξ with a nonzero coherence
    real_xi(dir, "xi.json", 2, &[1.0, 0.5, 0.5, 1.0]);
    real_xi(dir, "id.json", 2, &[1.0, 0.0, 0.0, 1.0]);
    let plus = DensityMatrix::flat_superposition(2);
    write(dir, "rho.json", &matrix_json(MatrixKind::State, plus.matrix()));
    assert_eq!(code(&qeraser(&["--out", "dec_id.json", "decompose", "id.json"], dir)), 0);
    let o = qeraser(&["correct", "xi.json", "rho.json", "--dec", "dec_id.json"], dir);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&qeraser(&["bounds", "xi.json", "--dec", "dec_id.json"], dir)), 3);

    // rank-2 d=4 correlation matrix for which the search finds no decomposition
    assert_eq!(code(&qeraser(&["--seed", "0", "--out", "x4.json", "sample", "correlation", "-d", "4", "--rank", "2"], dir)), 0);
    let o = qeraser(&["decompose", "x4.json", "--restarts", "8"], dir);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("best residual"));

    let bad_tol = write(dir, "tol.json", r#"{"herm": "x"}"#);
    assert_eq!(code(&qeraser(&["--tol", bad_tol.to_str().unwrap(), "validate", "id.json"], dir)), 4);
}

#[test]
fn sample_and_decompose_round_trip() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    for args in [
        ["--seed", "3", "--out", "xi.json", "sample", "correlation", "-d", "3"],
        ["--seed", "4", "--out", "rho.json", "sample", "state", "-d", "3", ],
    ] {
        assert_eq!(code(&qeraser(&args, dir)), 0);
    }
    let text = read_text(&dir.join("xi.json")).unwrap();
    let (kind, m) = parse_matrix(&text).unwrap();
    assert_eq!(kind, MatrixKind::Correlation);
    assert_eq!(matrix_json(kind, &m), text);

    let o = qeraser(&["--seed", "9", "--out", "dec_a.json", "decompose", "xi.json"], dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = qeraser(&["--seed", "9", "--out", "dec_b.json", "--json", "decompose", "xi.json"], dir);
    assert_eq!(code(&o), 0);
    let a = read_text(&dir.join("dec_a.json")).unwrap();
    let b = read_text(&dir.join("dec_b.json")).unwrap();
    assert_eq!(a, b, "same seed must give identical files");
    let dec = parse_decomposition(&a).unwrap();
    assert_eq!(qeraser::io::decomposition_json(&dec), a);

    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["verification"]["passed"], true);
    assert!(report["verification"]["residual"].as_f64().unwrap() <= 1e-8);

    let o = qeraser(&["--json", "correct", "xi.json", "rho.json", "--dec", "dec_a.json"], dir);
    assert_eq!(code(&o), 0);
    let run: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(run["residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(run["outcomes"].as_array().unwrap().len(), dec.num_terms());

    let o = qeraser(&["--json", "bounds", "xi.json", "--dec", "dec_a.json"], dir);
    assert_eq!(code(&o), 0);
    let b: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(b["lower_bound_satisfied"], true);
    assert_eq!(b["log_base"], 2);
}

#[test]
fn qubit_and_identity_use_closed_forms() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    real_xi(dir, "q.json", 2, &[1.0, 0.6, 0.6, 1.0]);
    real_xi(dir, "id3.json", 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    let o = qeraser(&["--json", "decompose", "q.json"], dir);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["method"], "closed-form qubit");
    assert_eq!(v["decomposition"]["weights"], serde_json::json!([0.8, 0.2]));
    let o = qeraser(&["--json", "decompose", "id3.json"], dir);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["method"], "closed-form clock");
    assert!((v["verification"]["entropy_bits"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-12);
    assert_eq!(v["verification"]["orthogonal_family"], true);
}

#[test]
fn evolve_writes_state_and_csv() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    real_xi(dir, "xi.json", 2, &[1.0, 0.5, 0.5, 1.0]);
    real_xi(dir, "id.json", 2, &[1.0, 0.0, 0.0, 1.0]);
    let plus = DensityMatrix::flat_superposition(2);
    let rho_text = matrix_json(MatrixKind::State, plus.matrix());
    write(dir, "rho.json", &rho_text);

    assert_eq!(code(&qeraser(&["--out", "n0.json", "evolve", "-n", "0", "xi.json", "rho.json"], dir)), 0);
    assert_eq!(read_text(&dir.join("n0.json")).unwrap(), rho_text);

    assert_eq!(code(&qeraser(&["--out", "diag.json", "evolve", "-n", "1", "id.json", "rho.json"], dir)), 0);
    let (_, m) = parse_matrix(&read_text(&dir.join("diag.json")).unwrap()).unwrap();
    assert_eq!(m, ComplexMatrix::from_real(2, &[0.5, 0.0, 0.0, 0.5]).unwrap());

    let o = qeraser(&["evolve", "-n", "10", "--csv", "m.csv", "xi.json", "rho.json"], dir);
    assert_eq!(code(&o), 0);
    let csv = read_text(&dir.join("m.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,m_0_1"));
    for (n, line) in lines.enumerate() {
        let m: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((m.log2() - (-1.0 - n as f64)).abs() < 1e-12);
    }
}

#[test]
fn eraser_outputs() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let o = qeraser(&["--out", "er", "eraser", "-d", "3", "--samples", "90"], dir);
    assert_eq!(code(&o), 0);
    let out = dir.join("er");
    for name in ["input.csv", "decohered.csv", "corrected_0.csv", "corrected_2.csv", "conditional_1.csv"] {
        let points = parse_pattern_csv(&read_text(&out.join(name)).unwrap()).unwrap();
        assert_eq!(points.len(), 90);
    }
    let ledger: serde_json::Value = serde_json::from_str(&read_text(&out.join("ledger.json")).unwrap()).unwrap();
    assert!((ledger["ledger"]["stored_bits"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-12);
    assert!((ledger["outcome_entropy_bits"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-12);
    assert!(stdout(&o).contains("log base 2"));

    // rerun is byte-identical
    let again = qeraser(&["--out", "er2", "eraser", "-d", "3", "--samples", "90"], dir);
    assert_eq!(code(&again), 0);
    for name in ["ledger.json", "corrected_1.csv"] {
        assert_eq!(read_text(&out.join(name)).unwrap(), read_text(&dir.join("er2").join(name)).unwrap());
    }
}
