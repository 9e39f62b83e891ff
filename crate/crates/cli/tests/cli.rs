use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn besov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besov")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn data_rows(file: &Path) -> Vec<String> {
    std::fs::read_to_string(file)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_string)
        .collect()
}

#[test]
fn construct_zeta_writes_runs() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "zeta.csv");
    let o = besov(&["construct", "zeta", "--jmax", "20", "-o", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with(&format!("# besov {}\n", env!("CARGO_PKG_VERSION"))));
    assert!(text.contains("# jmax = 20\n"));
    assert_eq!(data_rows(Path::new(&out)).len(), 20);
}

#[test]
fn construct_lambda_norm_at_most_one() {
    let o = besov(&["construct", "lambda", "--p", "1", "--q", "inf", "--jmax", "34"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o).lines().find(|l| l.starts_with("bpq_norm")).unwrap().to_string();
    let v: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!(v <= 1.0, "{line}");
}

#[test]
fn construct_weighted_rejects_q_below_p() {
    let o = besov(&["construct", "weighted", "--p", "1", "--q", "0.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn measure_besov_of_sampled_bump() {
    let dir = TempDir::new().unwrap();
    let grid = path(&dir, "psi.json");
    assert_eq!(code(&besov(&["sample", "bump", "--n", "1", "--level", "8", "-o", &grid])), 0);
    let report = path(&dir, "report.csv");
    let o = besov(&["measure", "besov", "--grid", &grid, "--s", "1/2", "--p", "1", "--q", "inf", "-o", &report]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(Path::new(&report));
    let values: Vec<f64> = rows.iter().map(|r| r.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(values.iter().all(|v| v.is_finite()));
    let peak = values.iter().copied().fold(0.0, f64::max);
    assert!(*values.last().unwrap() < 0.25 * peak, "{values:?}");
    let text = stdout(&o);
    let total: f64 = text.lines().find_map(|l| l.strip_prefix("total = ")).unwrap().parse().unwrap();
    assert!(total.is_finite() && total > 0.0);
}

#[test]
fn measure_bmo_of_constant_is_zero() {
    let dir = TempDir::new().unwrap();
    let grid = path(&dir, "one.json");
    assert_eq!(code(&besov(&["sample", "constant", "--n", "1", "--level", "6", "-o", &grid])), 0);
    let report = path(&dir, "bmo.json");
    let o = besov(&["measure", "bmo", "--grid", &grid, "-o", &report]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["total"], 0.0);
    assert_eq!(v["meta"]["command"], "measure bmo");
}

#[test]
fn measure_weaklp_rejects_nonpositive_r() {
    let dir = TempDir::new().unwrap();
    let grid = path(&dir, "one.json");
    assert_eq!(code(&besov(&["sample", "constant", "--n", "1", "-o", &grid])), 0);
    assert_eq!(code(&besov(&["measure", "weaklp", "--grid", &grid, "--r", "0"])), 2);
    assert_eq!(code(&besov(&["measure", "weaklp", "--grid", &grid, "--r", "-1"])), 2);
    assert_eq!(code(&besov(&["measure", "weaklp", "--grid", &grid, "--r", "2"])), 0);
}

#[test]
fn measure_from_coefficients() {
    let dir = TempDir::new().unwrap();
    let coeffs = path(&dir, "c.csv");
    let o = besov(&["construct", "lambda", "--jmax", "4", "--coeffs-out", &coeffs]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = besov(&[
        "measure", "besov", "--coeffs", &coeffs, "--level", "6", "--lower", "-1", "--upper", "3", "--q", "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn io_and_usage_errors() {
    assert_eq!(code(&besov(&["measure", "besov", "--grid", "/nonexistent/grid.json"])), 1);
    assert_eq!(code(&besov(&["construct", "zeta", "--jmax", "0"])), 2);
    assert_eq!(code(&besov(&["construct", "lambda", "--p", "abc"])), 2);
    assert_eq!(code(&besov(&["frobnicate"])), 2);
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "bad.conf");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(code(&besov(&["--config", &cfg, "construct", "zeta"])), 2);
}

#[test]
fn config_file_and_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "run.conf");
    std::fs::write(&cfg, "# comment\np = 1/2\nq = inf\njmax = 12\n").unwrap();
    let out = path(&dir, "lambda.csv");
    let o = besov(&["--config", &cfg, "construct", "lambda", "--jmax", "10", "-o", &out]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# p = 1/2\n"));
    assert!(text.contains("# jmax = 10\n"));
}

#[test]
fn verify_lemmas_passes() {
    let o = besov(&["verify", "lemmas"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count() >= 5);
}

#[test]
fn verify_fact1_bounded_ratio() {
    let o = besov(&["verify", "fact1", "--p", "1", "--q", "1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS 4-control"));
    // the bound needs q <= p
    assert_eq!(code(&besov(&["verify", "fact1", "--p", "1", "--q", "2"])), 2);
}

#[test]
fn verify_thm1_1_all_divergent() {
    let o = besov(&["verify", "thm1_1", "--p", "1", "--q", "inf", "--s", "0.5", "--samples", "200", "--jmax", "34"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("100.0% of 200 samples divergent"));
}

#[test]
fn verify_regime_mismatch_is_usage_error() {
    let o = besov(&["verify", "thm1_2", "--mode", "bmo", "--s", "0.5", "--samples", "4"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_failure_exit_code() {
    let o = besov(&["verify", "thm1_4", "--samples", "20"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("FAIL 7a"));
}

#[test]
fn verify_outputs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let out = path(d, "out");
        let plot = path(d, "plot");
        let o = besov(&["verify", "thm1_3", "--samples", "25", "--out", &out, "--plot-data", &plot]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
    }
    for f in ["out/thm1_3.json", "out/thm1_3_curves.csv", "plot/thm1_3_membership.dat", "plot/thm1_3_unweighted.dat"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f}");
    }
    let dat = std::fs::read_to_string(a.path().join("plot/thm1_3_unweighted.dat")).unwrap();
    let row = dat.lines().find(|l| !l.is_empty() && !l.starts_with('#')).unwrap();
    assert_eq!(row.split_whitespace().count(), 2);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("out/thm1_3.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["q"], "2");
    assert_eq!(json["passed"], true);
}
