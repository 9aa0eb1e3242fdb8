use std::path::Path;
use std::process::Command;

fn lpp_shock(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_lpp-shock")).args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_reports_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = two_speed\nalpha = 0.5\nt = 120\nN = 40\n");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    lpp_shock(&["run", "--config", &cfg, "--seed", "5", "--threads", "1", "--out", a.to_str().unwrap()]);
    lpp_shock(&["run", "--config", &cfg, "--seed", "5", "--threads", "2", "--out", b.to_str().unwrap()]);
    for f in ["report.json", "ecdf.csv", "samples.csv", "timings.json"] {
        assert!(a.join(f).exists(), "{f}");
    }
    for f in ["report.json", "ecdf.csv", "samples.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["master_seed"], 5);
    assert_eq!(report["samples"].as_array().unwrap().len(), 40);
    let samples = std::fs::read_to_string(a.join("samples.csv")).unwrap();
    assert!(samples.starts_with("replica,statistic"));
    assert_eq!(samples.lines().count(), 41);
    let ecdf = std::fs::read_to_string(a.join("ecdf.csv")).unwrap();
    assert_eq!(ecdf.lines().next(), Some("s,empirical,predicted"));
}

#[test]
fn json_config_and_other_seed_differ() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"experiment": "tails", "t": 80, "n": 10, "out_dir": "unused"}"#);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    lpp_shock(&["run", "--config", &cfg, "--seed", "1", "--out", a.to_str().unwrap()]);
    lpp_shock(&["run", "--config", &cfg, "--seed", "2", "--out", b.to_str().unwrap()]);
    assert_ne!(std::fs::read(a.join("samples.csv")).unwrap(), std::fs::read(b.join("samples.csv")).unwrap());
}

#[test]
fn predict_and_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = bernoulli\nrho_minus = 0.25\nrho_plus = 0.75\ns = [-1, 0, 1]\n");
    let out = lpp_shock(&["predict", "--config", &cfg]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    assert!((rows[1][1] - 0.5).abs() < 1e-12);
    assert!(rows[0][1] < rows[1][1] && rows[1][1] < rows[2][1]);

    lpp_shock(&["tw-table", "--from", "-4", "--to", "2", "--step", "0.5", "--out", tmp.path().to_str().unwrap()]);
    let table = std::fs::read_to_string(tmp.path().join("tw_table.csv")).unwrap();
    assert_eq!(table.lines().count(), 14);
    assert_eq!(table.lines().next(), Some("s,f_gue,f_goe,density_gue,density_goe"));
}

#[test]
fn verify_small() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lpp_shock(&["verify", "--instances", "5", "--out", tmp.path().to_str().unwrap()]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("all checks passed"));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn bad_config_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = two_speed\nalpha = 2\n");
    let out = Command::new(env!("CARGO_BIN_EXE_lpp-shock")).args(["run", "--config", &cfg, "--out", "x"]).output().unwrap();
    assert!(!out.status.success());
}
