use std::path::Path;
use std::process::{Command, Output};

use v2x_cli::report::{parse_report_csv, parse_report_json};

fn v2xsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_v2xsim")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("in.toml");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const SMALL: &str = "[scenario]\nkind = \"suburban-cross\"\ndensity = 50\n\n[campaign]\nsnapshots = 4\n";

#[test]
fn run_writes_report_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = v2xsim(&["run", "--config", &cfg, "--seed", "9", "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let reports = parse_report_csv(&std::fs::read(out.join("report.csv")).unwrap()).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].base_seed, 9);
    assert_eq!(reports[0].snapshots, 4);
    assert!(out.join("config.toml").exists());
}

#[test]
fn echoed_config_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(v2xsim(&["run", "--config", &cfg, "--out", a.to_str().unwrap(), "--format", "json"]).status.success());
    let echoed = a.join("config.toml");
    assert!(v2xsim(&["run", "--config", echoed.to_str().unwrap(), "--out", b.to_str().unwrap(), "--format", "json"])
        .status
        .success());
    let ra = std::fs::read(a.join("report.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("report.json")).unwrap());
    assert_eq!(parse_report_json(&ra).unwrap().len(), 1);
}

#[test]
fn sweep_then_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[scenario]\ndensity = 25\n\n[campaign]\nsnapshots = 3\n");
    let out = dir.path().join("sweep");
    let o = v2xsim(&[
        "sweep",
        "--config",
        &cfg,
        "--cw",
        "31,127",
        "--scenario",
        "suburban-cross,urban-grid",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let plot = dir.path().join("plot.csv");
    let o = v2xsim(&["plotdata", "--in", out.to_str().unwrap(), "--out", plot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(plot).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "density,cw,suburban_raw,urban_raw,urban_discounted");
    assert_eq!(lines.len(), 3);
}

#[test]
fn plotdata_reports_missing_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("sweep");
    let o = v2xsim(&["sweep", "--config", &cfg, "--cw", "31", "--scenario", "suburban-cross", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let o = v2xsim(&["plotdata", "--in", out.to_str().unwrap(), "--out", dir.path().join("p.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("urban-grid/cw=31"));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "[mac]\n\ncw = -1\n");
    let o = v2xsim(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("mac.cw") && err.contains("line 3"), "{err}");

    let o = v2xsim(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap(), "--out", "x"]);
    assert_eq!(o.status.code(), Some(1));

    let o = v2xsim(&["run", "--out", "x", "--format", "xml", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(v2xsim(&["--help"]).status.code(), Some(0));
}
