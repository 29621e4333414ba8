use std::fs;
use std::process::Command;

use slglue::report::{parse_summary, CURVES_HEADER};

fn slglue() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_slglue"));
    c.env_remove("SLGLUE_OUT");
    c
}

#[test]
fn passing_suite_exits_zero_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = slglue().args(["flat-identities", "--seed", "5", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("10 checks: 10 passed, 0 failed"), "{table}");
    let summary = parse_summary(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!((summary.suite.as_str(), summary.seed), ("flat-identities", 5));
    assert!(summary.checks.iter().all(|c| !c.anchor.is_empty()));
    assert_eq!(fs::read_to_string(dir.path().join("curves.csv")).unwrap(), format!("{CURVES_HEADER}\n"));
    assert_eq!(fs::read_to_string(dir.path().join("report.txt")).unwrap(), table);
}

#[test]
fn every_table_line_names_its_claim() {
    let dir = tempfile::tempdir().unwrap();
    let out = slglue().arg("gluing").arg("--out").arg(dir.path()).output().unwrap();
    let table = String::from_utf8_lossy(&out.stdout);
    let summary = parse_summary(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    for c in &summary.checks {
        let line = table.lines().find(|l| l.starts_with(&c.id)).unwrap();
        assert!(line.contains(&c.anchor), "{line}");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested");
    let out = slglue().arg("gluing").env("SLGLUE_OUT", &target).output().unwrap();
    assert!(out.status.success());
    assert!(target.join("summary.json").exists());
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# gluing only\nseed = 11\n[grid]\nt_max_exp = 12\n").unwrap();
    let out = slglue()
        .arg("gluing")
        .arg("--config")
        .arg(&cfg)
        .args(["--t-min-exp", "5", "--fit-tol", "0.2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = parse_summary(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.seed, 11);
    let cert = summary.checks.iter().find(|c| c.id == "gluing.cutoff.certificate").unwrap();
    assert!(cert.detail.contains("over 8 t values"), "{}", cert.detail);
}

#[test]
fn invalid_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "model.c1 = 0.2\nmodel.c2 = 0.4\nmodel.l = 0\n").unwrap();
    let out = slglue().arg("gluing").arg("--config").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("c1") && err.contains("c2") && err.contains("l = 0"), "{err}");
    let out = slglue().args(["gluing", "--config", "/nonexistent/run.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/run.cfg"));
}

#[test]
fn unwritable_output_is_reported_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    fs::write(&file, "").unwrap();
    let out = slglue().arg("gluing").arg("--out").arg(file.join("sub")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("plain"));
}
