//! End-to-end runs of the `specprod` executable.

use std::process::Command;

fn specprod() -> Command {
    Command::new(env!("CARGO_BIN_EXE_specprod"))
}

#[test]
fn run_writes_report_plot_and_echoes_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("grid.cfg");
    std::fs::write(&config, "# small grid\ndegrees = 8, 16, 32, 64\npairing = diagonal\n").unwrap();
    let out = specprod()
        .args(["run", "zonal-sharpness", "--seed", "9", "--format", "json", "--plot", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("seed: 9"));
    assert!(stdout.contains("fit ratio vs p"));
    let json = std::fs::read(dir.path().join("zonal-sharpness.json")).unwrap();
    let doc = specprod_cli::parse_json_report(&json).unwrap();
    assert_eq!(doc.config.seed, 9);
    assert_eq!(doc.grid.samples.len(), 4);
    assert!(dir.path().join("zonal-sharpness.svg").exists());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    std::fs::write(&config, "degrees = dyadic(8, 64)\ndegrees = \n").unwrap();
    let out = specprod().args(["run", "bilinear-sharpness-s2", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    std::fs::write(&config, "degrees = \n").unwrap();
    let out = specprod().args(["run", "bilinear-sharpness-s2", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree grid spec"));

    let out = specprod().args(["run", "no-such-study"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_errors_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tight.cfg");
    std::fs::write(&config, "dimension = 3\nfamily_g = zonal-orthogonal\nnode_budget = 10\n").unwrap();
    let out = specprod().args(["run", "ratio-grid", "--config"]).arg(&config).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn show_config_round_trips_through_run() {
    let out = specprod().args(["show-config", "critical-exponent"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed = specprod_cli::ExperimentConfig::parse(&text, None).unwrap();
    assert_eq!(parsed, specprod_cli::ExperimentConfig::defaults(specprod_cli::Study::CriticalExponent));

    let list = specprod().arg("list").output().unwrap();
    assert_eq!(String::from_utf8(list.stdout).unwrap().lines().count(), 8);
}

#[test]
fn unwritable_output_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = specprod().args(["run", "frequency-disappearance", "--out"]).arg(blocker.join("sub")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("creating"));
}
