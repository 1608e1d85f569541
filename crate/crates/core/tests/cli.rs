mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn driftbench(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftbench"))
        .args(args)
        .current_dir(cwd)
        .env_remove("DRIFTBENCH_DATA")
        .output()
        .unwrap()
}

fn run_dir(out: &Output) -> PathBuf {
    let stdout = String::from_utf8_lossy(&out.stdout);
    PathBuf::from(stdout.split_whitespace().next().expect("run directory printed"))
}

fn bench_standins(dir: &Path, out: &str, extra: &[&str]) -> Output {
    let mut args = vec!["bench", "--manifest", "standins.manifest", "--data-root", ".", "--out", out];
    args.extend_from_slice(extra);
    driftbench(&args, dir)
}

#[test]
fn bench_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    common::write_standins(dir.path());
    let out = bench_standins(dir.path(), "r", &["--techniques", "LC,MC", "--datasets", "SA"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join(run_dir(&out));
    let cells = fs::read_to_string(run.join("cells.csv")).unwrap();
    assert_eq!(cells.lines().count(), 3);
    for f in ["tables.txt", "events.csv", "config-echo.toml", "timings.csv"] {
        assert!(run.join(f).exists(), "{f}");
    }
    assert!(fs::read_to_string(run.join("tables.txt")).unwrap().contains("MedRank"));
}

#[test]
fn bench_is_byte_identical_and_echo_replays() {
    let dir = tempfile::tempdir().unwrap();
    common::write_standins(dir.path());
    let args = ["--techniques", "NB,DDM-NB,R-HT,S-RF", "--seed", "42"];
    let a = bench_standins(dir.path(), "a", &args);
    let b = bench_standins(dir.path(), "b", &args);
    assert_eq!(a.status.code(), Some(0));
    let (ra, rb) = (dir.path().join(run_dir(&a)), dir.path().join(run_dir(&b)));
    let cells_a = fs::read(ra.join("cells.csv")).unwrap();
    assert_eq!(cells_a, fs::read(rb.join("cells.csv")).unwrap());

    let echo = ra.join("config-echo.toml");
    let c = driftbench(&["bench", "--config", echo.to_str().unwrap(), "--out", "c"], dir.path());
    assert_eq!(c.status.code(), Some(0), "{}", String::from_utf8_lossy(&c.stderr));
    let rc = dir.path().join(run_dir(&c));
    assert_eq!(cells_a, fs::read(rc.join("cells.csv")).unwrap());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    common::write_standins(dir.path());
    for args in [
        vec!["bench", "--bogus"],
        vec!["bench", "--techniques", "HAT"],
        vec!["bench", "--start-mode", "tepid"],
        vec!["dilemma", "--k", "0"],
        vec!["dilemma", "--k", "a-b"],
    ] {
        let out = driftbench(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    fs::write(dir.path().join("empty.manifest"), "# nothing\n").unwrap();
    let out = driftbench(&["validate-datasets", "--manifest", "empty.manifest"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_dataset_fails_cells_and_names_manifest_entry() {
    let dir = tempfile::tempdir().unwrap();
    let out = driftbench(&["bench", "--techniques", "LC", "--datasets", "EL", "--out", "r"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("EL") && err.contains("manifest"), "{err}");
}

#[test]
fn dilemma_grid_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let all = driftbench(&["dilemma", "--out", "d"], dir.path());
    assert_eq!(all.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join(run_dir(&all)).join("dilemma.csv")).unwrap();
    assert_eq!(csv.lines().count(), 100);

    let one = driftbench(&["dilemma", "--k", "50", "--out", "d", "--emit-histograms"], dir.path());
    let run = dir.path().join(run_dir(&one));
    assert_eq!(fs::read_to_string(run.join("dilemma.csv")).unwrap().lines().count(), 2);
    assert!(run.join("histograms.csv").exists());

    let a = driftbench(&["dilemma", "--seed", "7", "--out", "x"], dir.path());
    let b = driftbench(&["dilemma", "--seed", "7", "--out", "y"], dir.path());
    assert_eq!(
        fs::read(dir.path().join(run_dir(&a)).join("dilemma.csv")).unwrap(),
        fs::read(dir.path().join(run_dir(&b)).join("dilemma.csv")).unwrap()
    );
}

#[test]
fn validate_datasets_reports_truncation() {
    let dir = tempfile::tempdir().unwrap();
    common::write_standins(dir.path());
    let ok = driftbench(&["validate-datasets", "--manifest", "standins.manifest", "--data-root", "."], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).matches("PASS").count(), 3);

    let path = dir.path().join("SA.csv");
    let text = fs::read_to_string(&path).unwrap();
    let truncated: Vec<&str> = text.lines().take(101).collect();
    fs::write(&path, truncated.join("\n")).unwrap();
    let bad = driftbench(&["validate-datasets", "--manifest", "standins.manifest", "--data-root", "."], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    let report = String::from_utf8_lossy(&bad.stdout);
    assert!(report.contains("FAIL SA") && report.contains("600") && report.contains("100"), "{report}");
}
