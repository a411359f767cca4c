//! End-to-end checks of the command-line binary: one process per call,
//! asserting on output files, stdout lines, and exit codes.
//!
//! The heavyweight determinism run lives in the acceptance suite; these
//! tests stay small so the whole file runs in seconds.

use std::path::{Path, PathBuf};
use std::process::Output;

fn mrfscan(dir: &Path, args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_mrfscan"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn mrfscan")
}

fn run_ok(dir: &Path, args: &[&str]) -> String {
    let out = mrfscan(dir, args);
    assert!(
        out.status.success(),
        "mrfscan {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

/// Fresh scratch directory under the system temp dir.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mrfscan-cli-{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn read_json(path: PathBuf) -> serde_json::Value {
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parse {}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// simulate -> scan -> metrics on a small community scenario
// ---------------------------------------------------------------------------

#[test]
fn simulate_scan_metrics_roundtrip() {
    let dir = scratch("roundtrip");
    let stdout = run_ok(&dir, &[
        "--out-dir", ".", "simulate", "--scenario", "community", "--sizes", "4,4",
        "--pre-edges", "3,3,2", "--post-edges", "3,1,5",
        "--t-len", "120", "--tau-star", "60", "--seed", "11",
        "--burn-in", "300", "--thin", "2",
    ]);
    assert!(stdout.contains("wrote dataset.csv (120 rows x 8 nodes)"), "stdout: {stdout}");

    let scenario = read_json(dir.join("scenario.json"));
    assert_eq!(scenario["kind"], "community");
    assert_eq!(scenario["tau_star"], 60);

    let stdout = run_ok(&dir, &[
        "--out-dir", ".", "scan", "--data", "dataset.csv", "--step", "10",
    ]);
    assert!(stdout.contains("scan over 7 candidates"), "stdout: {stdout}");

    let scan = read_json(dir.join("scan.json"));
    let tau_hat = scan["tau_hat"].as_u64().expect("tau_hat") as usize;
    assert!((30..=90).contains(&tau_hat), "tau_hat {tau_hat} outside the search margin");
    assert!(scan["stage1"].is_null(), "exhaustive scan must not report stages");
    assert!(scan["runtime_seconds"].is_number());
    // Seven candidates -> seven curve rows plus the header.
    let curve = std::fs::read_to_string(dir.join("curve.csv")).expect("curve.csv");
    assert_eq!(curve.lines().count(), 8, "curve:\n{curve}");
    assert!(dir.join("scan_config.json").exists());

    let stdout = run_ok(&dir, &[
        "--out-dir", ".", "metrics", "--estimate", "theta1.json",
        "--reference", "truth1.json", "--zero-tol", "1e-8",
    ]);
    assert!(stdout.contains("wrote metrics.json"), "stdout: {stdout}");
    let metrics = read_json(dir.join("metrics.json"));
    assert!(metrics["recovery"]["confusion"]["true_positive"].is_number());
    assert!(metrics.get("separation").is_none(), "no --other given");
}

// ---------------------------------------------------------------------------
// impute on a vote table with dates, gaps, and a conformity filter
// ---------------------------------------------------------------------------

#[test]
fn impute_fills_gaps_and_writes_date_sidecar() {
    let dir = scratch("impute");
    std::fs::write(
        dir.join("votes.csv"),
        "date,adams,baker,clark,davis\n\
         2011-03-01,1,0,NA,0\n\
         2011-03-02,1,1,1,1\n\
         2011-03-05,0,NA,1,0\n\
         2011-03-09,1,0,0,0\n",
    )
    .expect("votes");
    std::fs::write(
        dir.join("parties.csv"),
        "seat,start,end,party\n\
         adams,2011-01-01,2011-12-31,red\n\
         baker,2011-01-01,2011-12-31,blue\n\
         clark,2011-01-01,2011-12-31,blue\n\
         davis,2011-01-01,2011-12-31,red\n",
    )
    .expect("parties");

    let stdout = run_ok(&dir, &[
        "--out-dir", ".", "impute", "--votes", "votes.csv", "--parties", "parties.csv",
        "--rule", "own-party-majority", "--max-conformity", "0.99",
    ]);
    assert!(stdout.contains("imputed 3 rows x 4 seats"), "stdout: {stdout}");

    // The unanimous second ballot fails the 0.99 conformity cap; the three
    // kept ballots have clark's and baker's gaps filled by their own party
    // (clark follows baker's 0, baker follows clark's 1).
    let dataset = std::fs::read_to_string(dir.join("dataset.csv")).expect("dataset");
    assert_eq!(dataset, "adams,baker,clark,davis\n1,0,0,0\n0,1,1,0\n1,0,0,0\n");
    let dates = std::fs::read_to_string(dir.join("ballot_dates.csv")).expect("sidecar");
    assert_eq!(dates, "date\n2011-03-01\n2011-03-05\n2011-03-09\n");

    let report = read_json(dir.join("impute_report.json"));
    assert_eq!(report["rows_out"], 3);
    assert_eq!(report["seats"], 4);
    assert_eq!(report["filter"]["dropped_rows"], serde_json::json!([2]));
}

// ---------------------------------------------------------------------------
// stability outputs
// ---------------------------------------------------------------------------

#[test]
fn stability_writes_frequencies_and_stable_edges() {
    let dir = scratch("stability");
    run_ok(&dir, &[
        "--out-dir", ".", "simulate", "--scenario", "similarity", "--p", "6",
        "--density", "0.3", "--t-len", "80", "--tau-star", "40", "--seed", "4",
        "--burn-in", "300", "--thin", "2",
    ]);
    let stdout = run_ok(&dir, &[
        "--out-dir", ".", "stability", "--data", "dataset.csv",
        "--start", "1", "--end", "40", "--n-resamples", "10", "--seed", "5",
        "--penalty", "fixed", "--lambda", "0.12",
    ]);
    assert!(stdout.contains("stability over 10 resamples"), "stdout: {stdout}");

    let stability = read_json(dir.join("stability.json"));
    assert_eq!(stability["n_resamples"], 10);
    let csv = std::fs::read_to_string(dir.join("stable_edges.csv")).expect("stable edges");
    assert!(csv.starts_with("node_a,node_b,frequency\n"), "csv:\n{csv}");
    assert!(dir.join("stability_config.json").exists());
}

// ---------------------------------------------------------------------------
// bench report
// ---------------------------------------------------------------------------

#[test]
fn bench_reports_throughput() {
    let dir = scratch("bench");
    let stdout = run_ok(&dir, &[
        "--out-dir", ".", "bench", "--p", "5", "--t-len", "60", "--seed", "2",
        "--n-fits", "3",
    ]);
    assert!(stdout.contains("profile evaluations"), "stdout: {stdout}");
    let bench = read_json(dir.join("bench.json"));
    assert_eq!(bench["p"], 5);
    assert!(bench["profile_evaluations_per_second"].as_f64().expect("rate") > 0.0);
}

// ---------------------------------------------------------------------------
// failure modes and exit codes
// ---------------------------------------------------------------------------

#[test]
fn bad_configuration_exits_2_with_error_line() {
    let dir = scratch("exit2");
    run_ok(&dir, &[
        "--out-dir", ".", "simulate", "--scenario", "similarity", "--p", "4",
        "--density", "0.3", "--t-len", "40", "--tau-star", "20", "--seed", "1",
        "--burn-in", "100", "--thin", "1",
    ]);
    // Guard margins that leave no candidate split are a configuration error.
    let out = mrfscan(&dir, &[
        "--out-dir", ".", "scan", "--data", "dataset.csv", "--k-l", "30", "--k-u", "30",
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error:"), "stderr: {stderr}");
}

#[test]
fn missing_input_exits_3() {
    let dir = scratch("exit3");
    let out = mrfscan(&dir, &["--out-dir", ".", "scan", "--data", "no-such-file.csv"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_dataset_exits_3() {
    let dir = scratch("baddata");
    // Long enough for a valid candidate grid, with one out-of-alphabet cell.
    let mut csv = String::from("a,b\n");
    for t in 0..80 {
        csv.push_str(if t == 50 { "1,2\n" } else { "0,1\n" });
    }
    std::fs::write(dir.join("dataset.csv"), csv).expect("write");
    let out = mrfscan(&dir, &["--out-dir", ".", "scan", "--data", "dataset.csv"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error:"), "stderr: {stderr}");
}
