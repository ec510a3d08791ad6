use std::path::{Path, PathBuf};

use assert_cmd::Command;
use predicates::prelude::*;
use shrinkrank::diagnostics::{efficiency_report, EfficiencyReport, Monitored};
use shrinkrank::Chain;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn shrinkrank() -> Command {
    let mut cmd = Command::cargo_bin("shrinkrank").unwrap();
    cmd.current_dir(repo_root()).env_remove("SHRINKRANK_OUT_DIR");
    cmd
}

fn sample_gamma(out: &Path, n: usize, seed: u64) {
    shrinkrank()
        .args(["sample", "--target", "gamma-product", "--dim", "2", "--sampler", "shrink-rank", "--sigma-c", "1"])
        .args(["--n", &n.to_string(), "--seed", &seed.to_string(), "--out"])
        .arg(out)
        .assert()
        .success()
        .stdout(predicate::str::contains("density evaluations"));
}

#[test]
fn sample_writes_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chain.csv");
    sample_gamma(&out, 60_000, 42);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "iteration,x_0,x_1,cum_density_evals,cum_grad_evals,n_crumbs");
    assert_eq!(lines.count(), 60_000);
}

#[test]
fn sample_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    sample_gamma(&a, 2000, 7);
    sample_gamma(&b, 2000, 7);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.path().join("c.csv");
    sample_gamma(&c, 2000, 8);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn default_output_goes_to_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    shrinkrank()
        .env("SHRINKRANK_OUT_DIR", dir.path())
        .args(["sample", "--target", "correlated-gaussian", "--n", "500", "--sampler", "adaptive-metropolis"])
        .assert()
        .success();
    let chain = Chain::read_csv_file(dir.path().join("chain.csv")).unwrap();
    assert_eq!((chain.len(), chain.dim()), (500, 4));
}

#[test]
fn unknown_identifiers_fail() {
    shrinkrank()
        .args(["sample", "--target", "nosuch", "--n", "10"])
        .assert()
        .failure()
        .stderr(predicate::str::contains("nosuch"));
    shrinkrank()
        .args(["sample", "--target", "gamma-product", "--sampler", "gibbs", "--n", "10"])
        .assert()
        .failure()
        .stderr(predicate::str::contains("gibbs"));
}

#[test]
fn diagnose_matches_library_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chain.csv");
    sample_gamma(&out, 5000, 3);
    let chain = Chain::read_csv_file(&out).unwrap();
    let expected = efficiency_report(&chain, Monitored::Coordinate(1), 0.1).unwrap();
    shrinkrank()
        .args(["diagnose", "--monitored", "1"])
        .arg(&out)
        .assert()
        .success()
        .stdout(format!("{}\n{}\n", EfficiencyReport::CSV_HEADER, expected.csv_row()));
}

#[test]
fn diagnose_monitors_separately() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chain.csv");
    sample_gamma(&out, 5000, 4);
    let report = dir.path().join("report.csv");
    for m in ["log-density", "0"] {
        shrinkrank()
            .args(["diagnose", "--target", "gamma-product", "--dim", "2", "--monitored", m, "--out"])
            .arg(&report)
            .arg(&out)
            .assert()
            .success();
    }
    let text = std::fs::read_to_string(&report).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("log-density,"));
    assert!(rows[2].starts_with("x_0,"));
    assert_ne!(rows[1].split(',').nth(3), rows[2].split(',').nth(3));
}

#[test]
fn diagnose_log_density_needs_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chain.csv");
    sample_gamma(&out, 1000, 5);
    shrinkrank().args(["diagnose", "--monitored", "log-density"]).arg(&out).assert().failure();
}

#[test]
fn diagnose_rejects_truncated_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chain.csv");
    sample_gamma(&out, 1000, 6);
    let text = std::fs::read_to_string(&out).unwrap();
    let cut = &text[..text.len() - 9];
    std::fs::write(&out, cut).unwrap();
    shrinkrank().arg("diagnose").arg(&out).assert().failure();
    std::fs::write(&out, "iteration,x_0\n1,0.5,oops\n").unwrap();
    shrinkrank().arg("diagnose").arg(&out).assert().failure();
}

#[test]
fn benchmark_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    std::fs::write(
        &plan,
        r#"
targets = ["gamma-product:dim=2", "correlated-gaussian:dim=2,rho=0.9"]
samplers = ["shrink-rank", "adaptive-metropolis"]
shrink_rank_grid = [0.1, 0.3, 1.0, 3.0, 10.0]
adaptive_metropolis_grid = [0.1, 0.3, 1.0, 3.0, 10.0]
n_iterations = 2000
seed = 11
"#,
    )
    .unwrap();
    let out = dir.path().join("results.csv");
    shrinkrank().arg("benchmark").arg(&plan).arg("--out").arg(&out).assert().success();
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| &r[3] == "ok" || &r[3] == "inestimable"));
}

#[test]
fn benchmark_isolates_failing_cells() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    std::fs::write(
        &plan,
        r#"
targets = ["german-credit"]
samplers = ["shrink-rank"]
shrink_rank_grid = [1.0e6, 0.01]
n_iterations = 1000
seed = 5
"#,
    )
    .unwrap();
    let out = dir.path().join("results.csv");
    shrinkrank().arg("benchmark").arg(&plan).arg("--out").arg(&out).arg("--threads").arg("2").assert().success();
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][2], "1000000");
    assert!(!rows[1][3].is_empty());
    assert!(rows[1][5].parse::<u64>().unwrap() > 0);
}

#[test]
fn shipped_plans_parse() {
    for name in ["tuning_robustness.toml", "target_suite.toml"] {
        let path = repo_root().join("plans").join(name);
        shrinkrank::bench::BenchmarkPlan::from_file(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
