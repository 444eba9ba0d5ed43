use std::path::Path;
use std::process::{Command, Output};

use pam_cli::commands::chi::ChiOutput;
use pam_cli::commands::eigenvalues::EigenvaluesOutput;
use pam_cli::commands::noise_growth::NoiseGrowthOutput;
use pam_cli::config::RunConfig;
use pam_cli::record::{fmt_f64, ExperimentRecord};
use pam_cli::report::Report;
use proptest::prelude::*;
use tempfile::TempDir;

fn pamlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pamlab"))
        .current_dir(dir)
        .args(args)
        .env_remove("PAMLAB_CONFIG")
        .env_remove("PAMLAB_SEED")
        .env_remove("PAMLAB_OUT")
        .env_remove("PAMLAB_THREADS")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> T {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

const SMOKE: &str = r#"
schema_version = 1
seeds = [0, 1]
[chi]
points = 65
[eigenvalues]
sides = [4.0, 8.0]
[evolve]
times = [1.0, 2.0]
eigenpairs = 4
dt = 1e-3
[fk]
points = 65
n_paths = 400
[renorm]
eps_log2 = [4, 5, 6]
[noise_growth]
sides = [4.0, 8.0]
"#;

#[test]
fn unknown_keys_fail_with_a_schema_error() {
    let tmp = TempDir::new().unwrap();
    for text in ["schema_version = 1\nbogus = 3\n", "[chi]\npointz = 65\n", "schema_version = 7\n", "seeds = \"zero\"\n"] {
        let config = write_config(tmp.path(), text);
        let out = pamlab(tmp.path(), &["--config", &config, "chi"]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("schema"), "{text}");
    }
    assert!(!tmp.path().join("runs").exists());
}

#[test]
fn dry_run_prints_the_resolved_config_only() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    let out = pamlab(tmp.path(), &["--config", &config, "--seed", "9", "--dry-run", "fk"]);
    assert!(out.status.success());
    let printed = RunConfig::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(printed.seeds, vec![9]);
    assert_eq!(printed.fk.n_paths, 400);
    assert!(!tmp.path().join("runs").exists());
}

#[test]
fn config_round_trips_through_toml() {
    let config = RunConfig::from_toml(SMOKE).unwrap();
    assert_eq!(RunConfig::from_toml(&config.to_toml().unwrap()).unwrap(), config);
    assert_eq!(RunConfig::from_toml(&RunConfig::default().to_toml().unwrap()).unwrap(), RunConfig::default());
}

#[test]
fn chi_run_is_reproducible_and_beats_the_gaussian() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    for dir in ["a/nested/run", "b"] {
        let out = pamlab(tmp.path(), &["--config", &config, "--out", dir, "chi"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (a, b) = (tmp.path().join("a/nested/run"), tmp.path().join("b"));
    let result: ChiOutput = read_json(&a.join("result.json"));
    assert!(result.ascent.chi >= std::f64::consts::FRAC_1_PI && result.agree);
    for file in ["result.json", "maximizer.bin"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    let (ma, mb): (ExperimentRecord, ExperimentRecord) = (read_json(&a.join("manifest.json")), read_json(&b.join("manifest.json")));
    assert_eq!(ma.artifacts, mb.artifacts);
    assert_eq!(ma.experiment, "chi");
}

#[test]
fn zero_noise_reproduces_the_dirichlet_spectrum() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "[eigenvalues]\nzero_noise = true\nsides = [2.0, 4.0]\ncount = 3\n");
    let out = pamlab(tmp.path(), &["--config", &config, "--out", "zero", "eigenvalues"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result: EigenvaluesOutput = read_json(&tmp.path().join("zero/result.json"));
    for row in &result.rows {
        let analytic = row.analytic.as_ref().unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((analytic[0] + pi2 / row.side.powi(2)).abs() <= 1e-12);
        for (got, want) in row.eigenvalues.iter().zip(analytic) {
            assert!((got - want).abs() <= 1e-8 * want.abs(), "{got} vs {want}");
        }
        assert!(row.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        // the second level is doubly degenerate
        assert!((row.eigenvalues[1] - row.eigenvalues[2]).abs() <= 1e-8);
    }
}

#[test]
fn csv_numbers_match_the_json_bit_for_bit() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    let out = pamlab(tmp.path(), &["--config", &config, "--out", "growth", "noise-growth"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result: NoiseGrowthOutput = read_json(&tmp.path().join("growth/result.json"));
    let mut reader = csv::Reader::from_path(tmp.path().join("growth/rows.csv")).unwrap();
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), result.rows.len());
    for (record, row) in records.iter().zip(&result.rows) {
        let parse = |i: usize| record[i].parse::<f64>().unwrap();
        assert_eq!(parse(4).to_bits(), row.xi_norm.to_bits());
        assert_eq!(parse(6).to_bits(), row.m.to_bits());
        assert_eq!(parse(9).to_bits(), row.m_ratio.to_bits());
    }
}

#[test]
fn every_subcommand_smoke_config_completes() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    for cmd in ["eigenvalues", "evolve", "fk", "renorm", "noise-growth"] {
        let start = std::time::Instant::now();
        let out = pamlab(tmp.path(), &["--config", &config, "--threads", "1", "--out", &format!("runs/{cmd}"), cmd]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(start.elapsed().as_secs() < 60, "{cmd} took {:?}", start.elapsed());
        let manifest: ExperimentRecord = read_json(&tmp.path().join(format!("runs/{cmd}/manifest.json")));
        assert_eq!(manifest.seeds, vec![0, 1]);
        assert!(manifest.artifacts.contains_key("result.json"));
    }
}

#[test]
fn report_of_an_empty_directory_is_empty_with_a_warning() {
    let tmp = TempDir::new().unwrap();
    let out = pamlab(tmp.path(), &["report", "."]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let report: Report = read_json(&tmp.path().join("report.json"));
    assert!(report.sources.is_empty() && report.eigenvalue_trend.is_empty() && report.corridor.is_none());
}

#[test]
fn report_lists_corrupt_records_and_aggregates_the_rest() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    for cmd in ["chi", "eigenvalues", "evolve"] {
        assert!(pamlab(tmp.path(), &["--config", &config, "--out", &format!("runs/{cmd}"), cmd]).status.success());
    }
    std::fs::create_dir_all(tmp.path().join("runs/broken")).unwrap();
    std::fs::write(tmp.path().join("runs/broken/manifest.json"), "{ not json").unwrap();
    let first = pamlab(tmp.path(), &["--out", "report1", "report", "runs"]);
    assert!(first.status.success());
    assert!(pamlab(tmp.path(), &["--out", "report2", "report", "runs"]).status.success());
    let bytes = std::fs::read(tmp.path().join("report1/report.json")).unwrap();
    assert_eq!(bytes, std::fs::read(tmp.path().join("report2/report.json")).unwrap());
    let report: Report = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(report.problems.len(), 1);
    assert_eq!(report.problems[0].path, "broken");
    assert_eq!(report.sources.len(), 3);
    // the report reproduces the per-run tables
    let eigen: EigenvaluesOutput = read_json(&tmp.path().join("runs/eigenvalues/result.json"));
    assert_eq!(report.eigenvalue_trend, eigen.trend);
    assert_eq!(report.mass_vs_eigenvalue.len(), 2);
    let corridor = report.corridor.unwrap();
    assert_eq!(corridor.upper, 3.0 * report.chi[0].ascent);
}

#[test]
fn tampered_artifacts_are_reported() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    assert!(pamlab(tmp.path(), &["--config", &config, "--out", "runs/renorm", "renorm"]).status.success());
    std::fs::write(tmp.path().join("runs/renorm/rows.csv"), "eps\n1\n").unwrap();
    assert!(pamlab(tmp.path(), &["report", "runs"]).status.success());
    let report: Report = read_json(&tmp.path().join("runs/report.json"));
    assert!(report.problems[0].reason.contains("hash"), "{:?}", report.problems);
}

proptest! {
    #[test]
    fn formatted_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}
