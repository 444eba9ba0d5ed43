//! Aggregation of a directory tree of run records into the headline tables.

use std::path::{Path, PathBuf};

use pam_core::stats::median;
use serde::{Deserialize, Serialize};

use crate::commands::chi::ChiOutput;
use crate::commands::eigenvalues::{trend, trend_header, trend_table, EigenRow, EigenvaluesOutput, TrendRow};
use crate::commands::evolve::{EvolveOutput, MassRow};
use crate::error::{CliError, Result};
use crate::record::{fmt_f64, header, sha256_hex, ExperimentRecord, RunWriter, MANIFEST, RESULT};

/// A record that was found and used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub path: String,
    pub experiment: String,
    pub name: String,
}

/// A record that was found but could not be used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub path: String,
    pub reason: String,
}

/// Seed medians of the mass rate against `λ₁` at one time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassTableRow {
    pub t: f64,
    pub samples: usize,
    pub median_log_mass_rate: f64,
    pub median_lambda1: f64,
    pub median_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiTableRow {
    pub path: String,
    pub ascent: f64,
    pub ground_state: f64,
    pub radial: f64,
    pub relative_gap: f64,
}

/// Whether every median `λ₁/log L` lies in `(0, 3χ̂)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corridor {
    pub chi: f64,
    pub upper: f64,
    pub inside: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub sources: Vec<Source>,
    pub problems: Vec<Problem>,
    pub warnings: Vec<String>,
    pub eigenvalue_trend: Vec<TrendRow>,
    pub mass_vs_eigenvalue: Vec<MassTableRow>,
    pub chi: Vec<ChiTableRow>,
    pub corridor: Option<Corridor>,
}

/// Directories at or below `root` holding a manifest, in lexicographic order.
fn record_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        if dir.join(MANIFEST).is_file() {
            found.push(dir.clone());
        }
        let entries = std::fs::read_dir(&dir).map_err(|e| CliError::Io { path: dir.clone(), source: e })?;
        for entry in entries {
            let path = entry.map_err(|e| CliError::Io { path: dir.clone(), source: e })?.path();
            if path.is_dir() {
                stack.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}

/// Manifest and result of one record, with every hashed artifact checked.
fn load(dir: &Path) -> std::result::Result<(ExperimentRecord, Vec<u8>), String> {
    let manifest = std::fs::read(dir.join(MANIFEST)).map_err(|e| format!("unreadable manifest: {e}"))?;
    let record: ExperimentRecord = serde_json::from_slice(&manifest).map_err(|e| format!("corrupt manifest: {e}"))?;
    for (name, hash) in &record.artifacts {
        let bytes = std::fs::read(dir.join(name)).map_err(|e| format!("missing artifact {name}: {e}"))?;
        if &sha256_hex(&bytes) != hash {
            return Err(format!("artifact {name} does not match its hash"));
        }
    }
    let result = std::fs::read(dir.join(RESULT)).map_err(|e| format!("missing {RESULT}: {e}"))?;
    Ok((record, result))
}

fn mass_table(rows: &[MassRow]) -> Vec<MassTableRow> {
    let mut times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .into_iter()
        .map(|t| {
            let at: Vec<&MassRow> = rows.iter().filter(|r| r.t == t).collect();
            let med = |f: fn(&MassRow) -> f64| median(&at.iter().map(|r| f(r)).collect::<Vec<_>>());
            MassTableRow {
                t,
                samples: at.len(),
                median_log_mass_rate: med(|r| r.log_mass_rate),
                median_lambda1: med(|r| r.lambda1),
                median_deviation: med(|r| r.deviation),
            }
        })
        .collect()
}

/// Builds the report for every record under `root`. Unusable records are listed, not fatal.
pub fn build(root: &Path) -> Result<Report> {
    let mut report = Report::default();
    let mut eigen_rows: Vec<EigenRow> = Vec::new();
    let mut mass_rows: Vec<MassRow> = Vec::new();
    for dir in record_dirs(root)? {
        let rel = dir.strip_prefix(root).ok().filter(|p| !p.as_os_str().is_empty());
        let path = rel.map_or_else(|| ".".to_string(), |p| p.display().to_string());
        let (record, result) = match load(&dir) {
            Ok(loaded) => loaded,
            Err(reason) => {
                report.problems.push(Problem { path, reason });
                continue;
            }
        };
        let parsed: std::result::Result<(), serde_json::Error> = match record.experiment.as_str() {
            "eigenvalues" => serde_json::from_slice::<EigenvaluesOutput>(&result).map(|o| eigen_rows.extend(o.rows)),
            "evolve" => serde_json::from_slice::<EvolveOutput>(&result).map(|o| mass_rows.extend(o.rows)),
            "chi" => serde_json::from_slice::<ChiOutput>(&result).map(|o| {
                report.chi.push(ChiTableRow {
                    path: path.clone(),
                    ascent: o.ascent.chi,
                    ground_state: o.ground_state.chi,
                    radial: o.radial_chi,
                    relative_gap: o.relative_gap,
                })
            }),
            _ => Ok(()),
        };
        match parsed {
            Ok(()) => report.sources.push(Source { path, experiment: record.experiment, name: record.name }),
            Err(e) => report.problems.push(Problem { path, reason: format!("corrupt {RESULT}: {e}") }),
        }
    }
    eigen_rows.sort_by(|a, b| a.side.total_cmp(&b.side).then(a.seed.cmp(&b.seed)));
    report.eigenvalue_trend = trend(&eigen_rows);
    report.mass_vs_eigenvalue = mass_table(&mass_rows);
    if let Some(chi) = report.chi.first().map(|c| c.ascent) {
        if !report.eigenvalue_trend.is_empty() {
            let upper = 3.0 * chi;
            let inside = report.eigenvalue_trend.iter().all(|t| t.median_ratio > 0.0 && t.median_ratio < upper);
            report.corridor = Some(Corridor { chi, upper, inside });
        }
    }
    if report.sources.is_empty() {
        report.warnings.push(format!("no usable records under {}", root.display()));
    }
    Ok(report)
}

/// Writes `report.json` and the three headline tables into `out`.
pub fn write(report: &Report, out: &Path) -> Result<()> {
    let mut writer = RunWriter::create(out)?;
    writer.write_json("report.json", report)?;
    writer.write_csv("report_eigenvalues.csv", &trend_header(), &trend_table(&report.eigenvalue_trend))?;
    let mass: Vec<Vec<String>> = report
        .mass_vs_eigenvalue
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.t),
                r.samples.to_string(),
                fmt_f64(r.median_log_mass_rate),
                fmt_f64(r.median_lambda1),
                fmt_f64(r.median_deviation),
            ]
        })
        .collect();
    writer.write_csv(
        "report_mass.csv",
        &header(&["t", "samples", "median_log_mass_rate", "median_lambda1", "median_deviation"]),
        &mass,
    )?;
    let chi: Vec<Vec<String>> = report
        .chi
        .iter()
        .map(|c| vec![c.path.clone(), fmt_f64(c.ascent), fmt_f64(c.ground_state), fmt_f64(c.radial), fmt_f64(c.relative_gap)])
        .collect();
    writer.write_csv("report_chi.csv", &header(&["path", "ascent", "ground_state", "radial", "relative_gap"]), &chi)?;
    Ok(())
}
