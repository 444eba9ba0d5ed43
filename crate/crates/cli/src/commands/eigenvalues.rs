use std::f64::consts::PI;

use pam_core::grid::{BoxSpec, GridField};
use pam_core::hamiltonian::{assemble, eigenvalue_scaling_experiment, top_eigenpairs, LaplacianKind, SolverOptions};
use pam_core::noise::RenormLaw;
use pam_core::stats::{median, quantile};
use serde::{Deserialize, Serialize};

use super::Summary;
use crate::config::RunConfig;
use crate::error::Result;
use crate::record::{fmt_f64, header, RunWriter, RESULT};

/// One `(L, seed)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub side: f64,
    pub seed: u64,
    pub eps: f64,
    pub points: usize,
    pub c_eps: f64,
    /// Renormalised eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Dirichlet spectrum of `½Δ` when the noise is switched off.
    pub analytic: Option<Vec<f64>>,
    /// `λ₁ / log L`.
    pub ratio: f64,
}

/// Seed statistics of `λ₁ / log L` at one side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub side: f64,
    pub log_side: f64,
    pub samples: usize,
    pub median_ratio: f64,
    pub lower_quartile: f64,
    pub upper_quartile: f64,
    pub median_lambda1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvaluesOutput {
    pub rows: Vec<EigenRow>,
    pub trend: Vec<TrendRow>,
}

/// Top `count` values of `−½π²(k² + l²)/L²` over the sine modes `1 ≤ k, l ≤ modes`.
pub fn analytic_dirichlet(side: f64, modes: usize, count: usize) -> Vec<f64> {
    let mut values: Vec<f64> = (1..=modes)
        .flat_map(|k| (1..=modes).map(move |l| -0.5 * PI * PI * ((k * k + l * l) as f64) / (side * side)))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.truncate(count);
    values
}

/// Groups rows (ordered by side) into per-side statistics.
pub fn trend(rows: &[EigenRow]) -> Vec<TrendRow> {
    let mut sides: Vec<f64> = rows.iter().map(|r| r.side).collect();
    sides.sort_by(f64::total_cmp);
    sides.dedup();
    sides
        .into_iter()
        .map(|side| {
            let ratios: Vec<f64> = rows.iter().filter(|r| r.side == side).map(|r| r.ratio).collect();
            let lambdas: Vec<f64> = rows.iter().filter(|r| r.side == side).map(|r| r.eigenvalues[0]).collect();
            TrendRow {
                side,
                log_side: side.ln(),
                samples: ratios.len(),
                median_ratio: median(&ratios),
                lower_quartile: quantile(&ratios, 0.25),
                upper_quartile: quantile(&ratios, 0.75),
                median_lambda1: median(&lambdas),
            }
        })
        .collect()
}

fn zero_noise_rows(config: &RunConfig, opts: SolverOptions) -> Result<Vec<EigenRow>> {
    let e = &config.eigenvalues;
    let mut rows = Vec::new();
    for &side in &e.sides {
        let (eps, points) = e.eps_rule.resolve(side)?;
        let spec = BoxSpec::neumann(side, points)?;
        let op = assemble(&spec, &GridField::zeros(spec), LaplacianKind::Spectral)?;
        let spectrum = top_eigenpairs(&op, e.count, opts)?;
        let analytic = analytic_dirichlet(side, points - 2, e.count);
        for &seed in &config.seeds {
            rows.push(EigenRow {
                side,
                seed,
                eps,
                points,
                c_eps: 0.0,
                ratio: spectrum.eigenvalues[0] / side.ln(),
                eigenvalues: spectrum.eigenvalues.clone(),
                residuals: spectrum.residuals.clone(),
                analytic: Some(analytic.clone()),
            });
        }
    }
    Ok(rows)
}

pub fn run(config: &RunConfig, writer: &mut RunWriter) -> Result<Summary> {
    let e = &config.eigenvalues;
    let opts = SolverOptions { tol: e.tol, max_iter: e.max_iter, ..Default::default() };
    let rows = if e.zero_noise {
        zero_noise_rows(config, opts)?
    } else {
        let law = RenormLaw::standard(e.law_intercept);
        eigenvalue_scaling_experiment(&e.sides, &config.seeds, e.eps_rule, e.route, &law, e.count, opts)?
            .into_iter()
            .map(|r| EigenRow {
                side: r.side,
                seed: r.seed,
                eps: r.eps,
                points: r.points,
                c_eps: r.c_eps,
                eigenvalues: r.eigenvalues,
                residuals: r.residuals,
                analytic: None,
                ratio: r.ratio,
            })
            .collect()
    };
    let out = EigenvaluesOutput { trend: trend(&rows), rows };
    writer.write_json(RESULT, &out)?;

    let mut names = header(&["side", "seed", "eps", "points", "c_eps", "ratio"]);
    names.extend((1..=e.count).map(|n| format!("lambda_{n}")));
    if e.zero_noise {
        names.extend((1..=e.count).map(|n| format!("analytic_{n}")));
    }
    let table: Vec<Vec<String>> = out
        .rows
        .iter()
        .map(|r| {
            let mut cells =
                vec![fmt_f64(r.side), r.seed.to_string(), fmt_f64(r.eps), r.points.to_string(), fmt_f64(r.c_eps), fmt_f64(r.ratio)];
            cells.extend(r.eigenvalues.iter().map(|&v| fmt_f64(v)));
            cells.extend(r.analytic.iter().flatten().map(|&v| fmt_f64(v)));
            cells
        })
        .collect();
    writer.write_csv("rows.csv", &names, &table)?;
    writer.write_csv("trend.csv", &trend_header(), &trend_table(&out.trend))?;

    let lines = out
        .trend
        .iter()
        .map(|t| format!("L = {:>5}: median λ₁/log L = {:.6} [{:.6}, {:.6}]", t.side, t.median_ratio, t.lower_quartile, t.upper_quartile))
        .collect();
    Ok(Summary { lines, failure: None })
}

pub fn trend_header() -> Vec<String> {
    header(&["side", "log_side", "samples", "median_ratio", "lower_quartile", "upper_quartile", "median_lambda1"])
}

pub fn trend_table(trend: &[TrendRow]) -> Vec<Vec<String>> {
    trend
        .iter()
        .map(|t| {
            vec![
                fmt_f64(t.side),
                fmt_f64(t.log_side),
                t.samples.to_string(),
                fmt_f64(t.median_ratio),
                fmt_f64(t.lower_quartile),
                fmt_f64(t.upper_quartile),
                fmt_f64(t.median_lambda1),
            ]
        })
        .collect()
}
