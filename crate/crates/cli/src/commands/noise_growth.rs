use pam_core::feynman_kac::{noise_growth_experiment, GrowthSettings, NoiseGrowthRow, RegularityExponents};
use pam_core::stats::median;
use serde::{Deserialize, Serialize};

use super::Summary;
use crate::config::RunConfig;
use crate::error::Result;
use crate::record::{fmt_f64, header, RunWriter, RESULT};

/// Seed medians of the ratios to `log L` at one side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthMedians {
    pub side: f64,
    pub samples: usize,
    pub m_ratio: f64,
    pub xi_ratio: f64,
    pub enhanced_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseGrowthOutput {
    pub gamma: f64,
    pub rows: Vec<NoiseGrowthRow>,
    pub medians: Vec<GrowthMedians>,
}

pub fn medians(sides: &[f64], rows: &[NoiseGrowthRow]) -> Vec<GrowthMedians> {
    sides
        .iter()
        .map(|&side| {
            let at: Vec<&NoiseGrowthRow> = rows.iter().filter(|r| r.side == side).collect();
            let med = |f: fn(&NoiseGrowthRow) -> f64| median(&at.iter().map(|r| f(r)).collect::<Vec<_>>());
            GrowthMedians {
                side,
                samples: at.len(),
                m_ratio: med(|r| r.m_ratio),
                xi_ratio: med(|r| r.xi_ratio),
                enhanced_ratio: med(|r| r.enhanced_ratio),
            }
        })
        .collect()
}

pub fn run(config: &RunConfig, writer: &mut RunWriter) -> Result<Summary> {
    let g = &config.noise_growth;
    let settings = GrowthSettings {
        eps: g.eps,
        lattice_multiple: g.lattice_multiple,
        exponents: RegularityExponents { alpha: g.alpha, beta: g.beta },
    };
    let rows = noise_growth_experiment(&g.sides, &config.seeds, &settings)?;
    let out = NoiseGrowthOutput { gamma: settings.gamma(), medians: medians(&g.sides, &rows), rows };
    writer.write_json(RESULT, &out)?;
    let names = header(&[
        "side",
        "seed",
        "eps",
        "points",
        "xi_norm",
        "enhanced_norm",
        "m",
        "xi_ratio",
        "enhanced_ratio",
        "m_ratio",
    ]);
    let table: Vec<Vec<String>> = out
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.side),
                r.seed.to_string(),
                fmt_f64(r.eps),
                r.points.to_string(),
                fmt_f64(r.xi_norm),
                fmt_f64(r.enhanced_norm),
                fmt_f64(r.m),
                fmt_f64(r.xi_ratio),
                fmt_f64(r.enhanced_ratio),
                fmt_f64(r.m_ratio),
            ]
        })
        .collect();
    writer.write_csv("rows.csv", &names, &table)?;
    let med_table: Vec<Vec<String>> = out
        .medians
        .iter()
        .map(|m| {
            vec![fmt_f64(m.side), m.samples.to_string(), fmt_f64(m.m_ratio), fmt_f64(m.xi_ratio), fmt_f64(m.enhanced_ratio)]
        })
        .collect();
    writer.write_csv("medians.csv", &header(&["side", "samples", "m_ratio", "xi_ratio", "enhanced_ratio"]), &med_table)?;
    let lines = out
        .medians
        .iter()
        .map(|m| format!("L = {:>5}: median M/log L = {:.4}, ‖ξ‖²/log L = {:.4}, ‖Ξ‖/log L = {:.4}", m.side, m.m_ratio, m.xi_ratio, m.enhanced_ratio))
        .collect();
    Ok(Summary { lines, failure: None })
}
