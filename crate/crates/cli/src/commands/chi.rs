use pam_core::chi::{gaussian, ground_state_oracle, maximize_quotient, AscentOptions, ChiResult, RadialGroundState};
use pam_core::grid::{write_grid_binary, BoxSpec};
use serde::{Deserialize, Serialize};

use super::Summary;
use crate::config::RunConfig;
use crate::error::Result;
use crate::record::RunWriter;

/// Scalars of one route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteSummary {
    pub chi: f64,
    pub iterations: usize,
    pub residual: f64,
    pub boundary_decay: f64,
    pub functional_history: Vec<f64>,
}

impl From<&ChiResult> for RouteSummary {
    fn from(r: &ChiResult) -> Self {
        Self {
            chi: r.chi,
            iterations: r.iterations,
            residual: r.residual,
            boundary_decay: r.boundary_decay,
            functional_history: r.functional_history.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiOutput {
    pub side: f64,
    pub points: usize,
    pub ascent: RouteSummary,
    pub ground_state: RouteSummary,
    pub radial_centre_value: f64,
    pub radial_chi: f64,
    pub radial_mass: f64,
    /// `|χ_ascent / χ_ground_state − 1|`.
    pub relative_gap: f64,
    /// `1/π`, the Gaussian value of `2R`.
    pub gaussian_bound: f64,
    pub agree: bool,
}

pub fn run(config: &RunConfig, writer: &mut RunWriter) -> Result<Summary> {
    let c = &config.chi;
    let spec = BoxSpec::neumann(c.side, c.points)?;
    let opts = AscentOptions { max_iter: c.max_iter, tol: c.ascent_tol, ..Default::default() };
    let ascent = maximize_quotient(&gaussian(&spec, c.init_width, [0.0; 2]), &opts)?;
    let oracle = ground_state_oracle(&spec, c.flow_tol)?;
    let RadialGroundState { centre_value, chi: radial_chi, mass } = oracle.radial;
    let relative_gap = (ascent.chi / oracle.flow.chi - 1.0).abs();
    let gaussian_bound = std::f64::consts::FRAC_1_PI;
    let agree = relative_gap <= c.agreement && ascent.chi >= gaussian_bound && oracle.flow.chi >= gaussian_bound;
    let out = ChiOutput {
        side: c.side,
        points: c.points,
        ascent: (&ascent).into(),
        ground_state: (&oracle.flow).into(),
        radial_centre_value: centre_value,
        radial_chi,
        radial_mass: mass,
        relative_gap,
        gaussian_bound,
        agree,
    };
    writer.write_json(crate::record::RESULT, &out)?;
    let mut dump = Vec::new();
    write_grid_binary(&ascent.maximizer, &mut dump)?;
    writer.write_bytes("maximizer.bin", &dump)?;
    let mut summary = Summary {
        lines: vec![
            format!("chi (ascent)       = {:.10}", ascent.chi),
            format!("chi (ground state) = {:.10}", oracle.flow.chi),
            format!("chi (radial)       = {radial_chi:.10}"),
            format!("relative gap       = {relative_gap:.3e}"),
        ],
        failure: None,
    };
    if !agree {
        summary.failure = Some(format!("routes disagree by {relative_gap:.3e} (allowed {:.3e})", c.agreement));
    }
    Ok(summary)
}
