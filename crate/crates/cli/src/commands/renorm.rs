use pam_core::noise::{
    renorm_constant_exact, ConvolutionKernel, ConvolutionProfile, CutoffProfile, FourierCutoff, MollifierKind,
};
use pam_core::stats::{linear_fit, LinearFit};
use serde::{Deserialize, Serialize};

use super::Summary;
use crate::config::RunConfig;
use crate::error::Result;
use crate::record::{fmt_f64, header, RunWriter, RESULT};

/// `¼ c_{L,ε}` at one `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormRow {
    pub eps: f64,
    pub log_inv_eps: f64,
    pub quarter_c: f64,
    pub tail_bound: f64,
    pub radius: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormOutput {
    pub side: f64,
    pub route: MollifierKind,
    pub rows: Vec<RenormRow>,
    /// Least squares of `¼ c` against `log(1/ε)`.
    pub fit: LinearFit,
}

pub fn run(config: &RunConfig, writer: &mut RunWriter) -> Result<Summary> {
    let r = &config.renorm;
    let cutoff = FourierCutoff::default();
    let convolution = ConvolutionProfile { kernel: ConvolutionKernel::standard() };
    let profile: &dyn CutoffProfile = match r.route {
        MollifierKind::FourierCutoff => &cutoff,
        MollifierKind::Convolution => &convolution,
    };
    let rows = r
        .eps_log2
        .iter()
        .map(|&k| {
            let eps = 2f64.powi(-k);
            let sum = renorm_constant_exact(r.side, eps, profile, r.tail_tol)?;
            Ok(RenormRow {
                eps,
                log_inv_eps: (1.0 / eps).ln(),
                quarter_c: 0.25 * sum.value,
                tail_bound: 0.25 * sum.tail_bound,
                radius: sum.radius,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|row| row.log_inv_eps).collect();
    let y: Vec<f64> = rows.iter().map(|row| row.quarter_c).collect();
    let out = RenormOutput { side: r.side, route: r.route, fit: linear_fit(&x, &y), rows };
    writer.write_json(RESULT, &out)?;
    let names = header(&["eps", "log_inv_eps", "quarter_c", "tail_bound", "radius"]);
    let table: Vec<Vec<String>> = out
        .rows
        .iter()
        .map(|row| {
            vec![fmt_f64(row.eps), fmt_f64(row.log_inv_eps), fmt_f64(row.quarter_c), fmt_f64(row.tail_bound), row.radius.to_string()]
        })
        .collect();
    writer.write_csv("rows.csv", &names, &table)?;
    let lines = vec![format!(
        "¼c ≈ {:.6} log(1/ε) + {:.6} (R² = {:.6}); 1/π = {:.6}",
        out.fit.slope,
        out.fit.intercept,
        out.fit.r_squared,
        std::f64::consts::FRAC_1_PI
    )];
    Ok(Summary { lines, failure: None })
}
