//! Renormalised eigenvalues of mollified white-noise potentials and their growth with the box.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assemble, top_eigenpairs_from, LaplacianKind, SolverOptions, Spectrum};
use crate::error::{Error, Result};
use crate::grid::{BoxSpec, GridField};
use crate::noise::{mollify, sample_white_noise, subtraction_constant, MollifierKind, MollifierSpec, NoiseCoeffs, RenormLaw};

/// Mollification route of the potential.
pub type Route = MollifierKind;

/// Spectrum of `½Δ_h + ξ_ε` together with the subtracted constant.
#[derive(Clone, Debug)]
pub struct RenormalizedSpectrum {
    /// Eigenpairs of `½Δ_h + ξ_ε` without renormalisation.
    pub raw: Spectrum,
    pub c_eps: f64,
    /// `λ_n(ξ_ε) − c_ε`.
    pub renormalized: Vec<f64>,
    /// Whether `ε >= 2Δx`.
    pub resolved: bool,
}

/// Top `n` eigenvalues of `½Δ_h + ξ_ε − c_ε` on the Dirichlet box of the noise lattice.
pub fn renormalized_eigenvalues(
    nc: &NoiseCoeffs,
    mollifier: &MollifierSpec,
    law: &RenormLaw,
    n: usize,
    laplacian: LaplacianKind,
    opts: SolverOptions,
    start: &[GridField],
) -> Result<RenormalizedSpectrum> {
    let mollified = mollify(nc, mollifier)?;
    let c_eps = subtraction_constant(nc.spec().side(), mollifier, law)?;
    let op = assemble(nc.spec(), &mollified.field, laplacian)?;
    let raw = top_eigenpairs_from(&op, n, opts, start)?;
    let renormalized = raw.eigenvalues.iter().map(|l| l - c_eps).collect();
    Ok(RenormalizedSpectrum { raw, c_eps, renormalized, resolved: mollified.resolved })
}

/// How the mollification scale and lattice follow the box side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EpsRule {
    /// Fixed `ε` with `points_per_eps` lattice spacings per `ε` (intervals rounded up to a power of two).
    Fixed { eps: f64, points_per_eps: f64 },
    /// Fixed lattice resolution `N`, `ε = multiple · Δx`.
    GridMultiple { points: usize, multiple: f64 },
}

impl EpsRule {
    /// `(ε, N)` for a box of side `side`.
    pub fn resolve(&self, side: f64) -> Result<(f64, usize)> {
        match *self {
            EpsRule::Fixed { eps, points_per_eps } => {
                if !(eps > 0.0 && points_per_eps >= 1.0) {
                    return Err(Error::InvalidParameter(format!("bad ε rule: ε = {eps}, points per ε = {points_per_eps}")));
                }
                let intervals = (side * points_per_eps / eps).ceil() as usize;
                Ok((eps, intervals.next_power_of_two() + 1))
            }
            EpsRule::GridMultiple { points, multiple } => Ok((multiple * side / (points - 1) as f64, points)),
        }
    }
}

/// One `(L, seed)` cell of the scaling experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub side: f64,
    pub seed: u64,
    pub eps: f64,
    pub points: usize,
    pub c_eps: f64,
    /// Renormalised eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `λ₁ / log L`.
    pub ratio: f64,
}

/// Renormalised top eigenvalues over a grid of box sides and seeds, rows ordered by `(L, seed)`.
pub fn eigenvalue_scaling_experiment(
    sides: &[f64],
    seeds: &[u64],
    rule: EpsRule,
    route: Route,
    law: &RenormLaw,
    n: usize,
    opts: SolverOptions,
) -> Result<Vec<ScalingRow>> {
    if sides.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("box sides must increase".into()));
    }
    let cells: Vec<(f64, u64)> = sides.iter().flat_map(|&l| seeds.iter().map(move |&s| (l, s))).collect();
    cells
        .par_iter()
        .map(|&(side, seed)| {
            let (eps, points) = rule.resolve(side)?;
            let spec = BoxSpec::neumann(side, points)?;
            let nc = sample_white_noise(&spec, seed);
            let mollifier = MollifierSpec::new(route, eps)?;
            let out = renormalized_eigenvalues(&nc, &mollifier, law, n, LaplacianKind::Spectral, opts, &[])?;
            Ok(ScalingRow {
                side,
                seed,
                eps,
                points,
                c_eps: out.c_eps,
                ratio: out.renormalized[0] / side.ln(),
                eigenvalues: out.renormalized,
                residuals: out.raw.residuals,
            })
        })
        .collect()
}
