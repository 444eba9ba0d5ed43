//! Growth of the enhanced-noise norms and of `M` with the box side at a fixed mollification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{RegularityExponents, ResolventProblem};
use crate::error::{Error, Result};
use crate::grid::{besov_norm, BoxSpec};
use crate::noise::{enhance_mollified, sample_white_noise, MollifierKind, MollifierSpec, RenormLaw};

/// Fixed `ε` with `ε = lattice_multiple · Δx` on every box (intervals rounded up to a power of two).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSettings {
    pub eps: f64,
    pub lattice_multiple: f64,
    pub exponents: RegularityExponents,
}

impl Default for GrowthSettings {
    fn default() -> Self {
        Self { eps: 0.5, lattice_multiple: 4.0, exponents: RegularityExponents::default() }
    }
}

impl GrowthSettings {
    /// `γ = −1 − α`, the regularity loss of the noise norms.
    pub fn gamma(&self) -> f64 {
        -1.0 - self.exponents.alpha
    }

    /// Lattice for a box of side `side`.
    pub fn lattice(&self, side: f64) -> Result<BoxSpec> {
        if !(self.eps > 0.0 && self.lattice_multiple >= 1.0 && side > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need ε > 0, lattice multiple >= 1 and L > 1, got {}, {}, {side}",
                self.eps, self.lattice_multiple
            )));
        }
        let intervals = (side * self.lattice_multiple / self.eps).ceil() as usize;
        BoxSpec::neumann(side, intervals.next_power_of_two() + 1)
    }
}

/// One `(L, seed)` cell of the noise-growth sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseGrowthRow {
    pub side: f64,
    pub seed: u64,
    pub eps: f64,
    pub points: usize,
    /// `‖ξ_ε‖_{C^{−1−γ}}`.
    pub xi_norm: f64,
    /// `‖ξ_ε ⊙ σ(D)ξ_ε − c_ε‖_{C^{−γ}}`.
    pub enhanced_norm: f64,
    pub m: f64,
    /// `‖ξ_ε‖² / log L`.
    pub xi_ratio: f64,
    /// `‖Ξ_ε‖ / log L`.
    pub enhanced_ratio: f64,
    /// `M / log L`.
    pub m_ratio: f64,
}

/// Norms of one cell; the subtraction constant is the exact lattice sum of the cutoff route.
pub fn noise_growth_cell(side: f64, seed: u64, settings: &GrowthSettings) -> Result<NoiseGrowthRow> {
    settings.exponents.validate()?;
    let spec = settings.lattice(side)?;
    let nc = sample_white_noise(&spec, seed);
    let mollifier = MollifierSpec::new(MollifierKind::FourierCutoff, settings.eps)?;
    let enhanced = enhance_mollified(&nc, &mollifier, &RenormLaw::standard(0.0))?;
    let gamma = settings.gamma();
    let xi_norm = besov_norm(&enhanced.xi, -1.0 - gamma, f64::INFINITY, f64::INFINITY)?;
    let enhanced_norm = besov_norm(&enhanced.big_xi, -gamma, f64::INFINITY, f64::INFINITY)?;
    let m = ResolventProblem::from_potential(&enhanced.xi, enhanced.c_eps, &settings.exponents)?.m;
    let log_side = side.ln();
    Ok(NoiseGrowthRow {
        side,
        seed,
        eps: settings.eps,
        points: spec.points(),
        xi_norm,
        enhanced_norm,
        m,
        xi_ratio: xi_norm * xi_norm / log_side,
        enhanced_ratio: enhanced_norm / log_side,
        m_ratio: m / log_side,
    })
}

/// Sweep over increasing box sides and seeds, rows ordered by `(L, seed)`.
pub fn noise_growth_experiment(sides: &[f64], seeds: &[u64], settings: &GrowthSettings) -> Result<Vec<NoiseGrowthRow>> {
    if sides.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("box sides must increase".into()));
    }
    let cells: Vec<(f64, u64)> = sides.iter().flat_map(|&l| seeds.iter().map(move |&s| (l, s))).collect();
    cells.par_iter().map(|&(side, seed)| noise_growth_cell(side, seed, settings)).collect()
}
