//! White noise on a box, its two mollifications, renormalisation constants and the enhanced
//! pair `(ξ_ε, Ξ_ε)`.

mod kernel;
mod manifest;
mod renorm;

pub use kernel::{parity_blocked_sqrt, ConvolutionKernel};
pub use manifest::NoiseManifest;
pub use renorm::{
    calibrate_law, renorm_constant_exact, renorm_constant_log, ConvolutionProfile, CutoffProfile, ProfileShape,
    RenormLaw, RenormSum, DEFAULT_TAIL_TOL,
};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inverse_transform, sigma_symbol, Boundary, BoxSpec, GridField, Parity, SpectralField};
use crate::paracontrolled::resonance;
use crate::profile::plateau;
use crate::rng::{mode_counter, stream, Domain};

/// One standard Gaussian per cosine mode `k ∈ {0..=M}²` of a box.
///
/// Mode `k` is drawn from its own counter stream, so two grids sharing a seed agree on every
/// mode they both carry.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseCoeffs {
    spec: BoxSpec,
    seed: u64,
    gaussians: Vec<f64>,
}

impl NoiseCoeffs {
    /// Noise with every coefficient zero.
    pub fn zeros(spec: &BoxSpec) -> Self {
        let spec = spec.with_boundary(Boundary::Neumann);
        Self { spec, seed: 0, gaussians: vec![0.0; spec.len()] }
    }

    pub fn from_gaussians(spec: &BoxSpec, seed: u64, gaussians: Vec<f64>) -> Result<Self> {
        let spec = spec.with_boundary(Boundary::Neumann);
        if gaussians.len() != spec.len() {
            return Err(Error::DimensionMismatch { expected: spec.len(), found: gaussians.len() });
        }
        Ok(Self { spec, seed, gaussians })
    }

    /// Neumann box the coefficients index.
    pub fn spec(&self) -> &BoxSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn gaussians(&self) -> &[f64] {
        &self.gaussians
    }

    pub fn get(&self, k: [usize; 2]) -> f64 {
        self.gaussians[k[0] * self.spec.points() + k[1]]
    }

    fn spectral(&self, coeffs: Vec<f64>) -> SpectralField {
        SpectralField::from_parts(self.spec, [Parity::Even; 2], coeffs)
    }

    /// Nyquist-truncated white noise on the grid.
    pub fn raw_field(&self) -> GridField {
        inverse_transform(&self.spectral(self.gaussians.clone()))
    }
}

/// Independent standard normals per cosine mode, reproducible from `seed`.
pub fn sample_white_noise(spec: &BoxSpec, seed: u64) -> NoiseCoeffs {
    let spec = spec.with_boundary(Boundary::Neumann);
    let n = spec.points();
    let gaussians = (0..spec.len())
        .into_par_iter()
        .map(|idx| stream(seed, Domain::NoiseMode, mode_counter([idx / n, idx % n])).sample(StandardNormal))
        .collect();
    NoiseCoeffs { spec, seed, gaussians }
}

/// Which mollification produced a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierKind {
    /// Radial smooth cutoff `τ(εk/L)` on the cosine coefficients.
    FourierCutoff,
    /// Tensor convolution with `ψ_ε(x) = ε⁻²φ(x₁/ε)φ(x₂/ε)`.
    Convolution,
}

impl std::fmt::Display for MollifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MollifierKind::FourierCutoff => "fourier_cutoff",
            MollifierKind::Convolution => "convolution",
        })
    }
}

impl std::str::FromStr for MollifierKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier_cutoff" | "fourier" => Ok(MollifierKind::FourierCutoff),
            "convolution" => Ok(MollifierKind::Convolution),
            other => Err(Error::InvalidParameter(format!("unknown mollifier kind {other:?}"))),
        }
    }
}

/// Mollifier kind and scale; the profiles are the fixed plateau cutoff and bump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub kind: MollifierKind,
    pub eps: f64,
}

impl MollifierSpec {
    pub fn new(kind: MollifierKind, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("mollification scale must be positive, got {eps}")));
        }
        Ok(Self { kind, eps })
    }

    /// `ε >= 2Δx`: the mollified field is resolved by the grid.
    pub fn resolved_on(&self, spec: &BoxSpec) -> bool {
        self.eps >= 2.0 * spec.spacing() * (1.0 - 1e-12)
    }
}

/// Radial cutoff equal to 1 on `|y| <= inner` and 0 on `|y| >= outer`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierCutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Default for FourierCutoff {
    fn default() -> Self {
        Self { inner: 0.5, outer: 1.0 }
    }
}

impl FourierCutoff {
    pub fn value(&self, y: [f64; 2]) -> f64 {
        plateau(y[0].hypot(y[1]), self.inner, self.outer)
    }
}

/// A mollified field and whether its scale is resolved by the grid.
#[derive(Clone, Debug)]
pub struct Mollified {
    pub field: GridField,
    pub resolved: bool,
}

/// `ξ_ε = Σ_k τ(εk/L) g_k n_k` on the grid.
pub fn mollify_fourier(nc: &NoiseCoeffs, eps: f64, cutoff: &FourierCutoff) -> Result<Mollified> {
    let spec = MollifierSpec::new(MollifierKind::FourierCutoff, eps)?;
    let n = nc.spec.points();
    let side = nc.spec.side();
    let coeffs = nc
        .gaussians
        .iter()
        .enumerate()
        .map(|(idx, g)| g * cutoff.value([eps * (idx / n) as f64 / side, eps * (idx % n) as f64 / side]))
        .collect();
    Ok(Mollified { field: inverse_transform(&nc.spectral(coeffs)), resolved: spec.resolved_on(&nc.spec) })
}

/// Convolution-mollified noise, exact in law on the retained modes.
///
/// The mode coefficients have covariance `A ⊗ A` with `A` the one-axis kernel covariance;
/// they are realised as `S G Sᵀ` with `S = A^{1/2}`, so `ε → 0` returns the raw Gaussians.
pub fn mollify_convolution(nc: &NoiseCoeffs, eps: f64, kernel: &ConvolutionKernel) -> Result<Mollified> {
    let spec = MollifierSpec::new(MollifierKind::Convolution, eps)?;
    let n = nc.spec.points();
    let root = parity_blocked_sqrt(&kernel.line_covariance(n, eps, nc.spec.side())?);
    let g = DMatrix::from_row_slice(n, n, &nc.gaussians);
    let mixed = &root * g * root.transpose();
    let coeffs = (0..n * n).map(|idx| mixed[(idx / n, idx % n)]).collect();
    Ok(Mollified { field: inverse_transform(&nc.spectral(coeffs)), resolved: spec.resolved_on(&nc.spec) })
}

/// Dispatches on the mollifier kind with the default profiles.
pub fn mollify(nc: &NoiseCoeffs, spec: &MollifierSpec) -> Result<Mollified> {
    match spec.kind {
        MollifierKind::FourierCutoff => mollify_fourier(nc, spec.eps, &FourierCutoff::default()),
        MollifierKind::Convolution => mollify_convolution(nc, spec.eps, ConvolutionKernel::standard()),
    }
}

/// Renormalisation constant subtracted from `ξ_ε ⊙ σ(D)ξ_ε` for a mollifier.
///
/// The cutoff route uses the exact lattice sum `¼ c_{L,ε}`; the convolution route uses the
/// supplied logarithmic law.
pub fn subtraction_constant(side: f64, spec: &MollifierSpec, law: &RenormLaw) -> Result<f64> {
    match spec.kind {
        MollifierKind::FourierCutoff => {
            Ok(0.25 * renorm_constant_exact(side, spec.eps, &FourierCutoff::default(), DEFAULT_TAIL_TOL)?.value)
        }
        MollifierKind::Convolution => Ok(law.value(spec.eps)),
    }
}

/// The pair `(ξ_ε, Ξ_ε)` with `Ξ_ε = ξ_ε ⊙ σ(D)ξ_ε − c_ε`.
#[derive(Clone, Debug)]
pub struct EnhancedNoise {
    pub xi: GridField,
    pub big_xi: GridField,
    pub c_eps: f64,
    pub mollifier: Option<MollifierSpec>,
}

/// Builds `Ξ = ξ ⊙ σ(D)ξ − c`.
pub fn enhance(xi: &GridField, c: f64) -> Result<EnhancedNoise> {
    let smoothed = xi.apply_multiplier(sigma_symbol)?;
    let big_xi = resonance(xi, &smoothed)?.shift(-c);
    Ok(EnhancedNoise { xi: xi.clone(), big_xi, c_eps: c, mollifier: None })
}

/// Mollifies `nc`, subtracts the route's constant and enhances.
pub fn enhance_mollified(nc: &NoiseCoeffs, spec: &MollifierSpec, law: &RenormLaw) -> Result<EnhancedNoise> {
    let xi = mollify(nc, spec)?.field;
    let c = subtraction_constant(nc.spec.side(), spec, law)?;
    let mut out = enhance(&xi, c)?;
    out.mollifier = Some(*spec);
    Ok(out)
}
