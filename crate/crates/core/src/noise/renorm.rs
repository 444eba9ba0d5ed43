//! Lattice renormalisation sums `c_{L,ε} = Σ_{k∈ℤ²} τ̃(εk/L)² / (L² + ½π²|k|²)` and the
//! logarithmic laws fitted to them.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConvolutionKernel, FourierCutoff};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::stats::{linear_fit, LinearFit};

/// Tolerance on the neglected lattice tail.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Largest summation radius attempted before reporting the tail bound as unmet.
const MAX_RADIUS: usize = 1 << 17;

/// How `τ̃` depends on its argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileShape {
    /// `τ̃(y) = factor(|y|)`.
    Radial,
    /// `τ̃(y) = factor(y₁) factor(y₂)`.
    Separable,
}

/// Cutoff `τ̃` entering the renormalisation sum.
pub trait CutoffProfile: Sync {
    fn shape(&self) -> ProfileShape;
    fn factor(&self, t: f64) -> f64;
    /// Nonincreasing bound of `τ̃(y)²` over `|y| >= r`; must decay faster than `r⁻²`
    /// for the sum to converge.
    fn squared_envelope(&self, r: f64) -> f64;
}

impl CutoffProfile for FourierCutoff {
    fn shape(&self) -> ProfileShape {
        ProfileShape::Radial
    }
    fn factor(&self, t: f64) -> f64 {
        self.value([t, 0.0])
    }
    fn squared_envelope(&self, r: f64) -> f64 {
        if r >= self.outer {
            0.0
        } else {
            1.0
        }
    }
}

/// `τ̃(y) = √(ρ(πy₁) ρ(πy₂))`: the mode variance profile of the convolution mollifier.
#[derive(Clone, Copy, Debug)]
pub struct ConvolutionProfile<'a> {
    pub kernel: &'a ConvolutionKernel,
}

impl CutoffProfile for ConvolutionProfile<'_> {
    fn shape(&self) -> ProfileShape {
        ProfileShape::Separable
    }
    fn factor(&self, t: f64) -> f64 {
        self.kernel.rho(PI * t).max(0.0).sqrt()
    }
    fn squared_envelope(&self, r: f64) -> f64 {
        // one coordinate is at least r/√2 and ρ <= min(1, B/x⁴)
        let x = PI * r * FRAC_1_SQRT_2;
        (self.kernel.rho_decay_constant() / x.powi(4)).min(1.0)
    }
}

/// Value of a lattice sum together with the bound on what was left out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormSum {
    pub value: f64,
    pub tail_bound: f64,
    pub radius: usize,
}

/// Bound on `Σ_{|k|>R}` by comparison with `2π ∫_{R-√2}^∞ f(u)(u + √2/2) du`, where `f` is the
/// decreasing radial majorant of the summand.
fn tail_bound(side: f64, eps: f64, profile: &dyn CutoffProfile, radius: usize) -> f64 {
    let c = FRAC_1_SQRT_2;
    let start = radius as f64 - 2.0 * c;
    if start <= 0.0 {
        return f64::INFINITY;
    }
    let majorant = |u: f64| profile.squared_envelope(eps * u / side) / (side * side + 0.5 * PI * PI * u * u);
    // u = start / t maps (0, 1] onto [start, ∞)
    let rule = GaussLegendre::composite(32, 16, 0.0, 1.0);
    2.0 * PI * rule.integrate(|t| {
        let u = start / t;
        majorant(u) * (u + c) * start / (t * t)
    })
}

/// Octant-symmetric lattice sum within radius `radius`.
fn lattice_sum(side: f64, eps: f64, profile: &dyn CutoffProfile, radius: usize) -> f64 {
    let scale = eps / side;
    let r2 = (radius * radius) as u64;
    let denom = |k1: usize, k2: usize| side * side + 0.5 * PI * PI * (k1 * k1 + k2 * k2) as f64;
    let separable: Vec<f64> = match profile.shape() {
        ProfileShape::Separable => (0..=radius).map(|k| profile.factor(scale * k as f64).powi(2)).collect(),
        ProfileShape::Radial => Vec::new(),
    };
    let squared = |k1: usize, k2: usize| match profile.shape() {
        ProfileShape::Radial => profile.factor(scale * ((k1 * k1 + k2 * k2) as f64).sqrt()).powi(2),
        ProfileShape::Separable => separable[k1] * separable[k2],
    };
    (0..=radius)
        .into_par_iter()
        .map(|k1| {
            let mut row = 0.0;
            for k2 in k1..=radius {
                if (k1 * k1 + k2 * k2) as u64 > r2 {
                    break;
                }
                let multiplicity = match (k1, k2) {
                    (0, 0) => 1.0,
                    (0, _) => 4.0,
                    _ if k1 == k2 => 4.0,
                    _ => 8.0,
                };
                row += multiplicity * squared(k1, k2) / denom(k1, k2);
            }
            row
        })
        .sum()
}

/// Exact lattice renormalisation sum, truncated once the tail bound is below `tol`.
pub fn renorm_constant_exact(side: f64, eps: f64, profile: &dyn CutoffProfile, tol: f64) -> Result<RenormSum> {
    if !(side > 0.0 && eps > 0.0) {
        return Err(Error::InvalidParameter(format!("need L > 0 and ε > 0, got L = {side}, ε = {eps}")));
    }
    let mut radius = ((side / eps).ceil() as usize + 2).max(8);
    let mut bound = tail_bound(side, eps, profile, radius);
    while bound > tol {
        if radius >= MAX_RADIUS {
            return Err(Error::TailBound { bound, tol });
        }
        radius = (radius * 2).min(MAX_RADIUS);
        bound = tail_bound(side, eps, profile, radius);
    }
    // shrink back towards the smallest admissible radius
    let (mut lo, mut hi) = (radius / 2, radius);
    while hi - lo > 1 && lo > 0 {
        let mid = (lo + hi) / 2;
        let b = tail_bound(side, eps, profile, mid);
        if b <= tol {
            hi = mid;
            bound = b;
        } else {
            lo = mid;
        }
    }
    radius = hi;
    Ok(RenormSum { value: lattice_sum(side, eps, profile, radius), tail_bound: bound, radius })
}

/// `c(ε) = prefactor · log(1/ε) + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormLaw {
    pub prefactor: f64,
    pub intercept: f64,
}

impl RenormLaw {
    /// Prefactor `1/(2π)` of the logarithmic law for the convolution route.
    pub const LOG_PREFACTOR: f64 = 1.0 / (2.0 * PI);

    /// Law with prefactor `1/(2π)` and the given intercept.
    pub fn standard(intercept: f64) -> Self {
        Self { prefactor: Self::LOG_PREFACTOR, intercept }
    }

    pub fn value(&self, eps: f64) -> f64 {
        self.prefactor * (1.0 / eps).ln() + self.intercept
    }
}

/// `(1/2π) log(1/ε) + C`.
pub fn renorm_constant_log(eps: f64, calibrated: f64) -> f64 {
    RenormLaw::standard(calibrated).value(eps)
}

/// Least-squares fit of `¼ c_{L,ε}` against `log(1/ε)`; the returned law is the fitted line.
pub fn calibrate_law(side: f64, eps: &[f64], profile: &dyn CutoffProfile, tol: f64) -> Result<(RenormLaw, LinearFit)> {
    let x: Vec<f64> = eps.iter().map(|e| (1.0 / e).ln()).collect();
    let y = eps
        .iter()
        .map(|&e| Ok(0.25 * renorm_constant_exact(side, e, profile, tol)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let fit = linear_fit(&x, &y);
    Ok((RenormLaw { prefactor: fit.slope, intercept: fit.intercept }, fit))
}
