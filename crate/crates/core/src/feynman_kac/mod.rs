//! Partial Girsanov representation of the killed Feynman–Kac formula on a box.
//!
//! From a smooth potential `θ` and a constant `c` it builds `Z = (1 − ½Δ)^{-1}θ` and the
//! solution `Y` of `(η − ½Δ)Y = ½|∇Z|² − c + ∇Y·∇Z`. The diffusion `dX = ∇(Z+Y)(X)dt + dB`
//! weighted by `𝒟 = exp(∫(Z + ηY + ½|∇Y|²)(X_s)ds + (Z+Y)(X_0) − (Z+Y)(X_t))` then has the
//! same killed expectations as Brownian motion weighted by `exp(∫(θ − c)(B_s)ds)`.

mod growth;
mod oracle;
mod paths;

pub use growth::{noise_growth_cell, noise_growth_experiment, GrowthSettings, NoiseGrowthRow};

pub use oracle::{
    annulus_ratio, box_survival, escape_leading_order, escape_oracle, interval_exit, interval_survival,
    interval_survival_images, interval_survival_series,
};
pub use paths::{
    box_splitting_experiment, escape_probability, log_weight, mc_total_mass, simulate_paths, BoxSplitting, PathBatch,
    PathOptions, SplitTerm, WeightedEstimate,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{besov_norm, besov_norm_vector, neg_laplacian_symbol, sigma_symbol, BoxSpec, GridField};
use crate::paracontrolled::{dealiased_product, half_grad_squared, refine};

/// Regularity exponents `(α, β)` that fix the growth of `η` in `M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityExponents {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for RegularityExponents {
    fn default() -> Self {
        Self { alpha: -9.0 / 8.0, beta: 5.0 / 4.0 }
    }
}

impl RegularityExponents {
    /// Requires `α ∈ (−4/3, −1)` and `β ∈ (−α, 2α + 4)`.
    pub fn validate(&self) -> Result<()> {
        let RegularityExponents { alpha, beta } = *self;
        if !(alpha > -4.0 / 3.0 && alpha < -1.0) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} outside (-4/3, -1)")));
        }
        if !(beta > -alpha && beta < 2.0 * alpha + 4.0) {
            return Err(Error::InvalidParameter(format!("beta {beta} outside ({}, {})", -alpha, 2.0 * alpha + 4.0)));
        }
        Ok(())
    }

    /// Power of `1 + M` in `η`: `2 / (2α + 4 − β)`.
    pub fn eta_power(&self) -> f64 {
        2.0 / (2.0 * self.alpha + 4.0 - self.beta)
    }

    /// Predicted slope of `log(contraction factor)` against `log η`: `−(2α + 4 − β)/2`.
    pub fn contraction_exponent(&self) -> f64 {
        -(2.0 * self.alpha + 4.0 - self.beta) / 2.0
    }
}

/// `Z = σ(D)θ` with `σ(D) = (1 − ½Δ)^{-1}` in the field's own cosine basis.
pub fn compute_z(theta: &GridField) -> Result<GridField> {
    theta.apply_multiplier(sigma_symbol)
}

/// Symbol of `(η − ½Δ)^{-1}`.
fn resolvent(eta: f64) -> impl Fn([f64; 2]) -> f64 {
    move |f| 1.0 / (eta + 0.5 * neg_laplacian_symbol(f))
}

/// `(η − ½Δ)v`.
fn apply_resolvent_inverse(v: &GridField, eta: f64) -> Result<GridField> {
    v.apply_multiplier(|f| eta + 0.5 * neg_laplacian_symbol(f))
}

/// `Σ_i ∂_i v · g_i` with dealiased products.
fn transport(v: &GridField, g: &[GridField; 2]) -> Result<GridField> {
    let [d1, d2] = v.gradient()?;
    dealiased_product(&d1, &g[0])?.add(&dealiased_product(&d2, &g[1])?)
}

/// Stopping rule of [`picard_solve_y`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    /// Target of `‖(η − ½Δ)Y − f − ∇Y·g‖₂ / ‖f‖₂`.
    pub tol: f64,
    pub max_iter: usize,
    /// Hölder–Besov exponent in which successive differences are measured.
    pub beta: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200, beta: RegularityExponents::default().beta }
    }
}

/// Fixed point of the resolvent iteration and its convergence record.
#[derive(Clone, Debug)]
pub struct PicardSolution {
    pub y: GridField,
    /// Relative residual, recomputed from the returned field.
    pub residual: f64,
    pub iterations: usize,
    /// Largest ratio of successive `C^β` differences; zero when the map is constant.
    pub contraction: f64,
    pub ratios: Vec<f64>,
}

/// Solves `(η − ½Δ)Y = f + ∇Y·g` by iterating `v ↦ (η − ½Δ)^{-1}(f + ∇v·g)` from `v = 0`.
///
/// The contraction factor is the largest ratio of successive `C^β` differences, a lower bound
/// for the Lipschitz constant of the map; a ratio of 1 or more fails with
/// [`Error::NotContracting`].
pub fn picard_solve_y(f: &GridField, g: &[GridField; 2], eta: f64, opts: &PicardOptions) -> Result<PicardSolution> {
    picard_solve_y_from(f, g, eta, opts, None)
}

/// [`picard_solve_y`] from an explicit initial guess.
pub fn picard_solve_y_from(
    f: &GridField,
    g: &[GridField; 2],
    eta: f64,
    opts: &PicardOptions,
    start: Option<&GridField>,
) -> Result<PicardSolution> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    f.check_same_box(&g[0])?;
    f.check_same_box(&g[1])?;
    let f_norm = f.l2_norm();
    if f_norm == 0.0 && start.is_none() {
        return Ok(PicardSolution { y: f.clone(), residual: 0.0, iterations: 0, contraction: 0.0, ratios: Vec::new() });
    }
    let scale = if f_norm > 0.0 { f_norm } else { 1.0 };
    let step = |v: &GridField| -> Result<GridField> { f.add(&transport(v, g)?)?.apply_multiplier(resolvent(eta)) };
    let mut v = match start {
        Some(s) => s.clone(),
        None => f.apply_multiplier(resolvent(eta))?,
    };
    let mut ratios = Vec::new();
    let mut previous: Option<f64> = None;
    let mut iterations = 0;
    for _ in 0..opts.max_iter {
        iterations += 1;
        let next = step(&v)?;
        let diff = next.sub(&v)?;
        // the residual of v is (η − ½Δ)(v − next), so it is available before accepting next
        let residual = apply_resolvent_inverse(&diff, eta)?.l2_norm() / scale;
        let size = besov_norm(&diff, opts.beta, f64::INFINITY, f64::INFINITY)?;
        if !size.is_finite() {
            return Err(Error::NonFinite("Picard iterate"));
        }
        if let Some(prev) = previous.filter(|p| *p > 0.0) {
            let ratio = size / prev;
            ratios.push(ratio);
            if ratio >= 1.0 {
                return Err(Error::NotContracting { factor: ratio });
            }
        }
        previous = Some(size);
        v = next;
        if residual <= opts.tol || size == 0.0 {
            let residual = apply_resolvent_inverse(&v, eta)?.sub(f)?.sub(&transport(&v, g)?)?.l2_norm() / scale;
            let contraction = ratios.iter().cloned().fold(0.0, f64::max);
            return Ok(PicardSolution { y: v, residual, iterations, contraction, ratios });
        }
    }
    let residual = apply_resolvent_inverse(&v, eta)?.sub(f)?.sub(&transport(&v, g)?)?.l2_norm() / scale;
    Err(Error::NoConvergence { iterations, residual })
}

/// `η = C (1 + M)^{2/(2α+4−β)}`.
pub fn eta_from_m(m: f64, exps: &RegularityExponents, c_cal: f64) -> Result<f64> {
    exps.validate()?;
    if !(m >= 0.0) || !(c_cal > 0.0) {
        return Err(Error::InvalidParameter(format!("need M >= 0 and C > 0, got M = {m}, C = {c_cal}")));
    }
    Ok(c_cal * (1.0 + m).powf(exps.eta_power()))
}

/// `max{‖wick‖_{C^{2α+2}}, ‖∇Z‖_{C^{α+1}}}` with grid-truncated Besov norms.
pub fn compute_m(z: &GridField, wick: &GridField, exps: &RegularityExponents) -> Result<f64> {
    z.check_same_box(wick)?;
    let quadratic = besov_norm(wick, 2.0 * exps.alpha + 2.0, f64::INFINITY, f64::INFINITY)?;
    let linear = besov_norm_vector(&z.gradient()?, exps.alpha + 1.0, f64::INFINITY, f64::INFINITY)?;
    Ok(quadratic.max(linear))
}

/// Data `(f, g, M)` of one resolvent problem, used to calibrate the constant of `η`.
#[derive(Clone, Debug)]
pub struct ResolventProblem {
    pub z: GridField,
    pub f: GridField,
    pub g: [GridField; 2],
    pub m: f64,
}

impl ResolventProblem {
    /// `f = ½|∇Z|² − c`, `g = ∇Z` for `Z = σ(D)θ`.
    pub fn from_potential(theta: &GridField, c: f64, exps: &RegularityExponents) -> Result<Self> {
        let z = compute_z(theta)?;
        let f = half_grad_squared(&z)?.shift(-c);
        let m = compute_m(&z, &f, exps)?;
        Ok(Self { g: z.gradient()?, z, f, m })
    }
}

/// Smallest `C = 2^j`, `j ∈ [−40, 40]`, whose `η` gives a contracting Picard iteration on
/// every reference problem. Contraction is monotone in `η`, so `j` is found by bisection.
pub fn calibrate_eta_constant(
    problems: &[ResolventProblem],
    exps: &RegularityExponents,
    opts: &PicardOptions,
) -> Result<f64> {
    let contracts = |j: i32| -> Result<bool> {
        for p in problems {
            let eta = eta_from_m(p.m, exps, 2f64.powi(j))?;
            match picard_solve_y(&p.f, &p.g, eta, opts) {
                Ok(sol) if sol.contraction < 1.0 => {}
                Ok(_) | Err(Error::NotContracting { .. }) | Err(Error::NoConvergence { .. }) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
        Ok(true)
    };
    let (mut lo, mut hi) = (-40, 40);
    if contracts(lo)? {
        return Ok(2f64.powi(lo));
    }
    if !contracts(hi)? {
        return Err(Error::NotContracting { factor: f64::NAN });
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if contracts(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(2f64.powi(hi))
}

/// How [`DriftData::build`] picks `η` and resolves the fields for path simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftSettings {
    pub exponents: RegularityExponents,
    pub eta_constant: f64,
    pub picard: PicardOptions,
    /// Lattice points per axis of the interpolation grid; `None` keeps the input grid.
    pub interpolation_points: Option<usize>,
}

impl Default for DriftSettings {
    fn default() -> Self {
        Self {
            exponents: RegularityExponents::default(),
            eta_constant: 1.0,
            picard: PicardOptions::default(),
            interpolation_points: None,
        }
    }
}

/// Everything the weighted diffusion needs on one box.
#[derive(Clone, Debug)]
pub struct DriftData {
    pub z: GridField,
    pub y: GridField,
    pub eta: f64,
    pub m: f64,
    pub c: f64,
    /// `∇(Z + Y)`.
    pub grad_zy: [GridField; 2],
    /// `½|∇Z|² − c`, the source of the resolvent equation.
    pub wick: GridField,
    pub picard_residual: f64,
    pub picard_contraction: f64,
    /// `Z + ηY + ½|∇Y|²`.
    pub integrand: GridField,
    /// `Z + Y`.
    pub boundary: GridField,
    interp: paths::Interpolant,
}

impl DriftData {
    /// Builds `Z`, `M`, `η` and `Y` from a smooth potential `θ` (Neumann field) and `c`.
    pub fn build(theta: &GridField, c: f64, settings: &DriftSettings) -> Result<Self> {
        let problem = ResolventProblem::from_potential(theta, c, &settings.exponents)?;
        let eta = eta_from_m(problem.m, &settings.exponents, settings.eta_constant)?;
        let solution = picard_solve_y(&problem.f, &problem.g, eta, &settings.picard)?;
        Self::assemble(problem.z, solution.y, eta, problem.m, c, problem.f, solution.residual, solution.contraction, settings)
    }

    /// Drift built from explicit `Z` and `Y`; `wick` is set to `½|∇Z|² − c`.
    pub fn from_fields(z: GridField, y: GridField, eta: f64, c: f64, settings: &DriftSettings) -> Result<Self> {
        z.check_same_box(&y)?;
        let wick = half_grad_squared(&z)?.shift(-c);
        let m = compute_m(&z, &wick, &settings.exponents)?;
        Self::assemble(z, y, eta, m, c, wick, 0.0, 0.0, settings)
    }

    /// `Z = Y = 0`: plain Brownian motion with unit weight.
    pub fn zero(spec: &BoxSpec) -> Result<Self> {
        let z = GridField::zeros(*spec);
        Self::from_fields(z.clone(), z, 1.0, 0.0, &DriftSettings::default())
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        z: GridField,
        y: GridField,
        eta: f64,
        m: f64,
        c: f64,
        wick: GridField,
        picard_residual: f64,
        picard_contraction: f64,
        settings: &DriftSettings,
    ) -> Result<Self> {
        let boundary = z.add(&y)?;
        let grad_zy = boundary.gradient()?;
        let integrand = z.add(&y.scale(eta))?.add(&half_grad_squared(&y)?)?;
        let resolve = |f: &GridField| match settings.interpolation_points {
            Some(points) if points != f.spec().points() => refine(f, points),
            _ => Ok(f.clone()),
        };
        let interp = paths::Interpolant::new([
            &resolve(&grad_zy[0])?,
            &resolve(&grad_zy[1])?,
            &resolve(&integrand)?,
            &resolve(&boundary)?,
        ])?;
        Ok(Self { z, y, eta, m, c, grad_zy, wick, picard_residual, picard_contraction, integrand, boundary, interp })
    }

    pub fn spec(&self) -> &BoxSpec {
        self.z.spec()
    }

    /// `Z + ηY − ½Δ(Z+Y) − ½|∇(Z+Y)|² + ½|∇Y|²`, which equals `θ − c` when `Y` solves its
    /// equation and the products are exactly representable on the grid.
    pub fn potential_identity(&self) -> Result<GridField> {
        let half_lap = self.boundary.laplacian()?.scale(0.5);
        self.integrand.sub(&half_lap)?.sub(&half_grad_squared(&self.boundary)?)
    }

    /// Interpolated `(∇(Z+Y), Z + ηY + ½|∇Y|², Z + Y)` at a point of the box.
    pub fn sample(&self, x: [f64; 2]) -> [f64; 4] {
        self.interp.sample(x)
    }
}
