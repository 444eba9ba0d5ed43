//! The constant `χ = 2 sup_ψ ‖ψ‖₄⁴ / (‖∇ψ‖₂² ‖ψ‖₂²)` by two independent routes: projected
//! ascent on the quotient, and the ground state of `−ΔQ + Q = Q³` (grid iteration plus radial
//! shooting).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{neg_laplacian_symbol, BoxSpec, GridField};

/// Default box: side 40, wide enough for unit-scale profiles to decay below `1e-8`.
pub const DEFAULT_SIDE: f64 = 40.0;

/// Which route produced a [`ChiResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiMethod {
    GradientAscent,
    GroundStateFlow,
}

/// Value of `χ` with its (unit `L²` norm) optimiser.
#[derive(Clone, Debug)]
pub struct ChiResult {
    pub chi: f64,
    pub maximizer: GridField,
    pub method: ChiMethod,
    /// Objective after each accepted step: `2R`, times `e^{−(log κ)²}` for the ascent route.
    pub functional_history: Vec<f64>,
    pub iterations: usize,
    /// Final first-order residual of the route.
    pub residual: f64,
    /// `max |ψ|` on the box boundary relative to `max |ψ|`.
    pub boundary_decay: f64,
}

/// `(‖ψ‖₄⁴, ‖∇ψ‖₂², ‖ψ‖₂²)` with trapezoid sums. The gradient energy is `−⟨ψ, Δψ⟩` so it
/// includes the Nyquist cosine mode, whose derivative vanishes on the nodes; this keeps the
/// quotient consistent with the Laplacian in its `L²` gradient.
fn moments(psi: &GridField) -> Result<(f64, f64, f64)> {
    let quartic = psi.map(|v| v.powi(4)).integral();
    let grad = -psi.mul(&psi.laplacian()?)?.integral();
    let mass = psi.map(|v| v * v).integral();
    Ok((quartic, grad, mass))
}

/// Scale- and dilation-invariant quotient `R(ψ) = ‖ψ‖₄⁴ / (‖∇ψ‖₂² ‖ψ‖₂²)`.
pub fn gn_quotient(psi: &GridField) -> Result<f64> {
    let (quartic, grad, mass) = moments(psi)?;
    if !(grad > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidParameter("quotient needs a nonzero field with nonzero gradient".into()));
    }
    Ok(quartic / (grad * mass))
}

fn normalized(psi: &GridField) -> GridField {
    psi.scale(1.0 / psi.map(|v| v * v).integral().sqrt())
}

fn boundary_decay(psi: &GridField) -> f64 {
    let n = psi.spec().points();
    let edge = (0..n)
        .flat_map(|j| [psi.at(0, j), psi.at(n - 1, j), psi.at(j, 0), psi.at(j, n - 1)])
        .fold(0.0f64, |m, v| m.max(v.abs()));
    edge / psi.max_abs()
}

/// Knobs of [`maximize_quotient`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    pub max_iter: usize,
    /// Stop once the preconditioned gradient of `log R` has `L²` norm below this.
    pub tol: f64,
    pub initial_step: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self { max_iter: 5000, tol: 1e-5, initial_step: 0.5 }
    }
}

/// Weight of the scale gauge `(log κ)²`, `κ = ‖∇ψ‖₂² / ‖ψ‖₂²`. `R` is dilation invariant, so
/// without the gauge the iterate drifts to sub-grid scales where the discrete quotient
/// overshoots. Dilations reach `κ = 1` without changing `R`, so the supremum is unchanged.
const SCALE_GAUGE: f64 = 1.0;

/// Ascent objective `log R − SCALE_GAUGE (log κ)²`.
fn gauged_log_quotient(psi: &GridField) -> Result<f64> {
    let (_, grad, mass) = moments(psi)?;
    Ok(gn_quotient(psi)?.ln() - SCALE_GAUGE * (grad / mass).ln().powi(2))
}

/// `L²` gradient of the gauged objective and its `H¹`-preconditioned ascent direction.
fn ascent_direction(psi: &GridField) -> Result<(GridField, f64)> {
    let (quartic, grad, mass) = moments(psi)?;
    let lap = psi.laplacian()?;
    let log_kappa = (grad / mass).ln();
    let gauge = 4.0 * SCALE_GAUGE * log_kappa;
    let g = psi
        .map(|v| 4.0 * v.powi(3) / quartic - 2.0 * v / mass + gauge * v / mass)
        .add(&lap.scale((2.0 + gauge) / grad))?;
    let kappa = grad / mass;
    let direction = g.apply_multiplier(|f| 1.0 / (1.0 + neg_laplacian_symbol(f) / kappa))?;
    let norm = direction.map(|v| v * v).integral().sqrt() * mass.sqrt();
    Ok((direction, norm))
}

/// Projected gradient ascent over unit-norm fields on `log R` plus a scale gauge, halving the
/// step until the objective increases, so the history is monotone. Returns `χ = 2R*`.
pub fn maximize_quotient(init: &GridField, opts: &AscentOptions) -> Result<ChiResult> {
    let mut psi = normalized(init);
    let mut value = gauged_log_quotient(&psi)?;
    let mut history = vec![2.0 * value.exp()];
    let mut step = opts.initial_step;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let (direction, norm) = ascent_direction(&psi)?;
        residual = norm;
        if residual <= opts.tol {
            break;
        }
        iterations += 1;
        let mut accepted = false;
        while step > 1e-14 {
            let trial = normalized(&psi.add(&direction.scale(step))?);
            let trial_value = gauged_log_quotient(&trial)?;
            if trial_value > value {
                psi = trial;
                value = trial_value;
                history.push(2.0 * value.exp());
                step = (1.5 * step).min(1e3);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            if residual <= 10.0 * opts.tol {
                break;
            }
            return Err(Error::Stagnation(format!("no ascent step at residual {residual:e}")));
        }
    }
    Ok(ChiResult {
        chi: 2.0 * gn_quotient(&psi)?,
        boundary_decay: boundary_decay(&psi),
        maximizer: psi,
        method: ChiMethod::GradientAscent,
        functional_history: history,
        iterations,
        residual,
    })
}

/// Normalised fixed-point iteration `ψ ← (1 − Δ)^{-1}ψ³ / ‖·‖₂` for the ground state of
/// `−ΔQ + Q = Q³`; `Q = λψ` with `λ² = ⟨ψ, (1 − Δ)ψ⟩ / ⟨ψ, ψ³⟩`. This is Petviashvili's
/// iteration with the amplitude factored out, so every iterate has unit `L²` norm.
pub fn ground_state_flow(spec: &BoxSpec, tol: f64, max_iter: usize) -> Result<ChiResult> {
    let mut psi = normalized(&GridField::from_fn(*spec, |x, y| (-(x * x + y * y)).exp()));
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let amplitude = |psi: &GridField| -> Result<f64> {
        let elliptic = psi.sub(&psi.laplacian()?)?.mul(psi)?.integral();
        let cubic = psi.map(|v| v.powi(4)).integral();
        Ok((elliptic / cubic).sqrt())
    };
    while iterations < max_iter {
        let q = psi.scale(amplitude(&psi)?);
        let defect = q.sub(&q.laplacian()?)?.sub(&q.map(|v| v.powi(3)))?;
        residual = defect.l2_norm() / q.l2_norm();
        history.push(2.0 * gn_quotient(&psi)?);
        if residual <= tol {
            break;
        }
        iterations += 1;
        let cubed = psi.map(|v| v.powi(3));
        psi = normalized(&cubed.apply_multiplier(|f| 1.0 / (1.0 + neg_laplacian_symbol(f)))?);
    }
    if residual > tol {
        return Err(Error::NoConvergence { iterations, residual });
    }
    Ok(ChiResult {
        chi: 2.0 * gn_quotient(&psi)?,
        boundary_decay: boundary_decay(&psi),
        maximizer: psi,
        method: ChiMethod::GroundStateFlow,
        functional_history: history,
        iterations,
        residual,
    })
}

/// Radial ground state of `Q'' + Q'/r − Q + Q³ = 0`, `Q'(0) = 0`, `Q → 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGroundState {
    pub centre_value: f64,
    /// `2 ‖Q‖₄⁴ / (‖∇Q‖₂² ‖Q‖₂²)` from the radial profile.
    pub chi: f64,
    /// `‖Q‖₂²`.
    pub mass: f64,
}

enum Shot {
    /// `Q` crossed zero: the centre value is too large.
    Overshoot,
    /// `Q'` turned positive while `Q > 0`: too small.
    Undershoot,
    Undecided,
}

/// RK4 integration of the radial ODE as a first-order system; returns the verdict and the
/// samples `(r, Q, Q')` up to the decision point.
fn shoot(a: f64, dr: f64, r_max: f64) -> (Shot, Vec<[f64; 3]>) {
    // series start avoids the 1/r singularity: Q ≈ a + (a − a³) r²/4
    let r0 = dr;
    let mut state = [a + 0.25 * (a - a.powi(3)) * r0 * r0, 0.5 * (a - a.powi(3)) * r0];
    let rhs = |r: f64, s: [f64; 2]| [s[1], -s[1] / r + s[0] - s[0].powi(3)];
    let mut samples = vec![[0.0, a, 0.0], [r0, state[0], state[1]]];
    let mut r = r0;
    while r < r_max {
        let k1 = rhs(r, state);
        let k2 = rhs(r + 0.5 * dr, [state[0] + 0.5 * dr * k1[0], state[1] + 0.5 * dr * k1[1]]);
        let k3 = rhs(r + 0.5 * dr, [state[0] + 0.5 * dr * k2[0], state[1] + 0.5 * dr * k2[1]]);
        let k4 = rhs(r + dr, [state[0] + dr * k3[0], state[1] + dr * k3[1]]);
        for c in 0..2 {
            state[c] += dr / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        r += dr;
        if state[0] < 0.0 {
            return (Shot::Overshoot, samples);
        }
        if state[1] > 0.0 {
            return (Shot::Undershoot, samples);
        }
        samples.push([r, state[0], state[1]]);
    }
    (Shot::Undecided, samples)
}

/// Bisection on `Q(0)` in `[1.5, 4]` until the bracket is below `1e-13`.
pub fn radial_ground_state(dr: f64) -> Result<RadialGroundState> {
    let r_max = 40.0;
    let (mut lo, mut hi) = (1.5, 4.0);
    match (shoot(lo, dr, r_max).0, shoot(hi, dr, r_max).0) {
        (Shot::Undershoot, Shot::Overshoot) => {}
        _ => return Err(Error::Bracket("centre values 1.5 and 4 do not bracket the ground state".into())),
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        match shoot(mid, dr, r_max).0 {
            Shot::Overshoot => hi = mid,
            Shot::Undershoot => lo = mid,
            Shot::Undecided => break,
        }
    }
    let a = 0.5 * (lo + hi);
    let (_, samples) = shoot(a, dr, r_max);
    // the shot separates from Q once Q is at its smallest; integrate up to that point
    let cut = samples
        .iter()
        .enumerate()
        .min_by(|x, y| x.1[1].abs().total_cmp(&y.1[1].abs()))
        .map_or(samples.len(), |(i, _)| i + 1);
    // composite Simpson on the uniform samples; an odd trailing interval is dropped
    let used = &samples[..1 + 2 * ((cut - 1) / 2)];
    let radial = |f: &dyn Fn(&[f64; 3]) -> f64| -> f64 {
        let sum: f64 = used
            .windows(3)
            .step_by(2)
            .map(|w| f(&w[0]) * w[0][0] + 4.0 * f(&w[1]) * w[1][0] + f(&w[2]) * w[2][0])
            .sum();
        sum * dr / 3.0 * 2.0 * std::f64::consts::PI
    };
    let mass = radial(&|s| s[1] * s[1]);
    let quartic = radial(&|s| s[1].powi(4));
    let grad = radial(&|s| s[2] * s[2]);
    Ok(RadialGroundState { centre_value: a, chi: 2.0 * quartic / (grad * mass), mass })
}

/// Ground-state route to `χ` on `spec`, cross-checked against radial shooting.
#[derive(Clone, Debug)]
pub struct GroundStateOracle {
    pub flow: ChiResult,
    pub radial: RadialGroundState,
}

/// Runs [`ground_state_flow`] on `spec` and [`radial_ground_state`] with step `1e-3`.
pub fn ground_state_oracle(spec: &BoxSpec, tol: f64) -> Result<GroundStateOracle> {
    Ok(GroundStateOracle { flow: ground_state_flow(spec, tol, 2000)?, radial: radial_ground_state(1e-3)? })
}

/// Neumann box of side [`DEFAULT_SIDE`] centred at the origin.
pub fn default_box(points: usize) -> Result<BoxSpec> {
    BoxSpec::neumann(DEFAULT_SIDE, points)
}

/// Unit-norm Gaussian `exp(−|x − centre|² / (2s))`.
pub fn gaussian(spec: &BoxSpec, s: f64, centre: [f64; 2]) -> GridField {
    normalized(&GridField::from_fn(*spec, |x, y| (-((x - centre[0]).powi(2) + (y - centre[1]).powi(2)) / (2.0 * s)).exp()))
}
