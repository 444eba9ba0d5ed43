//! Strang-split time stepping of `∂_t u = ½Δu + V u` with Dirichlet boundary, total-mass
//! tracking in log space, and the eigenfunction expansion of the same semigroup.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundary, BoxSpec, GridField};
use crate::hamiltonian::{assemble, LaplacianKind, OperatorSpec, Spectrum};
use crate::profile::bump;
use crate::stats::{linear_fit, LinearFit};

/// Initial datum of the evolution.
#[derive(Clone, Debug)]
pub enum InitialCondition {
    /// Unit-mass bump centred at the origin with support radius `width` (default `2Δx`).
    DeltaAtOrigin { width: Option<f64> },
    /// `u(0) = 1` on the open box.
    UniformOne,
    Field(GridField),
}

impl InitialCondition {
    /// Values on the Dirichlet lattice of `spec` (boundary sites zero).
    pub fn realize(&self, spec: &BoxSpec) -> Result<GridField> {
        let spec = spec.with_boundary(Boundary::Dirichlet);
        let n = spec.points();
        let interior = |i: usize, j: usize| i > 0 && j > 0 && i < n - 1 && j < n - 1;
        match self {
            InitialCondition::DeltaAtOrigin { width } => {
                let eta = width.unwrap_or(2.0 * spec.spacing());
                if !(eta > 0.0) {
                    return Err(Error::InvalidParameter(format!("bump width must be positive, got {eta}")));
                }
                let raw = GridField::from_fn(spec, |x, y| bump(x / (2.0 * eta)) * bump(y / (2.0 * eta)));
                let mass = raw.integral();
                if mass <= 0.0 {
                    return Err(Error::InvalidParameter(format!("bump width {eta} is below the lattice spacing")));
                }
                Ok(raw.scale(1.0 / mass))
            }
            InitialCondition::UniformOne => {
                let values = (0..n * n).map(|idx| if interior(idx / n, idx % n) { 1.0 } else { 0.0 }).collect();
                GridField::from_values(spec, values)
            }
            InitialCondition::Field(field) => {
                let mut values = field.values().to_vec();
                for (idx, v) in values.iter_mut().enumerate() {
                    if !interior(idx / n, idx % n) {
                        *v = 0.0;
                    }
                }
                GridField::from_values(spec, values)
            }
        }
    }
}

/// Knobs of [`evolve`].
#[derive(Clone, Debug)]
pub struct EvolveOptions {
    /// Step size; default `min(0.01, Δx)`.
    pub dt: Option<f64>,
    /// The infimum is taken over the centred box of side `t^inner_exponent`.
    pub inner_exponent: f64,
    pub keep_snapshots: bool,
    /// The five-point Laplacian keeps the heat step positivity preserving; the spectral one
    /// has Gibbs undershoots, so its values are left signed.
    pub laplacian: LaplacianKind,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt: None, inner_exponent: 0.5, keep_snapshots: false, laplacian: LaplacianKind::FiniteDifference }
    }
}

/// Observables at the requested times; all magnitudes are natural logarithms so that growth
/// like `e^{tλ}` never overflows.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub log_mass: Vec<f64>,
    pub log_sup: Vec<f64>,
    /// `log inf u` over the centred box of side `t^a` (clipped to the box interior).
    pub log_inf_inner: Vec<f64>,
    /// `u(t) · e^{-log_scale}` per time when requested.
    pub snapshots: Vec<GridField>,
    pub log_scales: Vec<f64>,
    pub dt: f64,
}

impl EvolutionResult {
    /// `U(t)` itself; infinite beyond `f64` range.
    pub fn mass(&self) -> Vec<f64> {
        self.log_mass.iter().map(|l| l.exp()).collect()
    }
}

/// Time-stepper state: `u = e^{log_scale} · values`.
struct State<'a> {
    op: &'a OperatorSpec,
    values: Vec<f64>,
    log_scale: f64,
}

impl State<'_> {
    fn half_potential(&mut self, dt: f64) {
        for (u, v) in self.values.iter_mut().zip(self.op.potential()) {
            *u *= (0.5 * dt * v).exp();
        }
    }

    fn heat(&mut self, dt: f64) {
        let mut out = vec![0.0; self.values.len()];
        self.op.sine_multiplier(&self.values, |s| (dt * s).exp(), &mut out);
        if self.op.laplacian() == LaplacianKind::FiniteDifference {
            // exp(dt ½Δ_h) of the five-point stencil is entrywise nonnegative, so only roundoff is removed
            out.iter_mut().for_each(|u| *u = u.max(0.0));
        }
        self.values = out;
    }

    fn renormalize(&mut self) {
        let top = self.values.iter().cloned().fold(0.0, f64::max);
        if top > 0.0 && top.is_finite() {
            self.values.iter_mut().for_each(|u| *u /= top);
            self.log_scale += top.ln();
        }
    }

    fn strang(&mut self, dt: f64, steps: usize) {
        for _ in 0..steps {
            self.half_potential(dt);
            self.heat(dt);
            self.half_potential(dt);
            self.renormalize();
        }
    }
}

/// Evolves `u(0)` to each time in `times` (increasing, positive) with Strang splitting:
/// half potential step, exact heat step in the sine basis, half potential step.
pub fn evolve(
    spec: &BoxSpec,
    potential: &GridField,
    ic: &InitialCondition,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("output times must be positive and increasing".into()));
    }
    let op = assemble(spec, potential, opts.laplacian)?;
    evolve_operator(&op, ic, times, opts)
}

/// [`evolve`] for an already assembled operator.
pub fn evolve_operator(op: &OperatorSpec, ic: &InitialCondition, times: &[f64], opts: &EvolveOptions) -> Result<EvolutionResult> {
    let spec = *op.spec();
    let dt = opts.dt.unwrap_or(0.01f64.min(spec.spacing()));
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let u0 = ic.realize(&spec)?;
    let mut state = State { op, values: op.interior(&u0)?, log_scale: 0.0 };
    state.renormalize();
    let h2 = spec.spacing().powi(2);
    let n = spec.points();
    let mut out = EvolutionResult {
        times: times.to_vec(),
        log_mass: Vec::new(),
        log_sup: Vec::new(),
        log_inf_inner: Vec::new(),
        snapshots: Vec::new(),
        log_scales: Vec::new(),
        dt,
    };
    let mut now = 0.0;
    for &t in times {
        let steps = ((t - now) / dt).ceil().max(1.0) as usize;
        state.strang((t - now) / steps as f64, steps);
        now = t;
        // interior trapezoid weights are all Δx² (boundary values vanish)
        let mass: f64 = state.values.iter().sum::<f64>() * h2;
        if !(mass > 0.0) {
            return Err(Error::NonFinite("total mass"));
        }
        out.log_mass.push(state.log_scale + mass.ln());
        out.log_sup.push(state.log_scale);
        let half = 0.5 * t.powf(opts.inner_exponent);
        let mut inf = f64::INFINITY;
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                if spec.coordinate(i).abs() <= half && spec.coordinate(j).abs() <= half {
                    inf = inf.min(state.values[(i - 1) * (n - 2) + (j - 1)]);
                }
            }
        }
        if !inf.is_finite() {
            // inner box thinner than one cell: use the centre site
            inf = state.values[(n / 2 - 1) * (n - 2) + (n / 2 - 1)];
        }
        out.log_inf_inner.push(state.log_scale + inf.ln());
        out.log_scales.push(state.log_scale);
        if opts.keep_snapshots {
            out.snapshots.push(op.field(&state.values));
        }
    }
    Ok(out)
}

/// Truncated eigenexpansion `Σ_n e^{tλ_n} ⟨v_n, u₀⟩ v_n`.
#[derive(Clone, Debug)]
pub struct SpectralSolution {
    pub field: GridField,
    pub log_mass: f64,
    /// `e^{t(λ_last − λ₁)}`: size of the first neglected term relative to the leading one.
    pub tail_ratio: f64,
}

impl SpectralSolution {
    /// Whether the truncation is negligible at the `1e-8` level.
    pub fn tail_negligible(&self) -> bool {
        self.tail_ratio <= 1e-8
    }
}

/// Eigenexpansion of the semigroup applied to `u0` at time `t`.
pub fn spectral_solution(spectrum: &Spectrum, u0: &GridField, t: f64) -> Result<SpectralSolution> {
    let first = spectrum.eigenvectors.first().ok_or_else(|| Error::InvalidParameter("empty spectrum".into()))?;
    let lead = spectrum.eigenvalues[0];
    let mut values = vec![0.0; first.values().len()];
    let mut mass = 0.0;
    for (lambda, v) in spectrum.eigenvalues.iter().zip(&spectrum.eigenvectors) {
        let weight = (t * (lambda - lead)).exp() * v.inner(u0)?;
        values.iter_mut().zip(v.values()).for_each(|(a, b)| *a += weight * b);
        mass += weight * v.integral();
    }
    let tail_ratio = (t * (spectrum.eigenvalues.last().expect("nonempty") - lead)).exp();
    let field = GridField::from_values(*first.spec(), values)?.scale((t * lead).exp());
    Ok(SpectralSolution { field, log_mass: t * lead + mass.ln(), tail_ratio })
}

/// One time of the mass/eigenvalue comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassEigenRow {
    pub t: f64,
    pub log_mass_rate: f64,
    pub lambda1: f64,
    pub gap: f64,
    pub deviation: f64,
}

/// `(1/t) log U(t)` against `λ₁` on the same potential, with the power-law fit of the
/// deviation `|(1/t) log U(t) − λ₁| ≈ c t^{-p}` (the fit slope is `-p`).
pub fn mass_vs_eigenvalue(
    op: &OperatorSpec,
    spectrum: &Spectrum,
    ic: &InitialCondition,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<(Vec<MassEigenRow>, LinearFit)> {
    let evo = evolve_operator(op, ic, times, opts)?;
    let lambda1 = spectrum.eigenvalues[0];
    let gap = spectrum.eigenvalues.get(1).map_or(f64::NAN, |l2| lambda1 - l2);
    let rows: Vec<MassEigenRow> = times
        .iter()
        .zip(&evo.log_mass)
        .map(|(&t, &lm)| MassEigenRow { t, log_mass_rate: lm / t, lambda1, gap, deviation: (lm / t - lambda1).abs() })
        .collect();
    let x: Vec<f64> = rows.iter().map(|r| r.t.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.deviation.ln()).collect();
    Ok((rows, linear_fit(&x, &y)))
}

/// One time of the sup/inf comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupInfRow {
    pub t: f64,
    pub log_sup: f64,
    pub log_inf_inner: f64,
    pub log_mass: f64,
    /// `(log sup − log inf) / |log U|`.
    pub relative_spread: f64,
}

/// Logarithms of `sup u`, `inf_{Q_{t^a}} u` and `U` along one evolution.
pub fn sup_inf(spec: &BoxSpec, potential: &GridField, ic: &InitialCondition, times: &[f64], opts: &EvolveOptions) -> Result<Vec<SupInfRow>> {
    if let Some(&t) = times.last() {
        if t.powf(opts.inner_exponent) >= spec.side() {
            return Err(Error::InvalidParameter(format!("inner box side {} exceeds the box", t.powf(opts.inner_exponent))));
        }
    }
    let evo = evolve(spec, potential, ic, times, opts)?;
    Ok((0..times.len())
        .map(|i| SupInfRow {
            t: times[i],
            log_sup: evo.log_sup[i],
            log_inf_inner: evo.log_inf_inner[i],
            log_mass: evo.log_mass[i],
            relative_spread: (evo.log_sup[i] - evo.log_inf_inner[i]) / evo.log_mass[i].abs(),
        })
        .collect())
}
