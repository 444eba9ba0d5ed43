//! Dirichlet Anderson Hamiltonian `H = ½Δ_h + V` on a box, its top eigenpairs, and the
//! renormalised-eigenvalue experiments.

mod dense;
mod experiments;
mod lobpcg;

pub use dense::dense_eigenpairs;
pub use experiments::{
    eigenvalue_scaling_experiment, renormalized_eigenvalues, EpsRule, RenormalizedSpectrum, Route, ScalingRow,
};
pub use lobpcg::{top_eigenpairs, top_eigenpairs_from, SolverOptions};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{transform_2d, Boundary, BoxSpec, GridField, Parity};

/// Discretisation of the Laplacian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    /// Second-order five-point stencil.
    FiniteDifference,
    /// Exact on the sine modes the grid carries.
    #[default]
    Spectral,
}

/// `u ↦ ½Δ_h u + V u` on the interior lattice sites of a Dirichlet box.
///
/// Vectors index the `(N-2)²` interior sites row-major; boundary values are zero.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    spec: BoxSpec,
    potential: Vec<f64>,
    laplacian: LaplacianKind,
    symbol: Vec<f64>,
}

/// Builds the operator; the potential may come from a Neumann field on the same lattice.
pub fn assemble(spec: &BoxSpec, potential: &GridField, laplacian: LaplacianKind) -> Result<OperatorSpec> {
    if spec.points() != potential.spec().points() || spec.side() != potential.spec().side() {
        return Err(Error::BoxMismatch);
    }
    if potential.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("potential"));
    }
    let spec = spec.with_boundary(Boundary::Dirichlet);
    let n = spec.points();
    let potential = (1..n - 1).flat_map(|i| (1..n - 1).map(move |j| (i, j))).map(|(i, j)| potential.at(i, j)).collect();
    let symbol = half_laplacian_symbol(&spec, laplacian);
    Ok(OperatorSpec { spec, potential, laplacian, symbol })
}

/// Eigenvalue of `½Δ_h` on each sine mode `k ∈ {0..N-1}²` (zero where no mode exists).
fn half_laplacian_symbol(spec: &BoxSpec, laplacian: LaplacianKind) -> Vec<f64> {
    let n = spec.points();
    let m = spec.intervals();
    let h = spec.spacing();
    let axis: Vec<f64> = (0..n)
        .map(|k| match laplacian {
            LaplacianKind::Spectral => 0.5 * (PI * k as f64 / spec.side()).powi(2),
            LaplacianKind::FiniteDifference => 2.0 / (h * h) * (PI * k as f64 / (2.0 * m as f64)).sin().powi(2),
        })
        .collect();
    let mut out = vec![0.0; n * n];
    for k1 in 1..m {
        for k2 in 1..m {
            out[k1 * n + k2] = -(axis[k1] + axis[k2]);
        }
    }
    out
}

impl OperatorSpec {
    pub fn spec(&self) -> &BoxSpec {
        &self.spec
    }

    pub fn laplacian(&self) -> LaplacianKind {
        self.laplacian
    }

    /// Number of unknowns `(N-2)²`.
    pub fn dim(&self) -> usize {
        (self.spec.points() - 2).pow(2)
    }

    /// Potential on the interior sites.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Same operator with `V + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.potential.iter_mut().for_each(|v| *v += c);
        out
    }

    fn embed(&self, interior: &[f64]) -> Vec<f64> {
        let n = self.spec.points();
        let mut full = vec![0.0; n * n];
        for i in 1..n - 1 {
            full[i * n + 1..i * n + n - 1].copy_from_slice(&interior[(i - 1) * (n - 2)..i * (n - 2)]);
        }
        full
    }

    fn extract(&self, full: &[f64], out: &mut [f64]) {
        let n = self.spec.points();
        for i in 1..n - 1 {
            out[(i - 1) * (n - 2)..i * (n - 2)].copy_from_slice(&full[i * n + 1..i * n + n - 1]);
        }
    }

    /// `u ↦ S⁻¹ diag(m) S u` for the sine transform `S`, with `m` given per sine mode.
    pub(crate) fn sine_multiplier(&self, u: &[f64], multiplier: impl Fn(f64) -> f64, out: &mut [f64]) {
        let n = self.spec.points();
        let m = self.spec.intervals() as f64;
        let norm = (2.0 / m).powi(2);
        let mut raw = transform_2d(&self.embed(u), n, [Parity::Odd; 2]);
        for (c, &s) in raw.iter_mut().zip(&self.symbol) {
            *c *= norm * multiplier(s);
        }
        self.extract(&transform_2d(&raw, n, [Parity::Odd; 2]), out);
    }

    fn apply_laplacian(&self, u: &[f64], out: &mut [f64]) {
        match self.laplacian {
            LaplacianKind::Spectral => self.sine_multiplier(u, |s| s, out),
            LaplacianKind::FiniteDifference => {
                let w = self.spec.points() - 2;
                let scale = 0.5 / self.spec.spacing().powi(2);
                for i in 0..w {
                    for j in 0..w {
                        let at = |a: isize, b: isize| {
                            if a < 0 || b < 0 || a >= w as isize || b >= w as isize {
                                0.0
                            } else {
                                u[a as usize * w + b as usize]
                            }
                        };
                        let (a, b) = (i as isize, j as isize);
                        out[i * w + j] =
                            scale * (at(a - 1, b) + at(a + 1, b) + at(a, b - 1) + at(a, b + 1) - 4.0 * u[i * w + j]);
                    }
                }
            }
        }
    }

    /// `out = H u` on interior vectors.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        self.apply_laplacian(u, out);
        for ((o, &x), &v) in out.iter_mut().zip(u).zip(&self.potential) {
            *o += v * x;
        }
    }

    /// `(σ − ½Δ_h)⁻¹ r`, exact through the sine transform.
    pub(crate) fn precondition(&self, r: &[f64], shift: f64, out: &mut [f64]) {
        self.sine_multiplier(r, |s| 1.0 / (shift - s), out);
    }

    /// `H` applied to a Dirichlet grid field (boundary values ignored, output zero there).
    pub fn apply_field(&self, u: &GridField) -> Result<GridField> {
        let interior = self.interior(u)?;
        let mut out = vec![0.0; self.dim()];
        self.apply(&interior, &mut out);
        Ok(self.field(&out))
    }

    /// Interior values of a field on this box.
    pub fn interior(&self, u: &GridField) -> Result<Vec<f64>> {
        if u.spec().points() != self.spec.points() || u.spec().side() != self.spec.side() {
            return Err(Error::BoxMismatch);
        }
        let mut out = vec![0.0; self.dim()];
        self.extract(u.values(), &mut out);
        Ok(out)
    }

    /// Dirichlet field with the given interior values.
    pub fn field(&self, interior: &[f64]) -> GridField {
        GridField::from_values(self.spec, self.embed(interior)).expect("interior vector has the operator's size")
    }

    /// SHA-256 of the lattice, Laplacian kind and potential bits.
    pub fn digest(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update((self.spec.points() as u64).to_le_bytes());
        hasher.update(self.spec.side().to_le_bytes());
        hasher.update([self.laplacian as u8]);
        for v in &self.potential {
            hasher.update(v.to_le_bytes());
        }
        hasher.finalize().into()
    }
}

/// Descending eigenvalues with grid-`L²`-normalised eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<GridField>,
    /// `‖Hv − λv‖₂ / ‖v‖₂` per pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl Spectrum {
    /// Same spectrum with every eigenvalue moved by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.eigenvalues.iter_mut().for_each(|v| *v += c);
        out
    }
}

/// Sign so the first component above roundoff is positive, then order by eigenvalue
/// (descending) breaking near-ties by lexicographic comparison of the vectors.
pub(crate) fn normalize_pairs(mut pairs: Vec<(f64, Vec<f64>)>, tie_tol: f64) -> Vec<(f64, Vec<f64>)> {
    for (_, v) in pairs.iter_mut() {
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * scale) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let lexicographic = |a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)| {
        b.1.iter().zip(&a.1).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    };
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end - 1].0 - pairs[end].0).abs() <= tie_tol * pairs[start].0.abs().max(1.0) {
            end += 1;
        }
        pairs[start..end].sort_by(lexicographic);
        start = end;
    }
    pairs
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Packs normalised interior eigenvectors into a [`Spectrum`], recomputing residuals.
pub(crate) fn finish(op: &OperatorSpec, pairs: Vec<(f64, Vec<f64>)>, iterations: usize) -> Spectrum {
    let h2 = op.spec.spacing().powi(2);
    let mut eigenvalues = Vec::with_capacity(pairs.len());
    let mut eigenvectors = Vec::with_capacity(pairs.len());
    let mut residuals = Vec::with_capacity(pairs.len());
    let mut hv = vec![0.0; op.dim()];
    for (lambda, mut v) in pairs {
        let norm = dot(&v, &v).sqrt();
        op.apply(&v, &mut hv);
        let res = hv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt() / norm;
        let scale = 1.0 / (norm * h2.sqrt());
        v.iter_mut().for_each(|x| *x *= scale);
        eigenvalues.push(lambda);
        eigenvectors.push(op.field(&v));
        residuals.push(res);
    }
    Spectrum { eigenvalues, eigenvectors, residuals, iterations }
}
