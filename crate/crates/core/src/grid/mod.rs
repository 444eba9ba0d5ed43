//! Collocated grids on the square box `[-L/2, L/2]^2` and the fields living on them.

mod extension;
mod io;
mod littlewood_paley;
mod transform;

pub use extension::{even_extension, odd_extension, TorusField};
pub use io::{read_grid_binary, write_grid_binary, write_grid_csv, GRID_MAGIC};
pub use littlewood_paley::{besov_norm, besov_norm_vector, lp_block, top_block, LpDecomposition, LpWeights};
pub use transform::{forward_transform, inverse_transform};
pub(crate) use transform::transform_2d;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Boundary flavour of a box; selects cosine or sine modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    Neumann,
    Dirichlet,
}

impl Boundary {
    pub fn parity(self) -> [Parity; 2] {
        match self {
            Boundary::Neumann => [Parity::Even; 2],
            Boundary::Dirichlet => [Parity::Odd; 2],
        }
    }
}

/// Reflection parity along one axis: cosine modes (`Even`) or sine modes (`Odd`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of a pointwise product.
    pub fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Parity after one derivative along this axis.
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Whether wavenumber `k` carries a mode on a grid with `intervals` cells.
    pub fn carries(self, k: usize, intervals: usize) -> bool {
        match self {
            Parity::Even => k <= intervals,
            Parity::Odd => k >= 1 && k < intervals,
        }
    }
}

/// Square box of side `L` sampled at `N` collocated points per axis, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    side: f64,
    points: usize,
    boundary: Boundary,
}

impl BoxSpec {
    pub fn new(side: f64, points: usize, boundary: Boundary) -> Result<Self> {
        if !(side.is_finite() && side >= 1.0) {
            return Err(Error::InvalidBox(format!("side {side} must be finite and >= 1")));
        }
        if points < 8 {
            return Err(Error::InvalidBox(format!("{points} points per axis, need at least 8")));
        }
        Ok(Self { side, points, boundary })
    }

    pub fn neumann(side: f64, points: usize) -> Result<Self> {
        Self::new(side, points, Boundary::Neumann)
    }

    pub fn dirichlet(side: f64, points: usize) -> Result<Self> {
        Self::new(side, points, Boundary::Dirichlet)
    }

    /// Same geometry with another boundary flavour.
    pub fn with_boundary(self, boundary: Boundary) -> Self {
        Self { boundary, ..self }
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of cells per axis, `N - 1`.
    pub fn intervals(&self) -> usize {
        self.points - 1
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.intervals() as f64
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical coordinate of lattice index `j` along either axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.side + j as f64 * self.spacing()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.points + j
    }

    /// Trapezoid weight of lattice index `j` along one axis (in units of the spacing).
    pub fn trapezoid_weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.intervals() {
            0.5
        } else {
            1.0
        }
    }

    /// Physical frequency `|k| / L` of wavenumber pair `k`.
    pub fn frequency(&self, k: [usize; 2]) -> f64 {
        (k[0] as f64).hypot(k[1] as f64) / self.side
    }

    /// Same box with another resolution.
    pub fn resampled(&self, points: usize) -> Result<Self> {
        Self::new(self.side, points, self.boundary)
    }
}

/// Real field sampled on the lattice of a box.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T: Real = f64> {
    spec: BoxSpec,
    parity: [Parity; 2],
    values: Vec<T>,
}

impl<T: Real> GridField<T> {
    /// Field with the box's default parity.
    pub fn from_values(spec: BoxSpec, values: Vec<T>) -> Result<Self> {
        Self::with_parity(spec, spec.boundary().parity(), values)
    }

    pub fn with_parity(spec: BoxSpec, parity: [Parity; 2], values: Vec<T>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::DimensionMismatch { expected: spec.len(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid field"));
        }
        Ok(Self { spec, parity, values })
    }

    pub(crate) fn from_parts(spec: BoxSpec, parity: [Parity; 2], values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, parity, values }
    }

    pub fn zeros(spec: BoxSpec) -> Self {
        Self::from_parts(spec, spec.boundary().parity(), vec![T::zero(); spec.len()])
    }

    pub fn constant(spec: BoxSpec, value: T) -> Self {
        Self::from_parts(spec, spec.boundary().parity(), vec![value; spec.len()])
    }

    /// Samples `f(x1, x2)` at every lattice site.
    pub fn from_fn(spec: BoxSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let n = spec.points();
        let values = (0..n * n)
            .map(|idx| T::lit(f(spec.coordinate(idx / n), spec.coordinate(idx % n))))
            .collect();
        Self::from_parts(spec, spec.boundary().parity(), values)
    }

    pub fn spec(&self) -> &BoxSpec {
        &self.spec
    }

    pub fn parity(&self) -> [Parity; 2] {
        self.parity
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.spec.index(i, j)]
    }

    /// Reinterprets the same samples with another parity.
    pub fn relabel(mut self, parity: [Parity; 2]) -> Self {
        self.parity = parity;
        self
    }

    /// Same samples on a box with another boundary flavour (parity follows the flavour).
    pub fn on_boundary(self, boundary: Boundary) -> Self {
        let spec = self.spec.with_boundary(boundary);
        Self { spec, parity: boundary.parity(), values: self.values }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_parts(self.spec, self.parity, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same_box(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_parts(self.spec, self.parity, values))
    }

    pub fn check_same_box(&self, other: &Self) -> Result<()> {
        if self.spec.side != other.spec.side || self.spec.points != other.spec.points {
            return Err(Error::BoxMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Pointwise (collocation) product; parity multiplies.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = self.zip_map(other, |a, b| a * b)?;
        out.parity = [self.parity[0].times(other.parity[0]), self.parity[1].times(other.parity[1])];
        Ok(out)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn shift(&self, c: T) -> Self {
        self.map(|v| v + c)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Trapezoid-rule integral over the box.
    pub fn integral(&self) -> f64 {
        let n = self.spec.points();
        let h = self.spec.spacing();
        let mut total = 0.0;
        for i in 0..n {
            let wi = self.spec.trapezoid_weight(i);
            let row: f64 = (0..n).map(|j| self.spec.trapezoid_weight(j) * self.at(i, j).widen()).sum();
            total += wi * row;
        }
        total * h * h
    }

    /// Trapezoid-rule `L^p` norm; `p = inf` gives the maximum modulus.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs().widen();
        }
        self.map(|v| v.abs().powf(T::lit(p))).integral().powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    /// Trapezoid-rule inner product.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        Ok(self.zip_map(other, |a, b| a * b)?.integral())
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> GridField<U> {
        GridField::from_parts(self.spec, self.parity, self.values.iter().map(|v| U::lit(v.widen())).collect())
    }
}

/// Trigonometric-basis coefficients of a grid field.
///
/// Entry `k = (k1, k2)` with `0 <= k_i <= N - 1` multiplies the orthonormal mode of the
/// field's parity; wavenumbers a parity does not carry hold zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T: Real = f64> {
    spec: BoxSpec,
    parity: [Parity; 2],
    coeffs: Vec<T>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(spec: BoxSpec, parity: [Parity; 2]) -> Self {
        Self { spec, parity, coeffs: vec![T::zero(); spec.len()] }
    }

    pub fn from_coeffs(spec: BoxSpec, parity: [Parity; 2], coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != spec.len() {
            return Err(Error::DimensionMismatch { expected: spec.len(), found: coeffs.len() });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("spectral coefficients"));
        }
        let mut out = Self { spec, parity, coeffs };
        out.clear_uncarried();
        Ok(out)
    }

    /// Single unit coefficient at `k`.
    pub fn unit(spec: BoxSpec, parity: [Parity; 2], k: [usize; 2]) -> Self {
        let mut out = Self::zeros(spec, parity);
        out.set(k, T::one());
        out.clear_uncarried();
        out
    }

    pub(crate) fn from_parts(spec: BoxSpec, parity: [Parity; 2], coeffs: Vec<T>) -> Self {
        Self { spec, parity, coeffs }
    }

    fn clear_uncarried(&mut self) {
        let m = self.spec.intervals();
        let n = self.spec.points();
        for k1 in 0..n {
            for k2 in 0..n {
                if !(self.parity[0].carries(k1, m) && self.parity[1].carries(k2, m)) {
                    self.coeffs[k1 * n + k2] = T::zero();
                }
            }
        }
    }

    pub fn spec(&self) -> &BoxSpec {
        &self.spec
    }

    pub fn parity(&self) -> [Parity; 2] {
        self.parity
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn get(&self, k: [usize; 2]) -> T {
        self.coeffs[k[0] * self.spec.points() + k[1]]
    }

    pub fn set(&mut self, k: [usize; 2], value: T) {
        let n = self.spec.points();
        self.coeffs[k[0] * n + k[1]] = value;
    }

    /// Discrete norm of mode `k` under the trapezoid rule (2 for each Nyquist cosine axis).
    pub fn mode_weight(&self, k: [usize; 2]) -> f64 {
        let m = self.spec.intervals();
        k.iter()
            .zip(self.parity)
            .map(|(&ki, p)| if p == Parity::Even && ki == m { 2.0 } else { 1.0 })
            .product()
    }

    /// Quadrature-weighted coefficient norm; equals the trapezoid `L^2` norm of the field.
    pub fn weighted_l2_norm(&self) -> f64 {
        let n = self.spec.points();
        let mut total = 0.0;
        for k1 in 0..n {
            for k2 in 0..n {
                let c = self.get([k1, k2]).widen();
                total += self.mode_weight([k1, k2]) * c * c;
            }
        }
        total.sqrt()
    }

    /// Scales each coefficient by `m(k/L)` evaluated at the frequency vector `(k1/L, k2/L)`.
    pub fn apply_multiplier(&self, m: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let n = self.spec.points();
        let side = self.spec.side();
        let mut out = self.clone();
        for k1 in 0..n {
            for k2 in 0..n {
                let c = self.get([k1, k2]);
                if c == T::zero() {
                    continue;
                }
                let factor = m([k1 as f64 / side, k2 as f64 / side]);
                if !factor.is_finite() {
                    return Err(Error::NonFinite("multiplier"));
                }
                out.set([k1, k2], c * T::lit(factor));
            }
        }
        Ok(out)
    }

    /// Coefficients of the partial derivative along `axis` (0 or 1).
    pub fn derivative(&self, axis: usize) -> Self {
        let n = self.spec.points();
        let m = self.spec.intervals();
        let mut parity = self.parity;
        parity[axis] = parity[axis].flip();
        let mut out = Self::zeros(self.spec, parity);
        let scale = std::f64::consts::PI / self.spec.side();
        for k1 in 0..n {
            for k2 in 0..n {
                let k = [k1, k2];
                if !(parity[0].carries(k1, m) && parity[1].carries(k2, m)) {
                    continue;
                }
                let factor = scale * k[axis] as f64;
                // d/dx cos = -k sin, d/dx sin = +k cos
                let sign = match self.parity[axis] {
                    Parity::Even => -1.0,
                    Parity::Odd => 1.0,
                };
                out.set(k, self.get(k) * T::lit(sign * factor));
            }
        }
        out
    }
}

/// Symbol of the Fourier multiplier `(1 - Δ/2)^{-1}`, evaluated at `k/L`.
pub fn sigma_symbol(freq: [f64; 2]) -> f64 {
    1.0 / (1.0 + 0.5 * std::f64::consts::PI.powi(2) * (freq[0] * freq[0] + freq[1] * freq[1]))
}

/// Symbol of `-Δ` at `k/L`.
pub fn neg_laplacian_symbol(freq: [f64; 2]) -> f64 {
    std::f64::consts::PI.powi(2) * (freq[0] * freq[0] + freq[1] * freq[1])
}

impl<T: Real> GridField<T> {
    /// Applies a Fourier multiplier through the field's own trigonometric basis.
    pub fn apply_multiplier(&self, m: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Ok(inverse_transform(&forward_transform(self)?.apply_multiplier(m)?))
    }

    /// Spectral partial derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> Result<Self> {
        Ok(inverse_transform(&forward_transform(self)?.derivative(axis)))
    }

    /// Spectral gradient `(∂₁f, ∂₂f)`.
    pub fn gradient(&self) -> Result<[Self; 2]> {
        let spectral = forward_transform(self)?;
        Ok([inverse_transform(&spectral.derivative(0)), inverse_transform(&spectral.derivative(1))])
    }

    /// Spectral Laplacian.
    pub fn laplacian(&self) -> Result<Self> {
        self.apply_multiplier(|f| -neg_laplacian_symbol(f))
    }
}
