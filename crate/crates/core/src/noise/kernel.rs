//! Separable convolution mollifier `ψ(x) = φ(x₁)φ(x₂)` built from the normalised bump, and
//! the exact covariance of the mollified noise in the cosine basis.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::profile::bump;
use crate::quadrature::GaussLegendre;

const PANELS: usize = 128;
const PANEL_NODES: usize = 16;
const INNER_NODES: usize = 96;

/// Tabulated autocorrelation `g = φ ∗ φ̌` of the normalised bump `φ`.
///
/// `g` is even, supported in `[-1, 1]` and has unit mass, so every covariance reduces to
/// one-dimensional integrals of `g` against trigonometric functions on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct ConvolutionKernel {
    mass: f64,
    curvature_l1: f64,
    rule: GaussLegendre,
    autocorr: Vec<f64>,
}

impl ConvolutionKernel {
    /// Process-wide instance; construction costs a few hundred thousand bump evaluations.
    pub fn standard() -> &'static Self {
        static KERNEL: OnceLock<ConvolutionKernel> = OnceLock::new();
        KERNEL.get_or_init(Self::build)
    }

    fn build() -> Self {
        let unit = GaussLegendre::composite(32, PANEL_NODES, -0.5, 0.5);
        let mass = unit.integrate(bump);
        let curvature_l1 = unit.integrate(|x| bump_second_derivative(x).abs()) / mass;
        let rule = GaussLegendre::composite(PANELS, PANEL_NODES, 0.0, 1.0);
        let autocorr = rule.nodes.iter().map(|&s| raw_autocorrelation(s, mass)).collect();
        Self { mass, curvature_l1, rule, autocorr }
    }

    /// Normalised bump `φ(x)`, unit integral, support `(-1/2, 1/2)`.
    pub fn density(&self, x: f64) -> f64 {
        bump(x) / self.mass
    }

    /// `g(s) = ∫ φ(x) φ(x - s) dx` by direct quadrature.
    pub fn autocorrelation(&self, s: f64) -> f64 {
        raw_autocorrelation(s.abs(), self.mass)
    }

    /// `ρ(x) = 2 ∫₀¹ g(s) cos(xs) ds = |φ̂(x)|²`.
    pub fn rho(&self, x: f64) -> f64 {
        2.0 * self.moment(|s| (x * s).cos())
    }

    /// Constant `B` with `ρ(x) <= B / x⁴`, from `|φ̂(x)| <= ‖φ''‖₁ / x²`.
    pub fn rho_decay_constant(&self) -> f64 {
        self.curvature_l1 * self.curvature_l1
    }

    fn moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.rule.nodes.iter().zip(&self.rule.weights).zip(&self.autocorr).map(|((&s, &w), &g)| w * g * f(s)).sum()
    }

    /// Kernel scale on the `[0, π]` reference interval: `a = πε/L`.
    fn reference_scale(eps: f64, side: f64) -> Result<f64> {
        if !(eps > 0.0 && eps <= side) {
            return Err(Error::InvalidParameter(format!("convolution scale {eps} must lie in (0, L = {side}]")));
        }
        Ok(PI * eps / side)
    }

    /// `E[⟨ξ_ε, n_k⟩⟨ξ_ε, n_l⟩]` for one axis, cosine modes `k, l` of the interval of length `side`.
    pub fn line_entry(&self, k: usize, l: usize, eps: f64, side: f64) -> Result<f64> {
        let a = Self::reference_scale(eps, side)?;
        let sine = |m: usize| self.moment(|s| (m as f64 * a * s).sin());
        Ok(self.line_entry_from(k, l, a, &sine))
    }

    fn line_entry_from(&self, k: usize, l: usize, a: f64, sine: &dyn Fn(usize) -> f64) -> f64 {
        if (k + l) % 2 == 1 {
            return 0.0;
        }
        let integral = if k == l {
            let kf = k as f64;
            let bulk = self.moment(|s| (PI - a * s) * (kf * a * s).cos());
            if k == 0 {
                2.0 * bulk
            } else {
                bulk - sine(k) / kf
            }
        } else {
            let (kf, lf) = (k as f64, l as f64);
            let (tk, tl) = (sine(k), sine(l));
            (tl - tk) / (kf - lf) - (tl + tk) / (kf + lf)
        };
        2.0 / PI * mode_norm(k) * mode_norm(l) * integral
    }

    /// Full one-axis covariance over modes `0..=modes - 1`.
    pub fn line_covariance(&self, modes: usize, eps: f64, side: f64) -> Result<DMatrix<f64>> {
        let a = Self::reference_scale(eps, side)?;
        let table: Vec<f64> = (0..modes).map(|m| self.moment(|s| (m as f64 * a * s).sin())).collect();
        let sine = |m: usize| table[m];
        let mut out = DMatrix::zeros(modes, modes);
        for k in 0..modes {
            for l in k..modes {
                let v = self.line_entry_from(k, l, a, &sine);
                out[(k, l)] = v;
                out[(l, k)] = v;
            }
        }
        Ok(out)
    }

    /// Tensor covariance `F(k, l) = A(k₁, l₁) A(k₂, l₂)`.
    pub fn covariance(&self, k: [usize; 2], l: [usize; 2], eps: f64, side: f64) -> Result<f64> {
        Ok(self.line_entry(k[0], l[0], eps, side)? * self.line_entry(k[1], l[1], eps, side)?)
    }
}

/// `ν_k`: `1/√2` for the constant mode, 1 otherwise.
fn mode_norm(k: usize) -> f64 {
    if k == 0 {
        std::f64::consts::FRAC_1_SQRT_2
    } else {
        1.0
    }
}

fn raw_autocorrelation(s: f64, mass: f64) -> f64 {
    if s >= 1.0 {
        return 0.0;
    }
    let rule = GaussLegendre::new(INNER_NODES, s - 0.5, 0.5);
    rule.integrate(|x| bump(x) * bump(x - s)) / (mass * mass)
}

fn bump_second_derivative(x: f64) -> f64 {
    let u = 1.0 - 4.0 * x * x;
    if u <= 0.0 {
        return 0.0;
    }
    let b = (-1.0 / u).exp();
    b * (64.0 * x * x / u.powi(4) - 8.0 / u.powi(2) - 128.0 * x * x / u.powi(3))
}

/// Symmetric positive semidefinite square root, computed per parity class.
///
/// Entries coupling modes of different parity vanish, so the even and odd index sets are
/// decomposed independently; negative roundoff eigenvalues are clamped to zero.
pub fn parity_blocked_sqrt(cov: &DMatrix<f64>) -> DMatrix<f64> {
    let n = cov.nrows();
    let mut out = DMatrix::zeros(n, n);
    for start in 0..2 {
        let idx: Vec<usize> = (start..n).step_by(2).collect();
        if idx.is_empty() {
            continue;
        }
        let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| cov[(idx[i], idx[j])]);
        let eig = SymmetricEigen::new(block);
        let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let root = &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose();
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                out[(gi, gj)] = root[(i, j)];
            }
        }
    }
    out
}
