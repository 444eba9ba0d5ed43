//! Smooth dyadic Littlewood–Paley blocks and grid-truncated Besov norms.
//!
//! Block `-1` is the ball `|k/L| <= 1`; block `j >= 0` lives on `2^{j-1} <= |k/L| <= 2^{j+1}`.
//! Everything above the top block `J` is folded into it, so the blocks always sum to the
//! identity.

use super::transform::{forward_transform, inverse_transform};
use super::{BoxSpec, GridField, SpectralField};
use crate::error::{Error, Result};
use crate::profile::plateau;
use crate::scalar::Real;

fn ball(r: f64) -> f64 {
    plateau(r, 1.0, 2.0)
}

/// Index of the top block for a box: `max(0, floor(log2((N-1)/L)))`.
pub fn top_block(spec: &BoxSpec) -> i32 {
    let nyquist = spec.intervals() as f64 / spec.side();
    (nyquist.log2().floor() as i32).max(0)
}

/// Partition-of-unity weights for a fixed top block.
#[derive(Clone, Copy, Debug)]
pub struct LpWeights {
    top: i32,
}

impl LpWeights {
    pub fn new(spec: &BoxSpec) -> Self {
        Self { top: top_block(spec) }
    }

    pub fn top(&self) -> i32 {
        self.top
    }

    /// Weight of block `i` at frequency modulus `r = |k/L|`.
    pub fn weight(&self, i: i32, r: f64) -> f64 {
        let below = |j: i32| ball(r * 2f64.powi(-j));
        match i {
            -1 => ball(2.0 * r),
            j if j == self.top => 1.0 - below(j - 1),
            j => below(j) - below(j - 1),
        }
    }

    fn check(&self, i: i32) -> Result<()> {
        if i < -1 || i > self.top {
            return Err(Error::BlockIndex { index: i, max: self.top });
        }
        Ok(())
    }

    pub(crate) fn block_coeffs<T: Real>(&self, spectral: &SpectralField<T>, i: i32) -> SpectralField<T> {
        let spec = *spectral.spec();
        let n = spec.points();
        let mut out = spectral.clone();
        for k1 in 0..n {
            for k2 in 0..n {
                let c = spectral.get([k1, k2]);
                if c != T::zero() {
                    out.set([k1, k2], c * T::lit(self.weight(i, spec.frequency([k1, k2]))));
                }
            }
        }
        out
    }
}

/// Frequency-localised block `Δ_i f`.
pub fn lp_block<T: Real>(field: &GridField<T>, i: i32) -> Result<GridField<T>> {
    let weights = LpWeights::new(field.spec());
    weights.check(i)?;
    let spectral = forward_transform(field)?;
    Ok(inverse_transform(&weights.block_coeffs(&spectral, i)))
}

/// All blocks `Δ_{-1} f, …, Δ_J f` of one field.
#[derive(Clone, Debug)]
pub struct LpDecomposition<T: Real = f64> {
    blocks: Vec<GridField<T>>,
}

impl<T: Real> LpDecomposition<T> {
    pub fn new(field: &GridField<T>) -> Result<Self> {
        let weights = LpWeights::new(field.spec());
        let spectral = forward_transform(field)?;
        let blocks = (-1..=weights.top())
            .map(|i| inverse_transform(&weights.block_coeffs(&spectral, i)))
            .collect();
        Ok(Self { blocks })
    }

    pub fn top(&self) -> i32 {
        self.blocks.len() as i32 - 2
    }

    pub fn block(&self, i: i32) -> &GridField<T> {
        &self.blocks[(i + 1) as usize]
    }

    /// `(index, block)` pairs in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, &GridField<T>)> {
        self.blocks.iter().enumerate().map(|(n, b)| (n as i32 - 1, b))
    }

    /// Sum of the blocks `i <= upto` (the low-frequency part `S_upto f`).
    pub fn partial_sum(&self, upto: i32) -> Option<GridField<T>> {
        let mut iter = self.iter().take_while(|(i, _)| *i <= upto).map(|(_, b)| b);
        let first = iter.next()?.clone();
        Some(iter.fold(first, |acc, b| acc.add(b).expect("blocks share a box")))
    }

    pub fn reconstruct(&self) -> GridField<T> {
        self.partial_sum(self.top()).expect("at least one block")
    }
}

fn combine(norms: impl Iterator<Item = (i32, f64)>, alpha: f64, q: f64) -> f64 {
    let scaled = norms.map(|(i, n)| 2f64.powf(i as f64 * alpha) * n);
    if q.is_infinite() {
        scaled.fold(0.0, f64::max)
    } else {
        scaled.map(|a| a.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Grid-truncated Besov norm `‖(2^{iα} ‖Δ_i f‖_{L^p})_i‖_{ℓ^q}`; pass `f64::INFINITY` for
/// `p` or `q` as needed. Norms of rough fields grow with resolution.
pub fn besov_norm<T: Real>(field: &GridField<T>, alpha: f64, p: f64, q: f64) -> Result<f64> {
    let lp = LpDecomposition::new(field)?;
    Ok(combine(lp.iter().map(|(i, b)| (i, b.lp_norm(p))), alpha, q))
}

/// Besov norm of a vector field, with the pointwise Euclidean norm inside `L^p`.
pub fn besov_norm_vector<T: Real>(field: &[GridField<T>; 2], alpha: f64, p: f64, q: f64) -> Result<f64> {
    field[0].check_same_box(&field[1])?;
    let a = LpDecomposition::new(&field[0])?;
    let b = LpDecomposition::new(&field[1])?;
    let norms = a.iter().zip(b.iter()).map(|((i, x), (_, y))| {
        let modulus = x.zip_map(y, |u, v| u.hypot(v)).expect("same box");
        (i, modulus.lp_norm(p))
    });
    Ok(combine(norms, alpha, q))
}
