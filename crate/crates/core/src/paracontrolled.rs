//! Bony decomposition of products into paraproducts and the resonant product, and the
//! renormalised square of `∇Z`.
//!
//! Every product of band-limited blocks is formed on a grid with twice as many intervals, where
//! it is represented without aliasing, and then projected back onto the retained modes. The
//! three Bony pieces therefore always sum to the dealiased product `Π(u·v)`.

use crate::error::Result;
use crate::grid::{forward_transform, inverse_transform, BoxSpec, GridField, LpWeights, Parity, SpectralField};
use crate::scalar::Real;

/// `u ⋖ v` (low frequencies of `u` times high of `v`), `u ⊙ v` and `u ⋗ v`.
#[derive(Clone, Debug)]
pub struct ProductTriple<T: Real = f64> {
    pub para_lt: GridField<T>,
    pub resonance: GridField<T>,
    pub para_gt: GridField<T>,
}

impl<T: Real> ProductTriple<T> {
    pub fn sum(&self) -> GridField<T> {
        let values = self
            .para_lt
            .values()
            .iter()
            .zip(self.resonance.values())
            .zip(self.para_gt.values())
            .map(|((&a, &b), &c)| a + b + c)
            .collect();
        GridField::from_parts(*self.para_lt.spec(), self.para_lt.parity(), values)
    }
}

fn product_parity(u: [Parity; 2], v: [Parity; 2]) -> [Parity; 2] {
    [u[0].times(v[0]), u[1].times(v[1])]
}

/// Grid with twice the intervals of `spec`; products of retained modes are exact on it.
fn doubled(spec: &BoxSpec) -> Result<BoxSpec> {
    spec.resampled(2 * spec.intervals() + 1)
}

/// Places coarse coefficients into a finer box of the same side (zero padding).
fn pad<T: Real>(coarse: &SpectralField<T>, fine: &BoxSpec) -> SpectralField<T> {
    let n = coarse.spec().points();
    let nf = fine.points();
    let mut coeffs = vec![T::zero(); fine.len()];
    for k1 in 0..n {
        coeffs[k1 * nf..k1 * nf + n].copy_from_slice(&coarse.coeffs()[k1 * n..(k1 + 1) * n]);
    }
    SpectralField::from_parts(*fine, coarse.parity(), coeffs)
}

/// Keeps the modes a coarser box carries.
fn truncate<T: Real>(fine: &GridField<T>, coarse: &BoxSpec) -> Result<GridField<T>> {
    let spectral = forward_transform(fine)?;
    let nf = fine.spec().points();
    let n = coarse.points();
    let mut coeffs = vec![T::zero(); coarse.len()];
    for k1 in 0..n {
        coeffs[k1 * n..(k1 + 1) * n].copy_from_slice(&spectral.coeffs()[k1 * nf..k1 * nf + n]);
    }
    Ok(inverse_transform(&SpectralField::from_coeffs(*coarse, fine.parity(), coeffs)?))
}

/// Trigonometric interpolation of `field` onto a box with `points` lattice points per axis.
pub fn refine<T: Real>(field: &GridField<T>, points: usize) -> Result<GridField<T>> {
    let fine = field.spec().resampled(points)?;
    if points >= field.spec().points() {
        Ok(inverse_transform(&pad(&forward_transform(field)?, &fine)))
    } else {
        truncate(field, &fine)
    }
}

/// `Π(u·v)`: the product of `u` and `v` projected onto the retained modes.
pub fn dealiased_product<T: Real>(u: &GridField<T>, v: &GridField<T>) -> Result<GridField<T>> {
    u.check_same_box(v)?;
    let fine = doubled(u.spec())?;
    let uf = inverse_transform(&pad(&forward_transform(u)?, &fine));
    let vf = inverse_transform(&pad(&forward_transform(v)?, &fine));
    truncate(&uf.mul(&vf)?, u.spec())
}

/// Littlewood–Paley blocks of a field, interpolated onto the doubled grid.
struct FineBlocks<T: Real> {
    blocks: Vec<Vec<T>>,
}

impl<T: Real> FineBlocks<T> {
    fn new(field: &GridField<T>, fine: &BoxSpec) -> Result<Self> {
        let weights = LpWeights::new(field.spec());
        let spectral = forward_transform(field)?;
        let blocks = (-1..=weights.top())
            .map(|i| inverse_transform(&pad(&weights.block_coeffs(&spectral, i), fine)).into_values())
            .collect();
        Ok(Self { blocks })
    }

    /// Block `i`, indices counted from `-1`.
    fn get(&self, i: i32) -> Option<&[T]> {
        usize::try_from(i + 1).ok().and_then(|n| self.blocks.get(n)).map(Vec::as_slice)
    }

    /// Running sums `S_{i-2} = Σ_{j <= i-2} Δ_j` for each `i` from `-1`.
    fn low_parts(&self) -> Vec<Vec<T>> {
        let len = self.blocks[0].len();
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut acc = vec![T::zero(); len];
        for n in 0..self.blocks.len() {
            out.push(acc.clone());
            // entry n is the sum of blocks[..n - 1]
            if n >= 1 {
                for (a, &b) in acc.iter_mut().zip(&self.blocks[n - 1]) {
                    *a = *a + b;
                }
            }
        }
        out
    }
}

fn accumulate_products<T: Real>(acc: &mut [T], a: &[T], b: &[T]) {
    for ((s, &x), &y) in acc.iter_mut().zip(a).zip(b) {
        *s = *s + x * y;
    }
}

/// `Σ_i Δ_i u · S_{i-2} v`, on the doubled grid.
fn para_fine<T: Real>(high: &FineBlocks<T>, low: &FineBlocks<T>) -> Vec<T> {
    let mut acc = vec![T::zero(); high.blocks[0].len()];
    for (block, low_part) in high.blocks.iter().zip(low.low_parts()) {
        accumulate_products(&mut acc, block, &low_part);
    }
    acc
}

/// `Σ_{|i-j|<=1} Δ_i u · Δ_j v`, accumulated so that swapping `u` and `v` is bitwise exact.
fn resonance_fine<T: Real>(u: &FineBlocks<T>, v: &FineBlocks<T>) -> Vec<T> {
    let len = u.blocks[0].len();
    let mut acc = vec![T::zero(); len];
    let top = u.blocks.len() as i32 - 2;
    for i in -1..=top {
        let (ui, vi) = (u.get(i).expect("block"), v.get(i).expect("block"));
        match (u.get(i + 1), v.get(i + 1)) {
            (Some(un), Some(vn)) => {
                for p in 0..len {
                    acc[p] = acc[p] + ui[p] * vi[p] + (ui[p] * vn[p] + un[p] * vi[p]);
                }
            }
            _ => accumulate_products(&mut acc, ui, vi),
        }
    }
    acc
}

struct Prepared<T: Real> {
    fine: BoxSpec,
    parity: [Parity; 2],
    u: FineBlocks<T>,
    v: FineBlocks<T>,
}

impl<T: Real> Prepared<T> {
    fn new(u: &GridField<T>, v: &GridField<T>) -> Result<Self> {
        u.check_same_box(v)?;
        let fine = doubled(u.spec())?;
        Ok(Self {
            fine,
            parity: product_parity(u.parity(), v.parity()),
            u: FineBlocks::new(u, &fine)?,
            v: FineBlocks::new(v, &fine)?,
        })
    }

    fn project(&self, values: Vec<T>, coarse: &BoxSpec) -> Result<GridField<T>> {
        truncate(&GridField::from_parts(self.fine, self.parity, values), coarse)
    }
}

/// Bony decomposition with the `i <= j - 2` paraproduct convention.
pub fn paraproduct<T: Real>(u: &GridField<T>, v: &GridField<T>) -> Result<ProductTriple<T>> {
    let prep = Prepared::new(u, v)?;
    let coarse = u.spec();
    Ok(ProductTriple {
        para_lt: prep.project(para_fine(&prep.v, &prep.u), coarse)?,
        resonance: prep.project(resonance_fine(&prep.u, &prep.v), coarse)?,
        para_gt: prep.project(para_fine(&prep.u, &prep.v), coarse)?,
    })
}

/// `u ⋖ v = Σ_j S_{j-2}u · Δ_j v`.
pub fn para_lt<T: Real>(u: &GridField<T>, v: &GridField<T>) -> Result<GridField<T>> {
    let prep = Prepared::new(u, v)?;
    prep.project(para_fine(&prep.v, &prep.u), u.spec())
}

/// `u ⊙ v = Σ_{|i-j|<=1} Δ_i u · Δ_j v`.
pub fn resonance<T: Real>(u: &GridField<T>, v: &GridField<T>) -> Result<GridField<T>> {
    let prep = Prepared::new(u, v)?;
    prep.project(resonance_fine(&prep.u, &prep.v), u.spec())
}

/// Renormalised square `½|∇Z|^{⋄2} = ∇Z ⋖ ∇Z − (1 − ¼Δ)(Z ⊙ Z) + Θ` with its summands.
#[derive(Clone, Debug)]
pub struct WickSquare<T: Real = f64> {
    pub value: GridField<T>,
    /// `∇Z ⋖ ∇Z`, summed over both components.
    pub para: GridField<T>,
    /// `(1 − ¼Δ)(Z ⊙ Z)`.
    pub resonance_term: GridField<T>,
    pub theta: GridField<T>,
}

/// Assembles the renormalised square of `∇Z` from `Z` and the enhancement `Θ`.
pub fn wick_square_grad_z<T: Real>(z: &GridField<T>, theta: &GridField<T>) -> Result<WickSquare<T>> {
    z.check_same_box(theta)?;
    let [d1, d2] = z.gradient()?;
    let para = para_lt(&d1, &d1)?.add(&para_lt(&d2, &d2)?)?;
    let zz = resonance(z, z)?;
    let resonance_term = zz.apply_multiplier(|f| 1.0 + 0.25 * crate::grid::neg_laplacian_symbol(f))?;
    let value = para.sub(&resonance_term)?.add(theta)?;
    Ok(WickSquare { value, para, resonance_term, theta: theta.clone() })
}

/// `½|∇f|²` formed with dealiased products.
pub fn half_grad_squared<T: Real>(field: &GridField<T>) -> Result<GridField<T>> {
    let [d1, d2] = field.gradient()?;
    Ok(dealiased_product(&d1, &d1)?.add(&dealiased_product(&d2, &d2)?)?.scale(T::lit(0.5)))
}
