//! Block LOBPCG for the largest eigenvalues of `H`, preconditioned by the exact inverse of
//! `σ − ½Δ_h` in the sine basis.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{dense_eigenpairs, dot, finish, normalize_pairs, OperatorSpec, Spectrum};
use crate::error::{Error, Result};
use crate::grid::GridField;

/// Stopping rule and block layout of the eigensolver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Target `‖Hv − λv‖₂ / ‖v‖₂` for every requested pair.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra block vectors beyond the requested count.
    pub guard: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 2000, guard: 2 }
    }
}

/// Iterations between fresh applications of `H` to the tracked block images.
const REFRESH: usize = 16;

/// Largest `n` eigenpairs from a start block seeded by the operator digest.
pub fn top_eigenpairs(op: &OperatorSpec, n: usize, opts: SolverOptions) -> Result<Spectrum> {
    top_eigenpairs_from(op, n, opts, &[])
}

/// As [`top_eigenpairs`], with the leading start vectors taken from `start` (e.g. eigenvectors
/// from a coarser run interpolated onto this grid).
pub fn top_eigenpairs_from(op: &OperatorSpec, n: usize, opts: SolverOptions, start: &[GridField]) -> Result<Spectrum> {
    if n == 0 || n > op.dim() {
        return Err(Error::InvalidParameter(format!("requested {n} eigenpairs of a {}-dimensional operator", op.dim())));
    }
    match lobpcg(op, n, opts, start) {
        Ok(spectrum) => Ok(spectrum),
        Err(err @ Error::NoConvergence { .. }) => {
            if op.spec().points() <= 64 {
                dense_eigenpairs(op, n)
            } else {
                Err(err)
            }
        }
        Err(err) => Err(err),
    }
}

struct Block {
    vecs: Vec<Vec<f64>>,
    images: Vec<Vec<f64>>,
}

impl Block {
    fn empty() -> Self {
        Self { vecs: Vec::new(), images: Vec::new() }
    }

    fn len(&self) -> usize {
        self.vecs.len()
    }

    /// Appends `v` after orthogonalising it against the block (two passes); returns false if
    /// it is numerically dependent.
    fn push_orthonormal(&mut self, mut v: Vec<f64>, mut av: Vec<f64>) -> bool {
        let original = dot(&v, &v).sqrt();
        if original == 0.0 || !original.is_finite() {
            return false;
        }
        for _ in 0..2 {
            for (q, aq) in self.vecs.iter().zip(&self.images) {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                av.iter_mut().zip(aq).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm < 1e-10 * original {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        av.iter_mut().for_each(|x| *x /= norm);
        self.vecs.push(v);
        self.images.push(av);
        true
    }
}

fn combine(basis: &[Vec<f64>], coeffs: &DMatrix<f64>, col: usize, rows: std::ops::Range<usize>) -> Vec<f64> {
    let mut out = vec![0.0; basis[0].len()];
    for r in rows {
        let c = coeffs[(r, col)];
        if c != 0.0 {
            out.iter_mut().zip(&basis[r]).for_each(|(o, b)| *o += c * b);
        }
    }
    out
}

fn apply(op: &OperatorSpec, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    op.apply(v, &mut out);
    out
}

fn lobpcg(op: &OperatorSpec, n: usize, opts: SolverOptions, start: &[GridField]) -> Result<Spectrum> {
    let dim = op.dim();
    let m = (n + opts.guard).min(dim);
    let mut rng = ChaCha8Rng::from_seed(op.digest());
    let mean_potential = op.potential().iter().sum::<f64>() / dim as f64;

    let mut x = Block::empty();
    let mut candidates: Vec<Vec<f64>> = start.iter().filter_map(|f| op.interior(f).ok()).collect();
    while x.len() < m {
        let v = if candidates.is_empty() {
            (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()
        } else {
            candidates.remove(0)
        };
        let av = apply(op, &v);
        x.push_orthonormal(v, av);
    }
    let mut p = Block::empty();
    let mut theta = vec![0.0; m];
    let mut worst = f64::INFINITY;

    for iter in 0..opts.max_iter {
        if iter > 0 && iter % REFRESH == 0 {
            x.images = x.vecs.iter().map(|v| apply(op, v)).collect();
            p.images = p.vecs.iter().map(|v| apply(op, v)).collect();
        }
        // Rayleigh–Ritz over span(X, W, P), X first so it is kept exactly
        let mut basis = Block::empty();
        for (v, av) in x.vecs.iter().zip(&x.images) {
            basis.push_orthonormal(v.clone(), av.clone());
        }
        if iter > 0 {
            let residuals: Vec<Vec<f64>> = x
                .vecs
                .iter()
                .zip(&x.images)
                .zip(&theta)
                .map(|((v, av), &t)| av.iter().zip(v).map(|(a, b)| a - t * b).collect())
                .collect();
            let norms: Vec<f64> = residuals.iter().map(|r| dot(r, r).sqrt()).collect();
            worst = norms[..n].iter().cloned().fold(0.0, f64::max);
            if worst <= opts.tol {
                let pairs: Vec<(f64, Vec<f64>)> = theta[..n].iter().cloned().zip(x.vecs[..n].iter().cloned()).collect();
                let spectrum = finish(op, normalize_pairs(pairs, opts.tol), iter);
                if spectrum.residuals.iter().all(|&r| r <= opts.tol) {
                    return Ok(spectrum);
                }
                x.images = x.vecs.iter().map(|v| apply(op, v)).collect();
                continue;
            }
            let shift = (theta[0] - mean_potential).max(1.0);
            for (r, &norm) in residuals.iter().zip(&norms) {
                if norm <= opts.tol * 1e-2 {
                    continue;
                }
                let mut w = vec![0.0; dim];
                op.precondition(r, shift, &mut w);
                let aw = apply(op, &w);
                basis.push_orthonormal(w, aw);
            }
            for (v, av) in p.vecs.iter().zip(&p.images) {
                basis.push_orthonormal(v.clone(), av.clone());
            }
        }
        let k = basis.len();
        let gram = DMatrix::from_fn(k, k, |i, j| 0.5 * (dot(&basis.vecs[i], &basis.images[j]) + dot(&basis.vecs[j], &basis.images[i])));
        let eig = SymmetricEigen::new(gram);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let coeffs = DMatrix::from_fn(k, m, |r, c| eig.eigenvectors[(r, order[c])]);
        theta = (0..m).map(|c| eig.eigenvalues[order[c]]).collect();
        let mut next_x = Block::empty();
        let mut next_p = Block::empty();
        for c in 0..m {
            next_x.vecs.push(combine(&basis.vecs, &coeffs, c, 0..k));
            next_x.images.push(combine(&basis.images, &coeffs, c, 0..k));
            if k > m {
                next_p.vecs.push(combine(&basis.vecs, &coeffs, c, m..k));
                next_p.images.push(combine(&basis.images, &coeffs, c, m..k));
            }
        }
        x = next_x;
        p = next_p;
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: worst })
}
