//! Dense reference eigensolver for small grids.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{finish, normalize_pairs, OperatorSpec, Spectrum};
use crate::error::{Error, Result};

/// Largest `n` eigenpairs from a full symmetric eigendecomposition (`(N-2)²` columns).
pub fn dense_eigenpairs(op: &OperatorSpec, n: usize) -> Result<Spectrum> {
    let dim = op.dim();
    if n == 0 || n > dim {
        return Err(Error::InvalidParameter(format!("requested {n} eigenpairs of a {dim}-dimensional operator")));
    }
    let mut matrix = DMatrix::zeros(dim, dim);
    let mut unit = vec![0.0; dim];
    let mut column = vec![0.0; dim];
    for j in 0..dim {
        unit[j] = 1.0;
        op.apply(&unit, &mut column);
        unit[j] = 0.0;
        for i in 0..dim {
            matrix[(i, j)] = column[i];
        }
    }
    let sym = 0.5 * (&matrix + matrix.transpose());
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let pairs = order[..n].iter().map(|&c| (eig.eigenvalues[c], eig.eigenvectors.column(c).iter().cloned().collect())).collect();
    Ok(finish(op, normalize_pairs(pairs, 1e-10), 0))
}
