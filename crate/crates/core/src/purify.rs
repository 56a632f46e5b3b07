//! Schmidt decomposition of bipartite vectors and canonical purification.

use crate::blockmat::BlockMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};

/// Default relative cutoff for Schmidt coefficients and purification weights.
pub const RANK_TOL: f64 = 1e-9;

/// `x = Σ_i λ_i e_i ⊗ f_i` with `λ` descending.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    /// `m x rank`, orthonormal columns `e_i`.
    pub left_vectors: ComplexMatrix,
    /// `n x rank`, orthonormal columns `f_i`.
    pub right_vectors: ComplexMatrix,
    pub rank: usize,
}

impl SchmidtForm {
    pub fn reconstruct(&self) -> ComplexVector {
        let (m, n) = (self.left_vectors.nrows(), self.right_vectors.nrows());
        let mut x = ComplexVector::zeros(m * n);
        for (i, &lam) in self.coefficients.iter().enumerate() {
            let e = self.left_vectors.column(i).into_owned();
            let f = self.right_vectors.column(i).into_owned();
            x += linalg::kron_vec(&e, &f).scale(lam);
        }
        x
    }
}

/// Reshape `x ∈ C^m ⊗ C^n` into its `m x n` coefficient matrix.
pub fn coefficient_matrix(x: &ComplexVector, m: usize, n: usize) -> Result<ComplexMatrix> {
    if x.len() != m * n {
        return Err(Error::DimensionMismatch {
            expected: m * n,
            found: x.len(),
        });
    }
    Ok(ComplexMatrix::from_fn(m, n, |i, k| x[i * n + k]))
}

/// `tr_2 |x><x|`.
pub fn reduced_of_vector(x: &ComplexVector, m: usize, n: usize) -> Result<ComplexMatrix> {
    let cm = coefficient_matrix(x, m, n)?;
    Ok(&cm * cm.adjoint())
}

/// `|x><x|` as a block matrix in `M_m ⊗ M_n`.
pub fn projector(x: &ComplexVector, m: usize, n: usize) -> Result<BlockMatrix> {
    if x.len() != m * n {
        return Err(Error::DimensionMismatch {
            expected: m * n,
            found: x.len(),
        });
    }
    BlockMatrix::new(m, n, linalg::outer(x, x))
}

pub fn schmidt_decompose(x: &ComplexVector, m: usize, n: usize, tol: f64) -> Result<SchmidtForm> {
    let cm = coefficient_matrix(x, m, n)?;
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    // C = U Σ V^dag  =>  x = Σ σ_r u_r ⊗ conj(v_r), and conj(v_r)^T is row r of V^dag.
    let svd = cm.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let largest = svd.singular_values[order[0]];
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&r| svd.singular_values[r] > tol * largest)
        .collect();
    let rank = kept.len();
    let coefficients = kept.iter().map(|&r| svd.singular_values[r]).collect();
    let left_vectors = ComplexMatrix::from_fn(m, rank, |i, c| u[(i, kept[c])]);
    let right_vectors = ComplexMatrix::from_fn(n, rank, |k, c| v_t[(kept[c], k)]);
    Ok(SchmidtForm {
        coefficients,
        left_vectors,
        right_vectors,
        rank,
    })
}

/// Canonical purification `Σ_i √μ_i ψ_i ⊗ ψ_i` of a PSD matrix.
///
/// Eigenpairs with `μ_i <= tol * μ_max` are dropped. Within a degenerate
/// eigenspace the basis is whatever the eigensolver returns.
pub fn purify(rho: &ComplexMatrix, tol: f64) -> Result<ComplexVector> {
    let eig = linalg::hermitian_eig(rho)?;
    if eig.min() < -tol * linalg::tol_scale(rho) {
        return Err(Error::NotPsd { min_eig: eig.min() });
    }
    if !(eig.max() > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let m = rho.nrows();
    let cutoff = tol * eig.max();
    let mut x = ComplexVector::zeros(m * m);
    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu > cutoff {
            let psi = eig.vector(k);
            x += linalg::kron_vec(&psi, &psi).scale(mu.sqrt());
        }
    }
    Ok(x)
}
