//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra` dynamic matrices over [`C64`]. The helpers here add
//! the Hermitian eigensolver wrapper (sorted, symmetrized input), PSD tests with
//! a norm-relative tolerance, and seeded sampling of unit vectors and unitaries.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Relative tolerance for accepting a matrix as unitary.
pub const UNITARY_TOL: f64 = 1e-8;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Matrix unit `E_ij` in `M_dim`.
pub fn matrix_unit(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(dim, dim);
    e[(i, j)] = re(1.0);
    e
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `|u><v|`
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

/// Tensor product of two vectors, first factor major.
pub fn kron_vec(u: &ComplexVector, v: &ComplexVector) -> ComplexVector {
    let n = v.len();
    ComplexVector::from_fn(u.len() * n, |idx, _| u[idx / n] * v[idx % n])
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// `max(1, ||m||_F)`, the scale all relative tolerances are measured against.
pub fn tol_scale(m: &ComplexMatrix) -> f64 {
    frobenius(m).max(1.0)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Fails unless `m` is square and Hermitian to within `HERMITIAN_TOL` relative.
pub fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    check_square(m)?;
    let deviation = hermitian_deviation(m);
    if !(deviation <= HERMITIAN_TOL * tol_scale(m)) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

pub fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl EigResult {
    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Eigenvector of the smallest eigenvalue.
    pub fn min_vector(&self) -> ComplexVector {
        self.vector(self.eigenvalues.len() - 1)
    }

    /// `sum_k f(lambda_k) v_k v_k^dag`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.eigenvectors.nrows();
        let mut out = ComplexMatrix::zeros(d, d);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let v = self.vector(k);
            out += outer(&v, &v).scale(f(lam));
        }
        out
    }
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigResult> {
    check_hermitian(h)?;
    if !is_finite(h) {
        return Err(Error::NonFinite);
    }
    let dim = h.nrows();
    let eig = symmetrize(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(dim, dim, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok(EigResult {
        eigenvalues,
        eigenvectors,
    })
}

pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(h)?.min())
}

/// `lambda_min(h) >= -tol * max(1, ||h||_F)`.
pub fn is_psd(h: &ComplexMatrix, tol: f64) -> Result<bool> {
    let lmin = min_eigenvalue(h)?;
    Ok(lmin >= -tol * tol_scale(h))
}

pub fn unitary_deviation(u: &ComplexMatrix) -> f64 {
    (u.adjoint() * u - identity(u.ncols())).norm()
}

pub fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    check_square(u)?;
    let deviation = unitary_deviation(u);
    if !(deviation <= UNITARY_TOL) {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly distributed unit vector in `C^dim` (normalized complex Gaussian).
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexVector> {
    if dim == 0 {
        return Err(Error::DimensionTooSmall { min: 1, got: 0 });
    }
    loop {
        let v = ComplexVector::from_fn(dim, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > 1e-300 {
            return Ok(v.unscale(norm));
        }
    }
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary from the phase-corrected QR of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = random_ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { re(1.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Random Hermitian `G + G^dag`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_ginibre(dim, dim, rng);
    &g + g.adjoint()
}

/// Random PSD matrix `G G^dag` of rank at most `rank`, normalized to unit trace.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_ginibre(dim, rank, rng);
    let p = &g * g.adjoint();
    let t = p.trace().re;
    p.unscale(t)
}
