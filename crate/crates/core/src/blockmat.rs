//! Elements of `M_m ⊗ M_n` viewed as `m x m` grids of `n x n` blocks.
//!
//! The full matrix is stored in the basis `e_i ⊗ f_k` with the first factor
//! major, so `block(i, j)` is the contiguous submatrix at rows `i*n..(i+1)*n`,
//! columns `j*n..(j+1)*n`, and `full = Σ E_ij ⊗ block(i, j)`. The dual view
//! `tilde_block(k, l)` collects entry `(k, l)` of every block, giving
//! `full = Σ tilde_block(k, l) ⊗ E_kl`.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, EigResult};

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    m: usize,
    n: usize,
    full: ComplexMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PptTag {
    PositivePpt,
    PositiveNppt,
    NotPositive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptClass {
    pub tag: PptTag,
    pub min_eig: f64,
    pub min_eig_pt: f64,
}

impl BlockMatrix {
    pub fn new(m: usize, n: usize, full: ComplexMatrix) -> Result<Self> {
        let d = m * n;
        if full.nrows() != d || full.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "block matrix with factors ({m}, {n}) needs {d}x{d}, got {}x{}",
                full.nrows(),
                full.ncols()
            )));
        }
        Ok(Self { m, n, full })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            full: ComplexMatrix::zeros(m * n, m * n),
        }
    }

    /// Assemble `Σ E_ij ⊗ f(i, j)`; every block must be `n x n`.
    pub fn from_blocks(
        m: usize,
        n: usize,
        mut f: impl FnMut(usize, usize) -> ComplexMatrix,
    ) -> Result<Self> {
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            for j in 0..m {
                let b = f(i, j);
                if b.shape() != (n, n) {
                    return Err(Error::ShapeMismatch(format!(
                        "block ({i}, {j}) is {}x{}, expected {n}x{n}",
                        b.nrows(),
                        b.ncols()
                    )));
                }
                out.full.view_mut((i * n, j * n), (n, n)).copy_from(&b);
            }
        }
        Ok(out)
    }

    /// `a ⊗ b` as an element of `M_m ⊗ M_n`.
    pub fn product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() || b.nrows() != b.ncols() {
            return Err(Error::ShapeMismatch("product factors must be square".into()));
        }
        Self::new(a.nrows(), b.nrows(), linalg::kron(a, b))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn full(&self) -> &ComplexMatrix {
        &self.full
    }

    pub fn into_full(self) -> ComplexMatrix {
        self.full
    }

    pub fn frobenius(&self) -> f64 {
        self.full.norm()
    }

    pub fn tol_scale(&self) -> f64 {
        linalg::tol_scale(&self.full)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: self.m,
            n: self.n,
            full: self.full.scale(s),
        }
    }

    /// Frobenius distance; `None` when the factor dimensions differ.
    pub fn distance(&self, other: &BlockMatrix) -> Option<f64> {
        (self.dims() == other.dims()).then(|| (&self.full - &other.full).norm())
    }

    pub fn eig(&self) -> Result<EigResult> {
        linalg::hermitian_eig(&self.full)
    }

    pub fn min_eig(&self) -> Result<f64> {
        linalg::min_eigenvalue(&self.full)
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        linalg::is_psd(&self.full, tol)
    }

    fn check_index(&self, i: usize, j: usize, bound: usize) -> Result<()> {
        if i >= bound || j >= bound {
            return Err(Error::IndexOutOfRange { i, j, bound });
        }
        Ok(())
    }

    /// `A_ij`, the `n x n` block at grid position `(i, j)`.
    pub fn block(&self, i: usize, j: usize) -> Result<ComplexMatrix> {
        self.check_index(i, j, self.m)?;
        let n = self.n;
        Ok(self.full.view((i * n, j * n), (n, n)).into_owned())
    }

    /// `Ã_kl`, the `m x m` matrix of entry `(k, l)` across all blocks.
    pub fn tilde_block(&self, k: usize, l: usize) -> Result<ComplexMatrix> {
        self.check_index(k, l, self.n)?;
        let n = self.n;
        Ok(ComplexMatrix::from_fn(self.m, self.m, |i, j| {
            self.full[(i * n + k, j * n + l)]
        }))
    }

    /// Trace over `traced`: `Second` gives the `m x m` matrix `[tr A_ij]`,
    /// `First` gives the `n x n` matrix `Σ_i A_ii`.
    pub fn partial_trace(&self, traced: Factor) -> ComplexMatrix {
        let (m, n) = (self.m, self.n);
        match traced {
            Factor::Second => ComplexMatrix::from_fn(m, m, |i, j| {
                (0..n).map(|k| self.full[(i * n + k, j * n + k)]).sum()
            }),
            Factor::First => ComplexMatrix::from_fn(n, n, |k, l| {
                (0..m).map(|i| self.full[(i * n + k, i * n + l)]).sum()
            }),
        }
    }

    pub fn partial_transpose(&self, side: Factor) -> BlockMatrix {
        let (m, n) = (self.m, self.n);
        let full = ComplexMatrix::from_fn(m * n, m * n, |r, col| {
            let (i, k) = (r / n, r % n);
            let (j, l) = (col / n, col % n);
            match side {
                Factor::First => self.full[(j * n + k, i * n + l)],
                Factor::Second => self.full[(i * n + l, j * n + k)],
            }
        });
        BlockMatrix { m, n, full }
    }

    pub fn transpose(&self) -> BlockMatrix {
        BlockMatrix {
            m: self.m,
            n: self.n,
            full: self.full.transpose(),
        }
    }

    pub fn adjoint(&self) -> BlockMatrix {
        BlockMatrix {
            m: self.m,
            n: self.n,
            full: self.full.adjoint(),
        }
    }

    /// `(U ⊗ I_n) A (U^dag ⊗ I_n)`.
    pub fn rotate_first(&self, u: &ComplexMatrix) -> Result<BlockMatrix> {
        if u.nrows() != self.m || u.ncols() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: u.nrows(),
            });
        }
        linalg::check_unitary(u)?;
        Ok(self.conjugate_first(u, &u.adjoint()))
    }

    /// `(left ⊗ I_n) A (right ⊗ I_n)` for arbitrary `r x m` / `m x r'` factors.
    pub(crate) fn conjugate_first(&self, left: &ComplexMatrix, right: &ComplexMatrix) -> BlockMatrix {
        let n = self.n;
        let id = linalg::identity(n);
        let full = linalg::kron(left, &id) * &self.full * linalg::kron(right, &id);
        BlockMatrix {
            m: left.nrows(),
            n,
            full,
        }
    }

    /// Sign pattern of the spectrum of `A` and `A^{t2}` against
    /// `-tol * max(1, ||A||_F)`. The `t1` transpose is never needed: for
    /// Hermitian `A`, `A^{t1}` is the full transpose of `A^{t2}`.
    pub fn ppt_classify(&self, tol: f64) -> Result<PptClass> {
        let min_eig = self.min_eig()?;
        let min_eig_pt = self.partial_transpose(Factor::Second).min_eig()?;
        let threshold = -tol * self.tol_scale();
        let tag = if min_eig < threshold {
            PptTag::NotPositive
        } else if min_eig_pt < threshold {
            PptTag::PositiveNppt
        } else {
            PptTag::PositivePpt
        };
        Ok(PptClass {
            tag,
            min_eig,
            min_eig_pt,
        })
    }

    /// View `A` in `M_r ⊗ M_n` where `r = rank(tr_2 A)`.
    ///
    /// Returns the compressed matrix and the isometry `V` (`m x r`) with
    /// `(V ⊗ I) compressed (V^dag ⊗ I) = A`. Rank counts eigenvalues of the
    /// reduced matrix above `tol * λ_max`.
    pub fn compress_support(&self, tol: f64) -> Result<(BlockMatrix, ComplexMatrix)> {
        let min_eig = self.min_eig()?;
        if min_eig < -tol * self.tol_scale() {
            return Err(Error::NotPsd { min_eig });
        }
        let reduced = self.partial_trace(Factor::Second);
        let eig = linalg::hermitian_eig(&reduced)?;
        let cutoff = tol * eig.max().max(0.0);
        let r = eig.eigenvalues.iter().filter(|&&l| l > cutoff).count();
        if r == 0 {
            return Err(Error::ZeroMatrix);
        }
        let v = eig.eigenvectors.columns(0, r).into_owned();
        let compressed = self.conjugate_first(&v.adjoint(), &v);
        Ok((compressed, v))
    }
}
