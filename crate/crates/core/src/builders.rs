//! Maps built from block matrices: the channel whose Choi-type action
//! reproduces a positive block matrix from a purification, the decomposable
//! PNCP map attached to an NPPT matrix, and the PNCP map with a block-positive
//! Choi matrix. Also separability screening and channel classification.

use crate::blockmat::{BlockMatrix, Factor, PptTag};
use crate::chanmap::LinearMapRep;
use crate::detector::apply_id_tensor;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::poscert::{self, CertifierConfig, PositivityVerdict};
use crate::purify::{self, RANK_TOL};

/// Allowed mismatch between `tr_2 |x><x|` and `tr_2 A` for a supplied purification.
pub const PURIFICATION_TOL: f64 = 1e-7;
/// Allowed deviation of `tr ρ` from one in separability screening.
pub const TRACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Lemma21Result {
    pub map: LinearMapRep,
    pub purification: ComplexVector,
    /// `||(id ⊗ Λ)|x><x| - A||_F`
    pub reconstruction_error: f64,
    /// Input-basis positions (in the purification's right Schmidt basis) where
    /// the filler block `I_n / n` was placed.
    pub completion_indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Thm31Result {
    pub map: LinearMapRep,
    /// `λ_min(choi^{t1})`: non-negative certifies `Φ = Ψ ∘ τ` with `Ψ` CP.
    pub cotranspose_choi_min_eig: f64,
    pub choi_min_eig: f64,
}

#[derive(Debug, Clone)]
pub struct Thm41Result {
    pub map: LinearMapRep,
    pub condition_report: PositivityVerdict,
    pub diag_blocks_psd: bool,
}

/// `x = Σ λ_i e_i ⊗ f_i` restricted to the support.
struct Frame {
    left: ComplexMatrix,
    right: ComplexMatrix,
    coefficients: Vec<f64>,
}

impl Frame {
    fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `Σ_i |a_i><e_i| / λ_i` for the columns `a_i` of `targets`.
    fn inverse_sqrt_into(&self, targets: &ComplexMatrix) -> ComplexMatrix {
        let m = self.left.nrows();
        let mut g = ComplexMatrix::zeros(targets.nrows(), m);
        for (i, &lam) in self.coefficients.iter().enumerate() {
            let a = targets.column(i).into_owned();
            let e = self.left.column(i).into_owned();
            g += linalg::outer(&a, &e).scale(1.0 / lam);
        }
        g
    }

    /// `I - Σ |a_i><a_i|` for the columns of `targets`.
    fn complement(targets: &ComplexMatrix) -> ComplexMatrix {
        let m = targets.nrows();
        linalg::identity(m) - targets * targets.adjoint()
    }
}

fn canonical_frame(reduced: &ComplexMatrix) -> Result<Frame> {
    let eig = linalg::hermitian_eig(reduced)?;
    if !(eig.max() > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let cutoff = RANK_TOL * eig.max();
    let r = eig.eigenvalues.iter().filter(|&&mu| mu > cutoff).count();
    let left = eig.eigenvectors.columns(0, r).into_owned();
    Ok(Frame {
        right: left.clone(),
        left,
        coefficients: eig.eigenvalues[..r].iter().map(|mu| mu.sqrt()).collect(),
    })
}

fn canonical_vector(frame: &Frame) -> ComplexVector {
    let m = frame.left.nrows();
    let mut x = ComplexVector::zeros(m * m);
    for (i, &lam) in frame.coefficients.iter().enumerate() {
        let e = frame.left.column(i).into_owned();
        let f = frame.right.column(i).into_owned();
        x += linalg::kron_vec(&e, &f).scale(lam);
    }
    x
}

fn check_psd(a: &BlockMatrix, tol: f64) -> Result<()> {
    linalg::check_hermitian(a.full())?;
    let min_eig = a.min_eig()?;
    if min_eig < -tol * a.tol_scale() {
        return Err(Error::NotPsd { min_eig });
    }
    Ok(())
}

/// Choi matrix of the map `Λ(|f_i><f_j|) = A''_ij`, completed by `I_n / n`
/// off the span of the `f_i`.
///
/// With `G = Σ_i |conj f_i><e_i| / λ_i` this is
/// `(G ⊗ I) A (G^dag ⊗ I) + (I - Σ |conj f_i><conj f_i|) ⊗ I_n / n`.
fn assemble(a: &BlockMatrix, frame: &Frame) -> BlockMatrix {
    let n = a.n();
    let targets = frame.right.map(|z| z.conj());
    let g = frame.inverse_sqrt_into(&targets);
    let main = a.conjugate_first(&g, &g.adjoint());
    let filler = linalg::kron(&Frame::complement(&targets), &linalg::identity(n).scale(1.0 / n as f64));
    BlockMatrix::new(a.m(), n, main.into_full() + filler).expect("square by construction")
}

/// Channel `Λ: M_m -> M_n` with `(id_m ⊗ Λ)|x><x| = A` for `A >= 0`.
///
/// Without `x` the canonical purification of `tr_2 A` is used. A supplied `x`
/// must have `tr_2 |x><x| = tr_2 A`; its Schmidt vectors fix the basis.
pub fn lemma21_build(a: &BlockMatrix, x: Option<&ComplexVector>, tol: f64) -> Result<Lemma21Result> {
    check_psd(a, tol)?;
    let m = a.m();
    let reduced = a.partial_trace(Factor::Second);
    let (frame, purification) = match x {
        None => {
            let frame = canonical_frame(&reduced)?;
            let x = canonical_vector(&frame);
            (frame, x)
        }
        Some(x) => {
            if x.len() != m * m {
                return Err(Error::DimensionMismatch {
                    expected: m * m,
                    found: x.len(),
                });
            }
            let deviation = (purify::reduced_of_vector(x, m, m)? - &reduced).norm();
            if deviation > PURIFICATION_TOL * linalg::tol_scale(&reduced) {
                return Err(Error::PurificationMismatch { deviation });
            }
            let form = purify::schmidt_decompose(x, m, m, RANK_TOL)?;
            let frame = Frame {
                left: form.left_vectors,
                right: form.right_vectors,
                coefficients: form.coefficients,
            };
            (frame, x.clone())
        }
    };
    let map = LinearMapRep::from_choi(assemble(a, &frame));
    let pure = purify::projector(&purification, m, m)?;
    let rebuilt = apply_id_tensor(&map, &pure)?;
    let reconstruction_error = (rebuilt.full() - a.full()).norm();
    Ok(Lemma21Result {
        map,
        purification,
        reconstruction_error,
        completion_indices: (frame.rank()..m).collect(),
    })
}

/// The canonical assembly for any Hermitian `A` whose reduced matrix
/// `tr_2 A` is PSD. For such `A` with full-rank reduced matrix the result is
/// PSD exactly when `A` is.
pub fn lemma21_assemble_hermitian(a: &BlockMatrix) -> Result<BlockMatrix> {
    linalg::check_hermitian(a.full())?;
    let reduced = a.partial_trace(Factor::Second);
    let min_eig = linalg::min_eigenvalue(&reduced)?;
    if min_eig < -RANK_TOL * linalg::tol_scale(&reduced) {
        return Err(Error::NotPsd { min_eig });
    }
    Ok(assemble(a, &canonical_frame(&reduced)?))
}

/// Trace-preserving decomposable PNCP map from an NPPT matrix `A >= 0`.
///
/// The Choi matrix is `Σ_ij |ψ_i><ψ_j| ⊗ (A''_ij)^t`, which equals
/// `(D ⊗ I) A^{t2} (D ⊗ I) + P_ker ⊗ I_n / n` with `D = A_1^{-1/2}` on the
/// support of `A_1 = tr_2 A`.
pub fn thm31_build(a: &BlockMatrix, tol: f64) -> Result<Thm31Result> {
    check_psd(a, tol)?;
    let class = a.ppt_classify(tol)?;
    if class.tag == PptTag::PositivePpt {
        return Err(Error::InputIsPpt {
            min_eig_pt: class.min_eig_pt,
        });
    }
    let n = a.n();
    let frame = canonical_frame(&a.partial_trace(Factor::Second))?;
    let d = frame.inverse_sqrt_into(&frame.left);
    let main = a.partial_transpose(Factor::Second).conjugate_first(&d, &d);
    let filler = linalg::kron(&Frame::complement(&frame.left), &linalg::identity(n).scale(1.0 / n as f64));
    let choi = BlockMatrix::new(a.m(), n, main.into_full() + filler).expect("square by construction");
    let map = LinearMapRep::from_choi(choi);
    Ok(Thm31Result {
        choi_min_eig: map.choi_min_eig()?,
        cotranspose_choi_min_eig: map.choi().partial_transpose(Factor::First).min_eig()?,
        map,
    })
}

/// The map `Ψ(E_ij) = A_ij` for a Hermitian, non-PSD, block-positive `A`.
///
/// Block-positivity is the search of the certifier, so success means no
/// violation was found rather than a proof.
pub fn thm41_build(a: &BlockMatrix, cfg: &CertifierConfig) -> Result<Thm41Result> {
    linalg::check_hermitian(a.full())?;
    let tol = cfg.violation_threshold;
    if a.is_psd(tol)? {
        return Err(Error::IsPsd);
    }
    for i in 0..a.m() {
        let block = a.block(i, i)?;
        let min_eig = linalg::min_eigenvalue(&block)?;
        if min_eig < -tol * a.tol_scale() {
            return Err(Error::DiagBlockNotPsd { index: i, min_eig });
        }
    }
    let report = poscert::block_positivity(a, cfg)?;
    if let (Some(u), Some(v)) = (&report.witness_u, &report.witness_v) {
        return Err(Error::ConditionViolated {
            witness_u: u.clone(),
            witness_v: v.clone(),
            value: report.min_value,
        });
    }
    Ok(Thm41Result {
        map: LinearMapRep::from_choi(a.clone()),
        condition_report: report,
        diag_blocks_psd: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separability {
    Separable,
    Entangled,
    Inconclusive,
}

impl Separability {
    pub fn as_str(self) -> &'static str {
        match self {
            Separability::Separable => "SEPARABLE",
            Separability::Entangled => "ENTANGLED",
            Separability::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityReport {
    pub verdict: Separability,
    /// Rank of the first reduced matrix.
    pub support_rank: usize,
    pub min_eig_pt: f64,
}

/// Separability screening of a state after compressing the first factor to
/// its support: NPPT is entangled, PPT with `r * n <= 6` is separable.
pub fn cor23_separability(rho: &BlockMatrix, tol: f64) -> Result<SeparabilityReport> {
    check_psd(rho, tol)?;
    let trace = linalg::trace(rho.full()).re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::NotNormalized { trace });
    }
    let (compressed, _) = rho.compress_support(tol)?;
    let class = compressed.ppt_classify(tol)?;
    let r = compressed.m();
    let verdict = match class.tag {
        PptTag::PositiveNppt | PptTag::NotPositive => Separability::Entangled,
        PptTag::PositivePpt if r * compressed.n() <= 6 => Separability::Separable,
        PptTag::PositivePpt => Separability::Inconclusive,
    };
    Ok(SeparabilityReport {
        verdict,
        support_rank: r,
        min_eig_pt: class.min_eig_pt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelClass {
    Unitary,
    CompletelyContractive,
    Eb,
    NotEb,
    Inconclusive,
}

impl ChannelClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelClass::Unitary => "UNITARY",
            ChannelClass::CompletelyContractive => "COMPLETELY_CONTRACTIVE",
            ChannelClass::Eb => "EB",
            ChannelClass::NotEb => "NOT_EB",
            ChannelClass::Inconclusive => "INCONCLUSIVE",
        }
    }
}

pub fn classify_channel(channel: &LinearMapRep, tol: f64) -> Result<ChannelClass> {
    let choi = channel.choi();
    if !channel.is_completely_positive(tol) {
        return Err(Error::NotCp);
    }
    if !channel.is_trace_preserving(tol * choi.tol_scale()) {
        return Err(Error::NotTp);
    }
    let (m, n) = channel.choi().dims();
    let eig = choi.eig()?;
    let rank = eig.eigenvalues.iter().filter(|&&l| l > tol * choi.tol_scale()).count();
    if rank == 1 && m == n {
        return Ok(ChannelClass::Unitary);
    }
    let sigma = channel.apply(&linalg::matrix_unit(m, 0, 0))?;
    let mut contractive = true;
    'outer: for i in 0..m {
        for j in 0..m {
            let out = channel.apply(&linalg::matrix_unit(m, i, j))?;
            let expected = if i == j { sigma.clone() } else { ComplexMatrix::zeros(n, n) };
            if (out - expected).norm() > tol * choi.tol_scale() {
                contractive = false;
                break 'outer;
            }
        }
    }
    if contractive {
        return Ok(ChannelClass::CompletelyContractive);
    }
    let class = choi.ppt_classify(tol)?;
    Ok(match class.tag {
        PptTag::PositiveNppt | PptTag::NotPositive => ChannelClass::NotEb,
        PptTag::PositivePpt if matches!((m, n), (2, 2) | (2, 3) | (3, 2)) => ChannelClass::Eb,
        PptTag::PositivePpt => ChannelClass::Inconclusive,
    })
}
