//! Linear maps `M_m -> M_n` stored by their Choi matrix `Σ E_ij ⊗ Φ(E_ij)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::blockmat::{BlockMatrix, Factor};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapRep {
    choi: BlockMatrix,
}

impl LinearMapRep {
    /// The map whose Choi matrix is `choi`; input dimension `choi.m()`,
    /// output dimension `choi.n()`.
    pub fn from_choi(choi: BlockMatrix) -> Self {
        Self { choi }
    }

    /// Tabulate `f` on the matrix units of `M_m`.
    pub fn from_fn(
        m: usize,
        n: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let choi = BlockMatrix::from_blocks(m, n, |i, j| f(&linalg::matrix_unit(m, i, j)))?;
        Ok(Self { choi })
    }

    /// `X -> Σ_k K_k X K_k^dag`; every operator must be `n x m`.
    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty Kraus list".into()))?;
        let (n, m) = first.shape();
        if let Some(bad) = ops.iter().find(|k| k.shape() != (n, m)) {
            return Err(Error::ShapeMismatch(format!(
                "Kraus operator is {}x{}, expected {n}x{m}",
                bad.nrows(),
                bad.ncols()
            )));
        }
        Self::from_fn(m, n, |x| {
            ops.iter()
                .fold(ComplexMatrix::zeros(n, n), |acc, k| acc + k * x * k.adjoint())
        })
    }

    pub fn input_dim(&self) -> usize {
        self.choi.m()
    }

    pub fn output_dim(&self) -> usize {
        self.choi.n()
    }

    pub fn choi(&self) -> &BlockMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> BlockMatrix {
        self.choi
    }

    /// `Φ(X) = Σ_ij X_ij Φ(E_ij)`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (m, n) = self.choi.dims();
        if x.shape() != (m, m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: x.nrows(),
            });
        }
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..m {
            for j in 0..m {
                let coeff = x[(i, j)];
                if coeff != linalg::re(0.0) {
                    out += self.choi.full().view((i * n, j * n), (n, n)) * coeff;
                }
            }
        }
        Ok(out)
    }

    pub fn choi_min_eig(&self) -> Result<f64> {
        self.choi.min_eig()
    }

    /// Choi's criterion. A non-Hermitian Choi matrix is never CP.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.choi.is_psd(tol).unwrap_or(false)
    }

    /// `tr_2(choi) = [tr Φ(E_ij)]` equals `I_m` within `tol` (Frobenius).
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let reduced = self.choi.partial_trace(Factor::Second);
        (reduced - linalg::identity(self.input_dim())).norm() <= tol
    }

    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        linalg::hermitian_deviation(self.choi.full()) <= tol * self.choi.tol_scale()
    }

    /// `Φ ∘ τ`, whose Choi matrix is `choi^{t1}`.
    pub fn compose_with_transpose(&self) -> Self {
        Self {
            choi: self.choi.partial_transpose(Factor::First),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            choi: self.choi.scale(s),
        }
    }

    /// Divide by `tr Φ(I) / m`, which makes trace-covariant families into channels.
    pub fn normalize_tp(&self) -> Result<Self> {
        let m = self.input_dim() as f64;
        let c = self.choi.full().trace().re / m;
        if !(c.abs() > f64::EPSILON) {
            return Err(Error::ZeroMatrix);
        }
        Ok(self.scale(1.0 / c))
    }

    /// Frobenius distance between Choi matrices; `None` on dimension mismatch.
    pub fn distance(&self, other: &LinearMapRep) -> Option<f64> {
        self.choi.distance(&other.choi)
    }
}

/// The named map families.
#[derive(Debug, Clone, PartialEq)]
pub enum MapFamily {
    /// `2 A^t + diag((5-a)a22 + a a33, a a11 + (5-a)a33, (5-a)a11 + a a22)` on `M_3`.
    Phi1 { a: f64 },
    /// `2 A^t + diag(a a22 + (5-a)a33, (5-a)a11 + a a33, a a11 + (5-a)a22)` on `M_3`.
    Phi2 { a: f64 },
    /// `(m x - 1) A + (m - x) tr(A) I`.
    Phi3 { m: usize, x: f64 },
    /// `m y A^t + (1 - y) tr(A) I`.
    Phi4 { m: usize, y: f64 },
    /// `tr(A) I - A`.
    Reduction { m: usize },
    Transpose { m: usize },
    /// `tr(A) σ`.
    TraceSigma { sigma: ComplexMatrix },
}

impl MapFamily {
    pub fn build(&self) -> Result<LinearMapRep> {
        let r = linalg::re;
        match *self {
            MapFamily::Phi1 { a } => LinearMapRep::from_fn(3, 3, |x| {
                let d = [x[(0, 0)], x[(1, 1)], x[(2, 2)]];
                let mut out = x.transpose().scale(2.0);
                out[(0, 0)] += d[1] * r(5.0 - a) + d[2] * r(a);
                out[(1, 1)] += d[0] * r(a) + d[2] * r(5.0 - a);
                out[(2, 2)] += d[0] * r(5.0 - a) + d[1] * r(a);
                out
            }),
            MapFamily::Phi2 { a } => LinearMapRep::from_fn(3, 3, |x| {
                let d = [x[(0, 0)], x[(1, 1)], x[(2, 2)]];
                let mut out = x.transpose().scale(2.0);
                out[(0, 0)] += d[1] * r(a) + d[2] * r(5.0 - a);
                out[(1, 1)] += d[0] * r(5.0 - a) + d[2] * r(a);
                out[(2, 2)] += d[0] * r(a) + d[1] * r(5.0 - a);
                out
            }),
            MapFamily::Phi3 { m, x } => {
                let mf = m as f64;
                LinearMapRep::from_fn(m, m, |a| {
                    a.scale(mf * x - 1.0) + linalg::identity(m) * (a.trace() * r(mf - x))
                })
            }
            MapFamily::Phi4 { m, y } => {
                let mf = m as f64;
                LinearMapRep::from_fn(m, m, |a| {
                    a.transpose().scale(mf * y) + linalg::identity(m) * (a.trace() * r(1.0 - y))
                })
            }
            MapFamily::Reduction { m } => {
                LinearMapRep::from_fn(m, m, |a| linalg::identity(m) * a.trace() - a)
            }
            MapFamily::Transpose { m } => LinearMapRep::from_fn(m, m, |a| a.transpose()),
            MapFamily::TraceSigma { ref sigma } => {
                if sigma.nrows() != sigma.ncols() {
                    return Err(Error::NotSquare {
                        rows: sigma.nrows(),
                        cols: sigma.ncols(),
                    });
                }
                // input dimension equals the output dimension here
                let n = sigma.nrows();
                LinearMapRep::from_fn(n, n, |a| sigma * a.trace())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapFamilyKind {
    Phi1,
    Phi2,
    Phi3,
    Phi4,
    Reduction,
    Transpose,
    TraceSigma,
}

impl MapFamilyKind {
    pub const ALL: [MapFamilyKind; 7] = [
        MapFamilyKind::Phi1,
        MapFamilyKind::Phi2,
        MapFamilyKind::Phi3,
        MapFamilyKind::Phi4,
        MapFamilyKind::Reduction,
        MapFamilyKind::Transpose,
        MapFamilyKind::TraceSigma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MapFamilyKind::Phi1 => "phi1",
            MapFamilyKind::Phi2 => "phi2",
            MapFamilyKind::Phi3 => "phi3",
            MapFamilyKind::Phi4 => "phi4",
            MapFamilyKind::Reduction => "reduction",
            MapFamilyKind::Transpose => "transpose",
            MapFamilyKind::TraceSigma => "trace-sigma",
        }
    }

    /// Name of the family's real parameter, if it has one.
    pub fn param_name(self) -> Option<&'static str> {
        match self {
            MapFamilyKind::Phi1 | MapFamilyKind::Phi2 => Some("a"),
            MapFamilyKind::Phi3 => Some("x"),
            MapFamilyKind::Phi4 => Some("y"),
            _ => None,
        }
    }
}

impl fmt::Display for MapFamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapFamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        MapFamilyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == lower || (lower == "trace" && *k == MapFamilyKind::TraceSigma))
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Parameter-level description of a map family, as read from the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFamilySpec {
    pub kind: MapFamilyKind,
    pub dim: usize,
    pub params: BTreeMap<String, f64>,
}

impl MapFamilySpec {
    pub fn new(kind: MapFamilyKind, dim: usize) -> Self {
        Self {
            kind,
            dim,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    fn param(&self, name: &str) -> Result<f64> {
        let v = *self
            .params
            .get(name)
            .ok_or_else(|| Error::MissingParam(name.to_string()))?;
        if !v.is_finite() {
            return Err(Error::ParamOutOfDomain {
                name: name.to_string(),
                value: v,
                domain: "finite reals".into(),
            });
        }
        Ok(v)
    }

    /// Parameters may lie outside the positivity ranges; only the dimension
    /// and presence of parameters are validated.
    pub fn to_family(&self) -> Result<MapFamily> {
        if self.dim < 2 {
            return Err(Error::DimensionTooSmall {
                min: 2,
                got: self.dim,
            });
        }
        let m = self.dim;
        let needs_three = || {
            if m != 3 {
                Err(Error::DimensionMismatch {
                    expected: 3,
                    found: m,
                })
            } else {
                Ok(())
            }
        };
        Ok(match self.kind {
            MapFamilyKind::Phi1 => {
                needs_three()?;
                MapFamily::Phi1 { a: self.param("a")? }
            }
            MapFamilyKind::Phi2 => {
                needs_three()?;
                MapFamily::Phi2 { a: self.param("a")? }
            }
            MapFamilyKind::Phi3 => MapFamily::Phi3 {
                m,
                x: self.param("x")?,
            },
            MapFamilyKind::Phi4 => MapFamily::Phi4 {
                m,
                y: self.param("y")?,
            },
            MapFamilyKind::Reduction => MapFamily::Reduction { m },
            MapFamilyKind::Transpose => MapFamily::Transpose { m },
            MapFamilyKind::TraceSigma => MapFamily::TraceSigma {
                sigma: linalg::identity(m).scale(1.0 / m as f64),
            },
        })
    }
}

pub fn make_family(spec: &MapFamilySpec) -> Result<LinearMapRep> {
    spec.to_family()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, matrix_unit, random_ginibre, random_unitary, re, ComplexVector};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(v.len(), v.iter().map(|&x| re(x))))
    }

    fn build(f: MapFamily) -> LinearMapRep {
        f.build().unwrap()
    }

    fn flip(m: usize) -> BlockMatrix {
        BlockMatrix::from_blocks(m, m, |i, j| matrix_unit(m, j, i)).unwrap()
    }

    #[test]
    fn phi3_on_unit() {
        let phi = build(MapFamily::Phi3 { m: 3, x: -1.0 });
        let out = phi.apply(&matrix_unit(3, 0, 0)).unwrap();
        assert!((out - diag(&[0.0, 4.0, 4.0])).norm() < 1e-14);
    }

    #[test]
    fn transpose_family_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_ginibre(4, 4, &mut rng);
        let phi = build(MapFamily::Transpose { m: 4 });
        assert_eq!(phi.apply(&x).unwrap(), x.transpose());
    }

    #[test]
    fn phi4_at_zero_is_trace_times_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_ginibre(3, 3, &mut rng);
        let phi = build(MapFamily::Phi4 { m: 3, y: 0.0 });
        let expected = linalg::identity(3) * x.trace();
        assert!((phi.apply(&x).unwrap() - expected).norm() < 1e-13);
    }

    #[test]
    fn apply_rejects_wrong_shape() {
        let phi = build(MapFamily::Transpose { m: 3 });
        assert!(matches!(
            phi.apply(&linalg::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unitary_kraus_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(3, &mut rng);
        let phi = LinearMapRep::from_kraus(&[u]).unwrap();
        let eig = phi.choi().eig().unwrap();
        let rank = eig.eigenvalues.iter().filter(|&&l| l > 1e-9).count();
        assert_eq!(rank, 1);
        assert!(phi.is_trace_preserving(TOL));
        assert!(phi.is_completely_positive(TOL));
    }

    #[test]
    fn dephasing_kraus_channel() {
        let ops: Vec<_> = (0..3).map(|k| matrix_unit(3, k, k)).collect();
        let phi = LinearMapRep::from_kraus(&ops).unwrap();
        let choi = phi.choi().full();
        // Σ_i E_ii ⊗ E_ii: a diagonal 0/1 pattern
        for r in 0..9 {
            for s in 0..9 {
                let expected = if r == s && r % 4 == 0 { 1.0 } else { 0.0 };
                assert_eq!(choi[(r, s)], re(expected));
            }
        }
        assert!(phi.is_trace_preserving(TOL));
    }

    #[test]
    fn random_isometric_kraus_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // stack two 3x2 blocks of a 6x6 unitary's first two columns: K1^dag K1 + K2^dag K2 = I_2
        let w = random_unitary(6, &mut rng);
        let iso = w.columns(0, 2).into_owned();
        let k1 = iso.rows(0, 3).into_owned();
        let k2 = iso.rows(3, 3).into_owned();
        let sum = k1.adjoint() * &k1 + k2.adjoint() * &k2;
        assert!((sum - linalg::identity(2)).norm() < 1e-12);
        let phi = LinearMapRep::from_kraus(&[k1, k2]).unwrap();
        assert_eq!((phi.input_dim(), phi.output_dim()), (2, 3));
        assert!(phi.is_completely_positive(TOL));
        assert!(phi.is_trace_preserving(TOL));
    }

    #[test]
    fn kraus_shape_errors() {
        assert!(matches!(LinearMapRep::from_kraus(&[]), Err(Error::ShapeMismatch(_))));
        let r = LinearMapRep::from_kraus(&[ComplexMatrix::zeros(2, 3), ComplexMatrix::zeros(3, 3)]);
        assert!(matches!(r, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn cp_thresholds() {
        let cp = |f| build(f).is_completely_positive(TOL);
        assert!(cp(MapFamily::Phi1 { a: 3.0 }));
        assert!(!cp(MapFamily::Phi1 { a: 4.1 }));
        assert!(cp(MapFamily::Phi3 { m: 3, x: 0.1 }));
        assert!(!cp(MapFamily::Phi3 { m: 3, x: -0.1 }));
        assert!(cp(MapFamily::Phi4 { m: 3, y: 0.2 }));
        assert!(!cp(MapFamily::Phi4 { m: 3, y: 0.3 }));
    }

    #[test]
    fn trace_preservation() {
        assert!(build(MapFamily::Transpose { m: 3 }).is_trace_preserving(TOL));
        let phi3 = build(MapFamily::Phi3 { m: 3, x: 0.4 });
        assert!(!phi3.is_trace_preserving(TOL));
        // tr Φ3(A) = (m^2 - 1) tr A
        let t = phi3.apply(&linalg::identity(3)).unwrap().trace();
        assert!((t - re(24.0)).norm() < 1e-12);
        assert!(phi3.scale(1.0 / 8.0).is_trace_preserving(TOL));
        assert!(phi3.normalize_tp().unwrap().is_trace_preserving(TOL));
    }

    #[test]
    fn hermiticity_preservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = random_ginibre(2, 3, &mut rng);
        assert!(LinearMapRep::from_kraus(&[k]).unwrap().is_hermiticity_preserving(TOL));
        let bad = BlockMatrix::product(&matrix_unit(2, 0, 1), &linalg::identity(2)).unwrap();
        assert!(!LinearMapRep::from_choi(bad).is_hermiticity_preserving(TOL));
        for f in [
            MapFamily::Phi1 { a: 1.3 },
            MapFamily::Phi2 { a: 4.7 },
            MapFamily::Phi3 { m: 4, x: -0.7 },
            MapFamily::Phi4 { m: 2, y: 1.4 },
        ] {
            assert!(build(f).is_hermiticity_preserving(TOL));
        }
    }

    #[test]
    fn transpose_composition() {
        for m in [2, 3] {
            let id = build(MapFamily::Transpose { m }).compose_with_transpose();
            let expected = BlockMatrix::from_blocks(m, m, |i, j| matrix_unit(m, i, j)).unwrap();
            assert_eq!(id.choi(), &expected);
        }
        // Φ4∘τ (A) = m y A + (1 - y) tr(A) I
        let (m, y) = (3, 0.7);
        let composed = build(MapFamily::Phi4 { m, y }).compose_with_transpose();
        let direct = LinearMapRep::from_fn(m, m, |a| {
            a.scale(m as f64 * y) + linalg::identity(m) * (a.trace() * re(1.0 - y))
        })
        .unwrap();
        assert!(composed.distance(&direct).unwrap() < 1e-14);
    }

    #[test]
    fn family_reductions() {
        for m in [2, 3, 4] {
            let phi3 = build(MapFamily::Phi3 { m, x: -1.0 });
            let red = build(MapFamily::Reduction { m }).scale(m as f64 + 1.0);
            assert!(phi3.distance(&red).unwrap() < 1e-13);

            let phi4 = build(MapFamily::Phi4 { m, y: 1.0 });
            let tr = build(MapFamily::Transpose { m }).scale(m as f64);
            assert!(phi4.distance(&tr).unwrap() < 1e-13);

            // y = 1/(1-m): Φ4 = (m/(m-1)) (tr(A) I - A^t)
            let y = 1.0 / (1.0 - m as f64);
            let phi4 = build(MapFamily::Phi4 { m, y });
            let target = LinearMapRep::from_fn(m, m, |a| linalg::identity(m) * a.trace() - a.transpose())
                .unwrap()
                .scale(m as f64 / (m as f64 - 1.0));
            assert!(phi4.distance(&target).unwrap() < 1e-13);
        }
    }

    #[test]
    fn phi4_choi_spectrum() {
        for m in [2, 3, 4] {
            for y in [-0.8, -0.2, 0.1, 0.6, 1.3] {
                let phi = build(MapFamily::Phi4 { m, y });
                let mf = m as f64;
                let expected = flip(m).scale(mf * y).full() + linalg::identity(m * m).scale(1.0 - y);
                assert!((phi.choi().full() - expected).norm() < 1e-13);
                let analytic = (1.0 - (mf + 1.0) * y).min(1.0 + (mf - 1.0) * y);
                assert!((phi.choi_min_eig().unwrap() - analytic).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn phi3_choi_spectrum() {
        for m in [2, 3, 4] {
            for x in [-1.0, -0.3, 0.5, 2.0] {
                let mf = m as f64;
                let eig = build(MapFamily::Phi3 { m, x }).choi().eig().unwrap().eigenvalues;
                let single = (mf - x) + mf * (mf * x - 1.0);
                let mut expected = vec![mf - x; m * m - 1];
                expected.push(single);
                expected.sort_by(|a, b| b.total_cmp(a));
                for (got, want) in eig.iter().zip(&expected) {
                    assert!((got - want).abs() < 1e-10, "m {m} x {x}");
                }
            }
        }
    }

    #[test]
    fn trace_sigma_is_completely_contractive() {
        let sigma = diag(&[0.25, 0.75]);
        let phi = build(MapFamily::TraceSigma { sigma: sigma.clone() });
        let x = ComplexMatrix::from_row_slice(2, 2, &[re(2.0), c(0.0, 1.0), c(0.0, -1.0), re(1.0)]);
        assert!((phi.apply(&x).unwrap() - sigma.scale(3.0)).norm() < 1e-14);
        assert!(phi.is_trace_preserving(TOL));
    }

    #[test]
    fn spec_parsing_and_validation() {
        let spec = MapFamilySpec::new("PHI3".parse().unwrap(), 3).with_param("x", -0.5);
        let phi = make_family(&spec).unwrap();
        assert_eq!(phi.input_dim(), 3);
        assert!(matches!("phi9".parse::<MapFamilyKind>(), Err(Error::UnknownFamily(_))));
        let missing = MapFamilySpec::new(MapFamilyKind::Phi4, 3);
        assert!(matches!(make_family(&missing), Err(Error::MissingParam(_))));
        let wrong_dim = MapFamilySpec::new(MapFamilyKind::Phi1, 4).with_param("a", 1.0);
        assert!(make_family(&wrong_dim).is_err());
        let small = MapFamilySpec::new(MapFamilyKind::Transpose, 1);
        assert!(matches!(make_family(&small), Err(Error::DimensionTooSmall { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn choi_apply_round_trip(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let choi = BlockMatrix::new(m, n, random_ginibre(m * n, m * n, &mut rng)).unwrap();
            let phi = LinearMapRep::from_choi(choi.clone());
            let rebuilt = LinearMapRep::from_fn(m, n, |e| phi.apply(e).unwrap()).unwrap();
            prop_assert_eq!(rebuilt.choi(), &choi);
        }

        #[test]
        fn apply_is_linear(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phi = LinearMapRep::from_choi(BlockMatrix::new(3, 2, random_ginibre(6, 6, &mut rng)).unwrap());
            let x = random_ginibre(3, 3, &mut rng);
            let y = random_ginibre(3, 3, &mut rng);
            let (alpha, beta) = (c(0.3, -1.2), c(-2.0, 0.5));
            let lhs = phi.apply(&(&x * alpha + &y * beta)).unwrap();
            let rhs = phi.apply(&x).unwrap() * alpha + phi.apply(&y).unwrap() * beta;
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn kraus_maps_are_cp(seed in any::<u64>(), count in 1usize..4, m in 1usize..4, n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ops: Vec<_> = (0..count).map(|_| random_ginibre(n, m, &mut rng)).collect();
            prop_assert!(LinearMapRep::from_kraus(&ops).unwrap().is_completely_positive(1e-12));
        }

        #[test]
        fn transpose_choi_identity(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phi = LinearMapRep::from_choi(BlockMatrix::new(m, n, random_ginibre(m * n, m * n, &mut rng)).unwrap());
            let composed = phi.compose_with_transpose();
            // direct reindexing: Σ E_ij ⊗ Φ(E_ji)
            let direct = LinearMapRep::from_fn(m, n, |e| phi.apply(&e.transpose()).unwrap()).unwrap();
            prop_assert!(composed.distance(&direct).unwrap() < 1e-14);
            prop_assert_eq!(composed.compose_with_transpose(), phi);
        }
    }
}
