//! Parametrized bipartite states and operators with known separability ranges.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::blockmat::{BlockMatrix, PptTag};
use crate::error::{Error, Result};
use crate::linalg::{self, re, ComplexMatrix};

/// Tolerance used when a classification falls back to the PPT test.
pub const PPT_TOL: f64 = 1e-9;

/// Flip operator `F = Σ E_ij ⊗ E_ji` on `C^m ⊗ C^m`.
pub fn flip(m: usize) -> BlockMatrix {
    BlockMatrix::from_blocks(m, m, |i, j| linalg::matrix_unit(m, j, i)).expect("square blocks")
}

/// `P+ = (1/m) Σ E_ij ⊗ E_ij`.
pub fn max_ent_projector(m: usize) -> BlockMatrix {
    BlockMatrix::from_blocks(m, m, |i, j| linalg::matrix_unit(m, i, j).scale(1.0 / m as f64))
        .expect("square blocks")
}

/// The 3 ⊗ 3 Horodecki state `ρ(a)`.
pub fn horodecki(a: f64) -> BlockMatrix {
    let diag = |i: usize| -> [f64; 3] {
        match i {
            0 => [2.0, a, 5.0 - a],
            1 => [5.0 - a, 2.0, a],
            _ => [a, 5.0 - a, 2.0],
        }
    };
    BlockMatrix::from_blocks(3, 3, |i, j| {
        let mut b = if i == j {
            let d = diag(i);
            ComplexMatrix::from_fn(3, 3, |r, c| if r == c { re(d[r]) } else { re(0.0) })
        } else {
            linalg::matrix_unit(3, i, j).scale(2.0)
        };
        b.unscale_mut(21.0);
        b
    })
    .expect("square blocks")
}

/// `ω = ((m - x) I ⊗ I + (m x - 1) F) / (m^3 - m)`.
pub fn werner(m: usize, x: f64) -> BlockMatrix {
    let mf = m as f64;
    let denom = mf * mf * mf - mf;
    let id = linalg::identity(m * m).scale((mf - x) / denom);
    BlockMatrix::new(m, m, id + flip(m).full().scale((mf * x - 1.0) / denom)).expect("shape")
}

/// `ς = (1 - y)/m^2 I ⊗ I + y P+`.
pub fn isotropic(m: usize, y: f64) -> BlockMatrix {
    let mf = m as f64;
    let id = linalg::identity(m * m).scale((1.0 - y) / (mf * mf));
    BlockMatrix::new(m, m, id + max_ent_projector(m).full().scale(y)).expect("shape")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateFamilyKind {
    Horodecki,
    Werner,
    Isotropic,
    Flip,
    MaxEnt,
    ClassicalQuantum,
    Product,
}

impl StateFamilyKind {
    pub const ALL: [StateFamilyKind; 7] = [
        StateFamilyKind::Horodecki,
        StateFamilyKind::Werner,
        StateFamilyKind::Isotropic,
        StateFamilyKind::Flip,
        StateFamilyKind::MaxEnt,
        StateFamilyKind::ClassicalQuantum,
        StateFamilyKind::Product,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StateFamilyKind::Horodecki => "horodecki",
            StateFamilyKind::Werner => "werner",
            StateFamilyKind::Isotropic => "isotropic",
            StateFamilyKind::Flip => "flip",
            StateFamilyKind::MaxEnt => "maxent",
            StateFamilyKind::ClassicalQuantum => "cq",
            StateFamilyKind::Product => "product",
        }
    }

    pub fn param_name(self) -> Option<&'static str> {
        match self {
            StateFamilyKind::Horodecki => Some("a"),
            StateFamilyKind::Werner => Some("x"),
            StateFamilyKind::Isotropic => Some("y"),
            _ => None,
        }
    }
}

impl fmt::Display for StateFamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateFamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase().replace(['-', '_'], "");
        StateFamilyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == lower)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateFamilySpec {
    pub kind: StateFamilyKind,
    /// First-factor dimension `m`; ignored for Horodecki (always 3) and for
    /// families defined by `components`.
    pub dim: usize,
    pub params: BTreeMap<String, f64>,
    /// `CQ`: `(p_i, σ_i)` with the `i`-th weight on `|i><i|`.
    /// `PRODUCT`: exactly two entries `(_, ρ_1)`, `(_, ρ_2)`; weights ignored.
    pub components: Vec<(f64, ComplexMatrix)>,
}

impl StateFamilySpec {
    pub fn new(kind: StateFamilyKind, dim: usize) -> Self {
        Self {
            kind,
            dim,
            params: BTreeMap::new(),
            components: Vec::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_components(mut self, components: Vec<(f64, ComplexMatrix)>) -> Self {
        self.components = components;
        self
    }

    pub fn horodecki(a: f64) -> Self {
        Self::new(StateFamilyKind::Horodecki, 3).with_param("a", a)
    }

    pub fn werner(m: usize, x: f64) -> Self {
        Self::new(StateFamilyKind::Werner, m).with_param("x", x)
    }

    pub fn isotropic(m: usize, y: f64) -> Self {
        Self::new(StateFamilyKind::Isotropic, m).with_param("y", y)
    }

    fn param(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingParam(name.to_string()))
    }

    fn ranged(&self, name: &str, lo: f64, hi: f64, domain: String) -> Result<f64> {
        let v = self.param(name)?;
        if !(lo..=hi).contains(&v) {
            return Err(Error::ParamOutOfDomain {
                name: name.to_string(),
                value: v,
                domain,
            });
        }
        Ok(v)
    }

    fn check_dim(&self) -> Result<usize> {
        if self.dim < 2 {
            return Err(Error::DimensionTooSmall {
                min: 2,
                got: self.dim,
            });
        }
        Ok(self.dim)
    }

    pub fn horodecki_param(&self) -> Result<f64> {
        self.ranged("a", 0.0, 5.0, "[0, 5]".into())
    }

    pub fn werner_param(&self) -> Result<f64> {
        self.ranged("x", -1.0, 1.0, "[-1, 1]".into())
    }

    pub fn isotropic_param(&self) -> Result<f64> {
        let m = self.check_dim()? as f64;
        let lo = -1.0 / (m * m - 1.0);
        self.ranged("y", lo, 1.0, format!("[-1/(m^2-1), 1] = [{lo}, 1]"))
    }
}

fn check_density(rho: &ComplexMatrix, what: &str) -> Result<()> {
    linalg::check_hermitian(rho)?;
    let min_eig = linalg::min_eigenvalue(rho)?;
    if min_eig < -1e-10 {
        return Err(Error::NotPsd { min_eig });
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > 1e-10 {
        return Err(Error::ShapeMismatch(format!("{what} has trace {trace}, expected 1")));
    }
    Ok(())
}

pub fn make_state(spec: &StateFamilySpec) -> Result<BlockMatrix> {
    match spec.kind {
        StateFamilyKind::Horodecki => Ok(horodecki(spec.horodecki_param()?)),
        StateFamilyKind::Werner => {
            let m = spec.check_dim()?;
            Ok(werner(m, spec.werner_param()?))
        }
        StateFamilyKind::Isotropic => {
            let m = spec.check_dim()?;
            Ok(isotropic(m, spec.isotropic_param()?))
        }
        StateFamilyKind::Flip => Ok(flip(spec.check_dim()?)),
        StateFamilyKind::MaxEnt => Ok(max_ent_projector(spec.check_dim()?)),
        StateFamilyKind::ClassicalQuantum => {
            let comps = &spec.components;
            let first = comps
                .first()
                .ok_or_else(|| Error::MissingParam("components".into()))?;
            let n = first.1.nrows();
            let m = comps.len();
            let total: f64 = comps.iter().map(|(p, _)| p).sum();
            if comps.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > 1e-10 {
                return Err(Error::ParamOutOfDomain {
                    name: "p".into(),
                    value: total,
                    domain: "nonnegative weights summing to 1".into(),
                });
            }
            for (_, sigma) in comps {
                if sigma.shape() != (n, n) {
                    return Err(Error::ShapeMismatch("CQ components differ in dimension".into()));
                }
                check_density(sigma, "CQ component")?;
            }
            BlockMatrix::from_blocks(m, n, |i, j| {
                if i == j {
                    comps[i].1.scale(comps[i].0)
                } else {
                    ComplexMatrix::zeros(n, n)
                }
            })
        }
        StateFamilyKind::Product => {
            let [(_, rho1), (_, rho2)] = spec.components.as_slice() else {
                return Err(Error::MissingParam("two product factors".into()));
            };
            check_density(rho1, "first factor")?;
            check_density(rho2, "second factor")?;
            BlockMatrix::product(rho1, rho2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateTag {
    Separable,
    PptEntangled,
    NpptEntangled,
    /// PPT, but the family's known ranges and the PPT test do not settle separability.
    PptUnresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassificationSource {
    /// Known separability range of the family.
    KnownRange,
    PptTest,
    /// Separable by construction (product and classical-quantum states).
    Construction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateClassification {
    pub tag: StateTag,
    pub source: ClassificationSource,
}

impl StateClassification {
    fn known(tag: StateTag) -> Self {
        Self {
            tag,
            source: ClassificationSource::KnownRange,
        }
    }
}

/// Classification by PPT test; PPT decides separability only when `m n <= 6`.
pub fn classify_by_ppt(state: &BlockMatrix) -> Result<StateClassification> {
    let class = state.ppt_classify(PPT_TOL)?;
    let tag = match class.tag {
        PptTag::NotPositive => return Err(Error::NotPsd { min_eig: class.min_eig }),
        PptTag::PositiveNppt => StateTag::NpptEntangled,
        PptTag::PositivePpt if state.m() * state.n() <= 6 => StateTag::Separable,
        PptTag::PositivePpt => StateTag::PptUnresolved,
    };
    Ok(StateClassification {
        tag,
        source: ClassificationSource::PptTest,
    })
}

pub fn classify_state(spec: &StateFamilySpec) -> Result<StateClassification> {
    match spec.kind {
        StateFamilyKind::Horodecki => {
            let a = spec.horodecki_param()?;
            Ok(if a < 1.0 {
                StateClassification::known(StateTag::NpptEntangled)
            } else if a < 2.0 {
                classify_by_ppt(&horodecki(a))?
            } else if a <= 3.0 {
                StateClassification::known(StateTag::Separable)
            } else if a <= 4.0 {
                StateClassification::known(StateTag::PptEntangled)
            } else {
                StateClassification::known(StateTag::NpptEntangled)
            })
        }
        StateFamilyKind::Werner => {
            spec.check_dim()?;
            let x = spec.werner_param()?;
            Ok(StateClassification::known(if x >= 0.0 {
                StateTag::Separable
            } else {
                StateTag::NpptEntangled
            }))
        }
        StateFamilyKind::Isotropic => {
            let m = spec.check_dim()? as f64;
            let y = spec.isotropic_param()?;
            Ok(StateClassification::known(if y <= 1.0 / (m + 1.0) {
                StateTag::Separable
            } else {
                StateTag::NpptEntangled
            }))
        }
        StateFamilyKind::ClassicalQuantum | StateFamilyKind::Product => {
            make_state(spec)?;
            Ok(StateClassification {
                tag: StateTag::Separable,
                source: ClassificationSource::Construction,
            })
        }
        StateFamilyKind::Flip | StateFamilyKind::MaxEnt => classify_by_ppt(&make_state(spec)?),
    }
}
