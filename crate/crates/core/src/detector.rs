//! Entanglement detection with positive maps, witnesses, and parameter sweeps.

use rayon::prelude::*;

use crate::blockmat::{BlockMatrix, Factor};
use crate::chanmap::{make_family, LinearMapRep, MapFamilyKind, MapFamilySpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poscert::{self, CertifierConfig};
use crate::statezoo::{make_state, StateFamilyKind, StateFamilySpec};

/// Maps whose Choi matrix is PSD within this relative tolerance give no witness.
pub const WITNESS_CP_TOL: f64 = 1e-9;

/// `(id_m ⊗ Φ) ρ`, computed blockwise.
pub fn apply_id_tensor(phi: &LinearMapRep, rho: &BlockMatrix) -> Result<BlockMatrix> {
    if rho.n() != phi.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.input_dim(),
            found: rho.n(),
        });
    }
    let mut images = Vec::with_capacity(rho.m() * rho.m());
    for i in 0..rho.m() {
        for j in 0..rho.m() {
            images.push(phi.apply(&rho.block(i, j)?)?);
        }
    }
    let m = rho.m();
    BlockMatrix::from_blocks(m, phi.output_dim(), |i, j| images[i * m + j].clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub min_eig: f64,
    pub detected: bool,
    pub map_id: String,
    pub state_id: String,
}

impl DetectionReport {
    pub fn labeled(mut self, map_id: impl Into<String>, state_id: impl Into<String>) -> Self {
        self.map_id = map_id.into();
        self.state_id = state_id.into();
        self
    }
}

/// Detected when `λ_min((id ⊗ Φ) ρ) < -tol * max(1, ||(id ⊗ Φ) ρ||_F)`.
pub fn detect(phi: &LinearMapRep, rho: &BlockMatrix, tol: f64) -> Result<DetectionReport> {
    let image = apply_id_tensor(phi, rho)?;
    let min_eig = image.min_eig()?;
    Ok(DetectionReport {
        min_eig,
        detected: min_eig < -tol * image.tol_scale(),
        map_id: String::new(),
        state_id: String::new(),
    })
}

/// `W = choi(Φ) / m = (id ⊗ Φ) P⁺`.
pub fn witness_from_map(phi: &LinearMapRep) -> Result<BlockMatrix> {
    if phi.is_completely_positive(WITNESS_CP_TOL) {
        return Err(Error::MapIsCp);
    }
    Ok(phi.choi().scale(1.0 / phi.input_dim() as f64))
}

/// `Re tr(W ρ)`.
pub fn evaluate_witness(w: &BlockMatrix, rho: &BlockMatrix) -> Result<f64> {
    if w.dims() != rho.dims() {
        return Err(Error::ShapeMismatch(format!(
            "witness is {:?}, state is {:?}",
            w.dims(),
            rho.dims()
        )));
    }
    Ok(linalg::trace(&(w.full() * rho.full())).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    Map { kind: MapFamilyKind, dim: usize },
    State { kind: StateFamilyKind, dim: usize },
}

impl SweepTarget {
    pub fn param_name(&self) -> Option<&'static str> {
        match self {
            SweepTarget::Map { kind, .. } => kind.param_name(),
            SweepTarget::State { kind, .. } => kind.param_name(),
        }
    }

    /// The Choi matrix for maps, the state itself for states.
    pub fn instantiate(&self, value: f64) -> Result<BlockMatrix> {
        let name = self
            .param_name()
            .ok_or_else(|| Error::InvalidConfig("family has no sweepable parameter".into()))?;
        match *self {
            SweepTarget::Map { kind, dim } => {
                Ok(make_family(&MapFamilySpec::new(kind, dim).with_param(name, value))?.into_choi())
            }
            SweepTarget::State { kind, dim } => make_state(&StateFamilySpec::new(kind, dim).with_param(name, value)),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckSet {
    pub cp: bool,
    pub positive: bool,
    pub ppt: bool,
}

impl CheckSet {
    pub fn is_empty(&self) -> bool {
        !(self.cp || self.positive || self.ppt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param_name: String,
    pub param_value: f64,
    pub choi_min_eig: Option<f64>,
    pub seesaw_min: Option<f64>,
    pub cp: Option<bool>,
    pub positive: Option<bool>,
    pub ppt: Option<bool>,
}

/// `from, from + step, …` up to `to` (inclusive within rounding).
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || !(step > 0.0) || to < from {
        return Err(Error::InvalidConfig(format!(
            "grid needs finite from <= to and step > 0, got {from}..{to} by {step}"
        )));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| from + k as f64 * step).collect())
}

fn sweep_point(
    target: &SweepTarget,
    name: &str,
    value: f64,
    checks: CheckSet,
    cfg: &CertifierConfig,
) -> Result<SweepRow> {
    let x = target.instantiate(value)?;
    let threshold = cfg.violation_threshold * x.tol_scale();
    let mut row = SweepRow {
        param_name: name.to_string(),
        param_value: value,
        choi_min_eig: None,
        seesaw_min: None,
        cp: None,
        positive: None,
        ppt: None,
    };
    if checks.cp {
        let lmin = x.min_eig()?;
        row.choi_min_eig = Some(lmin);
        row.cp = Some(lmin >= -threshold);
    }
    if checks.positive {
        let verdict = poscert::block_positivity(&x, cfg)?;
        row.seesaw_min = Some(verdict.min_value);
        row.positive = Some(!verdict.is_violation());
    }
    if checks.ppt {
        row.ppt = Some(x.partial_transpose(Factor::Second).min_eig()? >= -threshold);
    }
    Ok(row)
}

/// One row per grid point, in grid order. Checks act on the Choi matrix of a
/// map family or on the state of a state family.
pub fn sweep(target: &SweepTarget, values: &[f64], checks: CheckSet, cfg: &CertifierConfig) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig("grid must be strictly increasing".into()));
    }
    cfg.validate()?;
    let name = target
        .param_name()
        .ok_or_else(|| Error::InvalidConfig("family has no sweepable parameter".into()))?;
    values
        .par_iter()
        .map(|&value| sweep_point(target, name, value, checks, cfg))
        .collect()
}
