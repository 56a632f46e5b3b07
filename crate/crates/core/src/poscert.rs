//! Block-positivity search by see-saw over product vectors.
//!
//! A Hermitian `C ∈ M_m ⊗ M_n` is block-positive when
//! `f(u, v) = <u⊗v| C |u⊗v> >= 0` for all unit `u ∈ C^m`, `v ∈ C^n`. This is
//! equivalent to positivity of the map whose Choi matrix is `C`, and to the
//! condition that `[<u| Ã_kl |u>]_kl >= 0` for every unit `u`, which is the
//! `(1,1)` block of `(U ⊗ I) C (U^dag ⊗ I)` with `u = U^dag e_1`.
//!
//! Each restart alternates two exact minimizations: with `u` fixed, `v` is the
//! lowest eigenvector of `(<u| ⊗ I) C (|u> ⊗ I)`; with `v` fixed, `u` is the
//! lowest eigenvector of `(I ⊗ <v|) C (I ⊗ |v>)`. The objective never
//! increases. `NoViolationFound` is the outcome of a bounded search and does
//! not prove positivity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::blockmat::BlockMatrix;
use crate::chanmap::LinearMapRep;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct CertifierConfig {
    pub restarts: usize,
    /// Alternation rounds per restart; each round is two half-steps.
    pub max_iters: usize,
    /// Stop a restart once a round lowers the objective by less than this
    /// (relative to `max(1, ||C||_F)`).
    pub convergence_tol: f64,
    /// Report a violation when the minimum is below `-violation_threshold * max(1, ||C||_F)`.
    pub violation_threshold: f64,
    pub seed: u64,
}

impl Default for CertifierConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 200,
            convergence_tol: 1e-12,
            violation_threshold: 1e-8,
            seed: 0,
        }
    }
}

impl CertifierConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.convergence_tol > 0.0) || !(self.violation_threshold > 0.0) {
            return Err(Error::InvalidConfig("thresholds must be positive".into()));
        }
        Ok(())
    }

    /// Generator for restart `index`: the configured seed on stream `index`.
    fn restart_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Violation,
    NoViolationFound,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Violation => "violation",
            Verdict::NoViolationFound => "no-violation-found",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityVerdict {
    pub verdict: Verdict,
    /// Present on `Violation`.
    pub witness_u: Option<ComplexVector>,
    /// Present on `Violation`.
    pub witness_v: Option<ComplexVector>,
    /// Smallest `f(u, v)` over all restarts, evaluated at the final pair of the best restart.
    pub min_value: f64,
    pub restarts_run: usize,
    pub iterations_total: usize,
    /// Every restart's objective sequence was non-increasing.
    pub monotone: bool,
}

impl PositivityVerdict {
    pub fn is_violation(&self) -> bool {
        self.verdict == Verdict::Violation
    }
}

/// Objective values after each half-step of one restart.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartTrace {
    pub objective: Vec<f64>,
    pub u: ComplexVector,
    pub v: ComplexVector,
    pub value: f64,
    pub iterations: usize,
}

impl RestartTrace {
    /// Non-increasing up to `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.objective.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// `<u⊗v| C |u⊗v>` (real part; exact for Hermitian `C`).
pub fn product_value(c: &BlockMatrix, u: &ComplexVector, v: &ComplexVector) -> f64 {
    let w = linalg::kron_vec(u, v);
    w.dotc(&(c.full() * &w)).re
}

/// `(<u| ⊗ I) C (|u> ⊗ I)`, an `n x n` matrix.
fn contract_first(c: &BlockMatrix, u: &ComplexVector) -> ComplexMatrix {
    let (m, n) = c.dims();
    let full = c.full();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..m {
        for j in 0..m {
            let w = u[i].conj() * u[j];
            if w != C64::new(0.0, 0.0) {
                out += full.view((i * n, j * n), (n, n)) * w;
            }
        }
    }
    out
}

/// `(I ⊗ <v|) C (I ⊗ |v>)`, an `m x m` matrix.
fn contract_second(c: &BlockMatrix, v: &ComplexVector) -> ComplexMatrix {
    let (m, n) = c.dims();
    let full = c.full();
    ComplexMatrix::from_fn(m, m, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            for l in 0..n {
                acc += v[k].conj() * v[l] * full[(i * n + k, j * n + l)];
            }
        }
        acc
    })
}

fn lowest(h: &ComplexMatrix) -> Result<(f64, ComplexVector)> {
    let eig = linalg::hermitian_eig(h)?;
    Ok((eig.min(), eig.min_vector()))
}

/// One see-saw run from the starting vector `u0`.
pub fn seesaw_from(c: &BlockMatrix, u0: ComplexVector, cfg: &CertifierConfig) -> Result<RestartTrace> {
    if u0.len() != c.m() {
        return Err(Error::DimensionMismatch {
            expected: c.m(),
            found: u0.len(),
        });
    }
    let stop = cfg.convergence_tol * c.tol_scale();
    let mut u = u0;
    let mut v;
    let mut objective = Vec::with_capacity(2 * cfg.max_iters);
    let mut previous = f64::INFINITY;
    let mut iterations = 0;
    loop {
        let (val_v, new_v) = lowest(&contract_first(c, &u))?;
        v = new_v;
        objective.push(val_v);
        let (val_u, new_u) = lowest(&contract_second(c, &v))?;
        u = new_u;
        objective.push(val_u);
        iterations += 1;
        if iterations >= cfg.max_iters || previous - val_u < stop {
            break;
        }
        previous = val_u;
    }
    let value = product_value(c, &u, &v);
    Ok(RestartTrace {
        objective,
        u,
        v,
        value,
        iterations,
    })
}

/// Runs all restarts and returns the verdict with every restart's trace.
pub fn block_positivity_traced(
    c: &BlockMatrix,
    cfg: &CertifierConfig,
) -> Result<(PositivityVerdict, Vec<RestartTrace>)> {
    cfg.validate()?;
    linalg::check_hermitian(c.full())?;
    let m = c.m();
    let traces: Vec<RestartTrace> = (0..cfg.restarts)
        .into_par_iter()
        .map(|index| {
            let mut rng = cfg.restart_rng(index);
            let u0 = linalg::random_unit_vector(m, &mut rng)?;
            seesaw_from(c, u0, cfg)
        })
        .collect::<Result<_>>()?;

    // first restart attaining the minimum wins, independent of scheduling
    let best = traces
        .iter()
        .enumerate()
        .fold(0, |best, (k, t)| if t.value < traces[best].value { k } else { best });
    let scale = c.tol_scale();
    let slack = 1e-12 * scale;
    let monotone = traces.iter().all(|t| t.is_monotone(slack));
    let iterations_total = traces.iter().map(|t| t.iterations).sum();
    let min_value = traces[best].value;
    let violated = min_value < -cfg.violation_threshold * scale;
    let verdict = PositivityVerdict {
        verdict: if violated {
            Verdict::Violation
        } else {
            Verdict::NoViolationFound
        },
        witness_u: violated.then(|| traces[best].u.clone()),
        witness_v: violated.then(|| traces[best].v.clone()),
        min_value,
        restarts_run: traces.len(),
        iterations_total,
        monotone,
    };
    Ok((verdict, traces))
}

pub fn block_positivity(c: &BlockMatrix, cfg: &CertifierConfig) -> Result<PositivityVerdict> {
    block_positivity_traced(c, cfg).map(|(verdict, _)| verdict)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapPositivity {
    pub verdict: PositivityVerdict,
    /// On violation, the unit vector `w = conj(u)` with `Φ(|w><w|) ≱ 0`.
    pub witness_input: Option<ComplexVector>,
    /// On violation, `λ_min(Φ(|w><w|))`, which equals `min_v f(u, v)`.
    pub output_min_eig: Option<f64>,
}

fn check_hermiticity_preserving(phi: &LinearMapRep) -> Result<()> {
    if !phi.is_hermiticity_preserving(linalg::HERMITIAN_TOL) {
        return Err(Error::NotHermitianPreserving);
    }
    Ok(())
}

/// Positivity of `Φ` through block-positivity of its Choi matrix.
///
/// `f(u, v) = <v| Φ(|ū><ū|) |v>`, so the input state exhibiting a violation
/// is the conjugate of the first witness vector.
pub fn map_positivity(phi: &LinearMapRep, cfg: &CertifierConfig) -> Result<MapPositivity> {
    check_hermiticity_preserving(phi)?;
    let verdict = block_positivity(phi.choi(), cfg)?;
    let (witness_input, output_min_eig) = match &verdict.witness_u {
        Some(u) => {
            let w = u.map(|z| z.conj());
            let out = phi.apply(&linalg::outer(&w, &w))?;
            let lmin = linalg::min_eigenvalue(&linalg::symmetrize(&out))?;
            (Some(w), Some(lmin))
        }
        None => (None, None),
    };
    Ok(MapPositivity {
        verdict,
        witness_input,
        output_min_eig,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapClass {
    Cp,
    /// Positive (no violation found in the bounded search) but not CP.
    Pncp,
    NotPositive,
}

impl MapClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MapClass::Cp => "CP",
            MapClass::Pncp => "PNCP",
            MapClass::NotPositive => "NOT_POSITIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapClassification {
    pub class: MapClass,
    pub choi_min_eig: f64,
    /// Absent when the map is CP (no search needed).
    pub positivity: Option<MapPositivity>,
}

/// CP when the Choi matrix is PSD within `cfg.violation_threshold` (relative);
/// otherwise PNCP or NOT_POSITIVE according to the see-saw search.
pub fn classify_map(phi: &LinearMapRep, cfg: &CertifierConfig) -> Result<MapClassification> {
    check_hermiticity_preserving(phi)?;
    let choi_min_eig = phi.choi_min_eig()?;
    if choi_min_eig >= -cfg.violation_threshold * phi.choi().tol_scale() {
        return Ok(MapClassification {
            class: MapClass::Cp,
            choi_min_eig,
            positivity: None,
        });
    }
    let positivity = map_positivity(phi, cfg)?;
    let class = if positivity.verdict.is_violation() {
        MapClass::NotPositive
    } else {
        MapClass::Pncp
    };
    Ok(MapClassification {
        class,
        choi_min_eig,
        positivity: Some(positivity),
    })
}
