//! Positive maps, block-positive matrices, and entanglement detection.
//!
//! Block matrices live in `M_m ⊗ M_n` with the first factor as the block
//! index: block `(i, j)` occupies rows `i*n..` and columns `j*n..`.

pub mod blockmat;
pub mod builders;
pub mod chanmap;
pub mod detector;
pub mod error;
pub mod linalg;
pub mod poscert;
pub mod purify;
pub mod statezoo;

pub use blockmat::{BlockMatrix, Factor, PptClass, PptTag};
pub use builders::{
    classify_channel, cor23_separability, lemma21_build, thm31_build, thm41_build, ChannelClass, Lemma21Result,
    Separability, SeparabilityReport, Thm31Result, Thm41Result,
};
pub use chanmap::{make_family, LinearMapRep, MapFamily, MapFamilyKind, MapFamilySpec};
pub use detector::{
    apply_id_tensor, detect, evaluate_witness, grid, sweep, witness_from_map, CheckSet, DetectionReport, SweepRow,
    SweepTarget,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, C64};
pub use poscert::{
    block_positivity, classify_map, map_positivity, CertifierConfig, MapClass, MapClassification, MapPositivity,
    PositivityVerdict, Verdict,
};
pub use purify::{purify, schmidt_decompose, SchmidtForm};
pub use statezoo::{
    classify_state, make_state, StateClassification, StateFamilyKind, StateFamilySpec, StateTag,
};
