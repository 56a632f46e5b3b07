use thiserror::Error;

use crate::linalg::ComplexVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (||H - H^dag||_F = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("matrix is not unitary (||U^dag U - I||_F = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index ({i}, {j}) out of range for {bound}x{bound} block grid")]
    IndexOutOfRange { i: usize, j: usize, bound: usize },

    #[error("vector is zero")]
    ZeroVector,

    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("reduced matrix is zero; no channel can be built")]
    ZeroMatrix,

    #[error("state is not normalized (trace {trace})")]
    NotNormalized { trace: f64 },

    #[error("purification does not reproduce the reduced matrix (deviation {deviation:e})")]
    PurificationMismatch { deviation: f64 },

    #[error("input is PPT (min eigenvalue of partial transpose {min_eig_pt:e}); the construction would be completely positive")]
    InputIsPpt { min_eig_pt: f64 },

    #[error("input is positive semidefinite; the map would be completely positive")]
    IsPsd,

    #[error("diagonal block {index} is not positive semidefinite (min eigenvalue {min_eig:e})")]
    DiagBlockNotPsd { index: usize, min_eig: f64 },

    #[error("block-positivity condition violated (value {value:e} at witness)")]
    ConditionViolated {
        witness_u: ComplexVector,
        witness_v: ComplexVector,
        value: f64,
    },

    #[error("map is not completely positive")]
    NotCp,

    #[error("map is not trace preserving")]
    NotTp,

    #[error("map is completely positive; it yields no entanglement witness")]
    MapIsCp,

    #[error("map is not Hermiticity preserving")]
    NotHermitianPreserving,

    #[error("unknown family '{0}'")]
    UnknownFamily(String),

    #[error("missing parameter '{0}'")]
    MissingParam(String),

    #[error("parameter {name} = {value} outside domain {domain}")]
    ParamOutOfDomain {
        name: String,
        value: f64,
        domain: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite entry in input")]
    NonFinite,
}

impl Error {
    /// Stable identifier used in machine-readable reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPsd { .. } => "NotPsd",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ZeroVector => "ZeroVector",
            Error::DimensionTooSmall { .. } => "DimensionTooSmall",
            Error::ZeroMatrix => "ZeroMatrix",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::PurificationMismatch { .. } => "PurificationMismatch",
            Error::InputIsPpt { .. } => "InputIsPpt",
            Error::IsPsd => "IsPsd",
            Error::DiagBlockNotPsd { .. } => "DiagBlockNotPsd",
            Error::ConditionViolated { .. } => "ConditionViolated",
            Error::NotCp => "NotCp",
            Error::NotTp => "NotTp",
            Error::MapIsCp => "MapIsCp",
            Error::NotHermitianPreserving => "NotHermitianPreserving",
            Error::UnknownFamily(_) => "UnknownFamily",
            Error::MissingParam(_) => "MissingParam",
            Error::ParamOutOfDomain { .. } => "ParamOutOfDomain",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NonFinite => "NonFinite",
        }
    }
}
