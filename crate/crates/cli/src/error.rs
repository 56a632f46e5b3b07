use posmap_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed files, bad flags, out-of-domain parameters, mismatched shapes.
    #[error("{message}")]
    Input { name: &'static str, message: String },
    /// The input is well formed but violates the requested method's hypotheses.
    #[error("{0}")]
    Precondition(CoreError),
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input {
            name: "InvalidInput",
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => EXIT_INPUT,
            CliError::Precondition(_) => EXIT_PRECONDITION,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Input { name, .. } => name,
            CliError::Precondition(e) => e.name(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotSquare { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::ShapeMismatch(_)
            | CoreError::IndexOutOfRange { .. }
            | CoreError::DimensionTooSmall { .. }
            | CoreError::NonFinite
            | CoreError::UnknownFamily(_)
            | CoreError::MissingParam(_)
            | CoreError::ParamOutOfDomain { .. }
            | CoreError::InvalidConfig(_) => CliError::Input {
                name: e.name(),
                message: e.to_string(),
            },
            other => CliError::Precondition(other),
        }
    }
}
