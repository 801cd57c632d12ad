use alloc::string::String;
use core::fmt;

pub type Result<T, E = CoreError> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// A function argument is outside its documented domain.
    Argument(String),
    /// An input collection was empty where data is required.
    EmptyInput(&'static str),
    /// A record violates a `DesignRecord` invariant. `row` is 1-based when known.
    Validation {
        row: Option<usize>,
        field: &'static str,
        message: String,
    },
    /// Model fitting failed.
    Training(String),
    /// MLFN loss became non-finite.
    Divergence { epoch: usize, loss: f64 },
    /// A linear system could not be factorized.
    Singular(String),
    /// Operation not available for this model kind.
    UnsupportedKind(&'static str),
    /// Grid construction failed.
    Grid(String),
    /// A product of counts (or an enumeration) exceeds the configured cap.
    Capacity { product: u128, cap: u128 },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Argument(m) => write!(f, "invalid argument: {m}"),
            CoreError::EmptyInput(what) => write!(f, "empty input: {what}"),
            CoreError::Validation {
                row: Some(r),
                field,
                message,
            } => write!(f, "row {r}, field `{field}`: {message}"),
            CoreError::Validation {
                row: None,
                field,
                message,
            } => write!(f, "field `{field}`: {message}"),
            CoreError::Training(m) => write!(f, "training failed: {m}"),
            CoreError::Divergence { epoch, loss } => {
                write!(f, "training diverged at epoch {epoch} (loss = {loss})")
            }
            CoreError::Singular(m) => write!(f, "singular system: {m}"),
            CoreError::UnsupportedKind(m) => write!(f, "unsupported model kind: {m}"),
            CoreError::Grid(m) => write!(f, "grid error: {m}"),
            CoreError::Capacity { product, cap } => write!(
                f,
                "design space has {product} combinations, above the cap of {cap}; reduce the grid"
            ),
        }
    }
}

impl core::error::Error for CoreError {}
