//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by all subsystems.
///
/// Numerical contract failures always carry the measured residual and the
/// tolerance it exceeded; structural failures carry the offending shapes.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// Matrix or vector shapes are incompatible with the operation.
    #[error("shape mismatch in {context}: got {got}, expected {expected}")]
    Shape {
        context: &'static str,
        got: usize,
        expected: usize,
    },

    /// A requested construction would exceed the configured dimension cap.
    #[error("capacity exceeded: requested dimension {requested} > max {max}")]
    Capacity { requested: usize, max: usize },

    /// An input violated a documented precondition.
    #[error("contract violation in {context}: residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    Contract {
        context: &'static str,
        residual: f64,
        tolerance: f64,
    },

    /// A model invariant failed during assembly or validation. The label
    /// names the invariant that broke.
    #[error("invariant `{label}` violated: residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    Invariant {
        label: &'static str,
        residual: f64,
        tolerance: f64,
    },

    /// Index outside the valid range for the addressed structure.
    #[error("index {index} out of range for {context} of size {size}")]
    Index {
        context: &'static str,
        index: usize,
        size: usize,
    },

    /// The dense eigensolver backend failed.
    #[error("linear algebra backend failure: {0}")]
    Backend(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl From<ndarray_linalg::error::LinalgError> for CoreError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        CoreError::Backend(e.to_string())
    }
}
