//! Centralized numerical tolerances.
//!
//! Every validation in the crate reports the measured residual next to the
//! tolerance it was checked against, so a failure always says how far off
//! the value was. One knob per class of check, no ad-hoc magic numbers at
//! call sites.

/// Hermiticity: max entrywise |A[i,j] - conj(A[j,i])|.
pub const TOL_HERM: f64 = 1e-10;

/// Unitarity: max entrywise norm of (A†A - I).
pub const TOL_UNIT: f64 = 1e-10;

/// Idempotence of projectors: max entrywise norm of (A² - A).
pub const TOL_PROJ: f64 = 1e-10;

/// Normalization of state vectors and density-matrix traces.
pub const TOL_NORM: f64 = 1e-12;

/// Positive semidefiniteness: smallest eigenvalue may undershoot zero by
/// at most this much.
pub const TOL_PSD: f64 = 1e-10;

/// Largest dimension `tensor` will produce without a capacity error.
pub const MAX_TENSOR_DIM: usize = 4096;

/// Pointer-cell weights below this are treated as empty when conditioning.
pub const W_FLOOR: f64 = 1e-9;

/// Pass threshold for the measurement-condition residual matrix.
pub const COND_TOL: f64 = 1e-8;

/// Two eigenvalues closer than this are treated as one spectral point when
/// grouping eigenvectors into spectral projectors.
pub const EIGEN_GROUP_TOL: f64 = 1e-8;

/// Distinctness threshold for spectral-probability comparisons.
pub const DISTINCT_TOL: f64 = 1e-10;
