//! Dense, desk-scale quantum dynamics laboratory.
//!
//! Four subsystems share one currency, the dense complex matrix:
//!
//! * [`qalgebra`] — operators, state vectors, density matrices, tensor
//!   products, partial traces, and spectral-decomposition propagators.
//! * [`sewell`] — an object coupled to a macroscopic pointer apparatus
//!   through an additively conserved observable; evolution, conditional
//!   expectations on the commutative pointer algebra, collapse and
//!   irreversibility reports.
//! * [`insolubility`] — no-go checks for measurement schemes constrained
//!   by an additive conservation law: commutation obstruction, malfunction
//!   probability and its lower bound, pointer-mixture criteria, and the
//!   distinctness-based measurement predicate.
//! * [`compton`] — recoil/scattering angular kinematics and a Monte Carlo
//!   coincidence experiment separating exact from merely statistical
//!   conservation.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here may be called concurrently without synchronization.

pub mod compton;
pub mod error;
pub mod insolubility;
pub mod qalgebra;
pub mod sewell;
pub mod tolerances;

pub use error::{CoreError, Result};
pub use qalgebra::{DensityMatrix, Factor, HermitianEigen, OperatorMatrix, StateVector};
