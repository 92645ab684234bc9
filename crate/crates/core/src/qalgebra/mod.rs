//! Dense finite-dimensional complex linear algebra for quantum states and
//! observables: construction, composition, evolution, and distance.
//!
//! Everything is dense and double precision. Dimensions stay desk-scale
//! (a few thousand at most), so full spectral decompositions are always
//! affordable and preferred over iterative or series methods.

mod density;
mod operator;
mod state;

pub use density::{partial_trace, trace_distance, DensityMatrix, Factor};
pub use operator::{
    commutator, expm_hermitian, spectral_projectors_of, tensor, HermitianEigen, OpFlags,
    OperatorMatrix,
};
pub use state::{projector_onto, StateVector};
