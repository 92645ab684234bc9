//! A microscopic object coupled to a macroscopic pointer apparatus through
//! an additively conserved observable.
//!
//! The object observable is diagonal in the standard basis with
//! nondegenerate eigenvalues; the apparatus carries a commutative algebra
//! of cell projectors (`Π_0` is the rest cell holding the initial mixed
//! state). The coupling acts only during a finite window `(0, τ)` and never
//! mixes object eigenstates, so the total Hamiltonian is block diagonal and
//! evolution factorizes into per-eigenvalue apparatus propagators.
//!
//! Analyses read the evolved state through the pointer algebra: cell
//! weights, conditional expectations on cells, measurement-condition
//! checks, collapse and repeated-measurement reports, and the reversal
//! construction that exhibits irreversibility.

mod analysis;
mod apparatus;
mod macro_algebra;
mod model;
mod object;

pub use analysis::{
    collapse_report, conditional_expectation, expectation, f_coeff, pointer_weight,
    pointer_weights, reverse_evolution, two_stage_measurement, verify_measurement_conditions,
    CellExpectation, CollapseCell, CollapseReport, EigenstateCase, MeasurementConditionsReport,
    ReverseReport, TwoStageReport,
};
pub use apparatus::{build_pointer_apparatus, build_pointer_apparatus_with_rest, ApparatusSpec, HaMode};
pub use macro_algebra::MacroAlgebra;
pub use model::{assemble_model, evolve, EvolvedState, SewellModel};
pub use object::ObjectSpec;
