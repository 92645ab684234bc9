//! No-go checks for measurement schemes constrained by additive
//! conservation laws.
//!
//! A scheme is a candidate measurement: a unitary on the composite, an
//! initial apparatus state, and a pointer algebra whose cells are supposed
//! to register the object's eigenvalue. The checks quantify how well such
//! schemes can work when the measured observable fails to commute with a
//! conserved quantity: the commutation obstruction rules out exactness,
//! the malfunction probability and its variance-based lower bound measure
//! the failure, constrained optimization searches for the best conserving
//! scheme, and the mixture/distinctness predicates exhibit final states no
//! pointer-eigenstate mixture can describe.

mod family;
mod fine_brown;
mod malfunction;
mod mixture;
mod scheme;
mod way;

pub use family::{
    minimize_epsilon, sample_yanase_bound, yanase_epsilon_chain, ConservingFamily,
    OptimizedScheme, YanaseSampleSummary,
};
pub use fine_brown::{a_distinct, fine_brown_is_measurement, Ensemble, FineBrownVerdict};
pub use malfunction::{malfunction_epsilon, yanase_bound_check, MalfunctionReport, YanaseReport, YanaseVerdict};
pub use mixture::{
    is_pointer_mixture, shimony_approx_check, PointerMixtureCheck, ShimonyOutcome, ShimonyReport,
};
pub use scheme::{ConservedQuantity, MeasurementScheme};
pub use way::{way_obstruction, WayVerdict};
