//! The commutation obstruction: an observable that fails to commute with
//! an additively conserved quantity admits no exact measurement scheme.

use crate::error::Result;
use crate::insolubility::scheme::ConservedQuantity;
use crate::qalgebra::{commutator, OperatorMatrix};

/// Residual below which a commutator counts as zero.
const WAY_TOL: f64 = 1e-12;

/// Outcome of the obstruction check.
#[derive(Debug, Clone)]
pub struct WayVerdict {
    /// Entrywise norm of `[A⁽ᵒ⁾, L⁽ᵒ⁾]`.
    pub residual: f64,
    /// Exact registration of every eigenstate is possible only when the
    /// commutator vanishes; otherwise any scheme has nonzero malfunction
    /// probability.
    pub exact_possible: bool,
}

/// Measures `‖[A⁽ᵒ⁾, L⁽ᵒ⁾]‖` and reports whether an exact measurement
/// scheme can exist.
pub fn way_obstruction(a_obj: &OperatorMatrix, l: &ConservedQuantity) -> Result<WayVerdict> {
    a_obj.require_hermitian("way_obstruction observable")?;
    let residual = commutator(a_obj, l.object_part()).max_abs();
    Ok(WayVerdict {
        residual,
        exact_possible: residual <= WAY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_z() -> ConservedQuantity {
        ConservedQuantity::new(OperatorMatrix::pauli_z(), OperatorMatrix::diag(&[1.0, -1.0]))
            .unwrap()
    }

    #[test]
    fn commuting_observable_is_unobstructed() {
        let verdict = way_obstruction(&OperatorMatrix::pauli_z(), &l_z()).unwrap();
        assert_eq!(verdict.residual, 0.0);
        assert!(verdict.exact_possible);
    }

    #[test]
    fn noncommuting_observable_is_obstructed() {
        // Hand commutator: [σx, σz] = −2i·σy, entrywise norm 2.
        let verdict = way_obstruction(&OperatorMatrix::pauli_x(), &l_z()).unwrap();
        assert!((verdict.residual - 2.0).abs() < 1e-15);
        assert!(!verdict.exact_possible);
    }

    #[test]
    fn identity_always_commutes() {
        let verdict = way_obstruction(&OperatorMatrix::identity(2), &l_z()).unwrap();
        assert_eq!(verdict.residual, 0.0);
        assert!(verdict.exact_possible);
    }
}
