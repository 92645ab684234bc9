//! Pointer-mixture criteria: which composite states are mixtures of
//! pointer eigenstates, and how much weight an approximate measurement
//! leaks outside its target cell.

use crate::error::Result;
use crate::insolubility::scheme::MeasurementScheme;
use crate::qalgebra::{tensor, DensityMatrix, HermitianEigen, OperatorMatrix, StateVector};
use crate::sewell::MacroAlgebra;

/// Off-block Frobenius norm above which a state does not count as
/// block-diagonalizable across the pointer cells.
const MIXTURE_BLOCK_TOL: f64 = 1e-8;

/// Eigenvalues below this are not reported as mixture weights.
const WEIGHT_FLOOR: f64 = 1e-12;

/// Result of the block-diagonality test.
#[derive(Debug, Clone, Copy)]
pub struct PointerMixtureCheck {
    pub is_mixture: bool,
    /// Frobenius norm of `w − Σ_α (I⊗Π_α) w (I⊗Π_α)`.
    pub off_block_norm: f64,
}

/// A state is a mixture of pointer eigenstates exactly when it is block
/// diagonal across the cells; the returned norm measures the coherent
/// remainder.
pub fn is_pointer_mixture(
    w: &DensityMatrix,
    pointer: &MacroAlgebra,
    tol: f64,
) -> Result<PointerMixtureCheck> {
    let blocked = block_diagonal_part(w.op(), pointer)?;
    let off_block_norm = w.op().sub(&blocked).frobenius_norm();
    Ok(PointerMixtureCheck {
        is_mixture: off_block_norm <= tol,
        off_block_norm,
    })
}

/// `Σ_α (I⊗Π_α) w (I⊗Π_α)`, inferring the object dimension from the shape.
fn block_diagonal_part(w: &OperatorMatrix, pointer: &MacroAlgebra) -> Result<OperatorMatrix> {
    let big_n = pointer.apparatus_dim();
    let n = w.dim() / big_n;
    if n * big_n != w.dim() {
        return Err(crate::error::CoreError::Shape {
            context: "pointer mixture check (state not a multiple of apparatus dim)",
            got: w.dim(),
            expected: big_n,
        });
    }
    let identity = OperatorMatrix::identity(n);
    let mut out = OperatorMatrix::zeros(w.dim());
    for alpha in 0..=pointer.nu() {
        let p = tensor(&identity, pointer.projector(alpha)?)?;
        out = out.add(&p.matmul(w).matmul(&p));
    }
    Ok(out)
}

/// Outcome of an approximate-measurement check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShimonyOutcome {
    /// The final state is a pointer mixture and the off-target weight is
    /// within the threshold.
    Pass,
    /// A pointer mixture, but too much weight outside the target cell.
    Fail,
    /// The final state is not expressible as a pointer mixture at all —
    /// the substantive no-go outcome, not an error.
    NotAMixture,
}

/// Decomposition of a final state over pointer cells.
#[derive(Debug, Clone)]
pub struct ShimonyReport {
    pub outcome: ShimonyOutcome,
    /// Mixture weights grouped per cell (descending within each cell);
    /// they always sum to 1 because the block traces resolve the trace.
    pub weights: Vec<(usize, Vec<f64>)>,
    /// Total weight outside the target cell.
    pub off_target_mass: f64,
    /// The acceptance threshold the caller supplied.
    pub delta: f64,
    /// Frobenius norm of the non-block-diagonal remainder.
    pub off_block_norm: f64,
}

/// Applies the scheme's unitary to `input ⊗ t_init`, decomposes the result
/// over the pointer cells, and compares the weight that leaked outside the
/// target cell `σ(m)` against `delta`.
///
/// Honest callers prepare `input` as the eigenstate `u_m`; feeding a
/// superposition instead typically produces `NotAMixture` — the point of
/// the no-go theorem this check operationalizes.
pub fn shimony_approx_check(
    scheme: &MeasurementScheme,
    t_init: &DensityMatrix,
    input: &StateVector,
    m: usize,
    delta: f64,
) -> Result<ShimonyReport> {
    let target = scheme.pointer().sigma(m)?;
    let joint = tensor(&input.projector(), t_init.op())?;
    let final_state = scheme
        .unitary()
        .matmul(&joint)
        .matmul(&scheme.unitary().adjoint());

    let blocked = block_diagonal_part(&final_state, scheme.pointer())?;
    let off_block_norm = final_state.sub(&blocked).frobenius_norm();

    let n = scheme.object_dim();
    let identity = OperatorMatrix::identity(n);
    let mut weights = Vec::with_capacity(scheme.pointer().nu() + 1);
    let mut off_target_mass = 0.0;
    for alpha in 0..=scheme.pointer().nu() {
        let p = tensor(&identity, scheme.pointer().projector(alpha)?)?;
        let block = p.matmul(&final_state).matmul(&p);
        let mass = block.trace().re;
        if alpha != target {
            off_target_mass += mass;
        }
        let mut cell_weights: Vec<f64> = HermitianEigen::new(&block)?
            .eigenvalues()
            .iter()
            .copied()
            .filter(|w| *w > WEIGHT_FLOOR)
            .collect();
        cell_weights.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
        weights.push((alpha, cell_weights));
    }

    let outcome = if off_block_norm > MIXTURE_BLOCK_TOL {
        ShimonyOutcome::NotAMixture
    } else if off_target_mass <= delta {
        ShimonyOutcome::Pass
    } else {
        ShimonyOutcome::Fail
    };
    Ok(ShimonyReport {
        outcome,
        weights,
        off_target_mass,
        delta,
        off_block_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rank1_pointer() -> MacroAlgebra {
        MacroAlgebra::from_index_partition(
            2,
            &[vec![], vec![0], vec![1]],
            vec![1.0, -1.0],
            vec![2, 1],
        )
        .unwrap()
    }

    #[test]
    fn block_diagonal_state_is_a_mixture() {
        let pointer = rank1_pointer();
        let w = DensityMatrix::maximally_mixed(4);
        let check = is_pointer_mixture(&w, &pointer, 1e-10).unwrap();
        assert!(check.is_mixture);
        assert!(check.off_block_norm < 1e-15);
    }

    #[test]
    fn bell_type_state_is_not_a_mixture() {
        // Hand computation: the two off-block coherences have magnitude ½,
        // giving Frobenius norm √(2·¼) = 1/√2.
        let s = 0.5_f64.sqrt();
        let bell = StateVector::from_slice(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)])
            .unwrap();
        let w = DensityMatrix::from_pure(&bell);
        let check = is_pointer_mixture(&w, &rank1_pointer(), 1e-10).unwrap();
        assert!(!check.is_mixture);
        assert!((check.off_block_norm - s).abs() < 1e-12);
    }

    #[test]
    fn product_state_is_a_mixture() {
        let psi = StateVector::from_slice(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let p0 = StateVector::basis(2, 0).unwrap();
        let w = DensityMatrix::from_pure(&psi.tensor(&p0));
        let check = is_pointer_mixture(&w, &rank1_pointer(), 1e-10).unwrap();
        assert!(check.is_mixture);
        assert!(check.off_block_norm < 1e-15);
    }

    /// Controlled flip in the object basis: an exact scheme for σz.
    fn controlled_flip() -> MeasurementScheme {
        let u = OperatorMatrix::from_rows(
            4,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
            ],
        )
        .unwrap();
        let xi = StateVector::basis(2, 0).unwrap();
        MeasurementScheme::new(
            OperatorMatrix::pauli_z(),
            DensityMatrix::from_pure(&xi),
            u,
            rank1_pointer(),
        )
        .unwrap()
    }

    #[test]
    fn exact_scheme_on_eigenstate_passes_any_delta() {
        let scheme = controlled_flip();
        let input = scheme.eigenstate(1).unwrap(); // eigenvalue +1 ↔ e₀
        let report = shimony_approx_check(
            &scheme,
            &DensityMatrix::from_pure(&StateVector::basis(2, 0).unwrap()),
            &input,
            1,
            0.0,
        )
        .unwrap();
        assert_eq!(report.outcome, ShimonyOutcome::Pass);
        assert!(report.off_target_mass < 1e-14);
        let total: f64 = report.weights.iter().flat_map(|(_, w)| w.iter()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leaked_weight_thresholds() {
        // A mixed apparatus preparation leaks 5% of the weight into the
        // wrong cell through the controlled flip; the verdict depends on
        // the acceptance threshold.
        let scheme = controlled_flip();
        let t = DensityMatrix::mixture(&[
            (0.95, DensityMatrix::from_pure(&StateVector::basis(2, 0).unwrap())),
            (0.05, DensityMatrix::from_pure(&StateVector::basis(2, 1).unwrap())),
        ])
        .unwrap();
        let input = scheme.eigenstate(1).unwrap();
        let pass = shimony_approx_check(&scheme, &t, &input, 1, 0.1).unwrap();
        assert_eq!(pass.outcome, ShimonyOutcome::Pass);
        assert!((pass.off_target_mass - 0.05).abs() < 1e-12);
        let fail = shimony_approx_check(&scheme, &t, &input, 1, 0.01).unwrap();
        assert_eq!(fail.outcome, ShimonyOutcome::Fail);
    }

    #[test]
    fn superposed_input_defeats_the_mixture_form() {
        let scheme = controlled_flip();
        let s = 0.5_f64.sqrt();
        let input = StateVector::from_slice(&[c(s, 0.0), c(s, 0.0)]).unwrap();
        let report = shimony_approx_check(
            &scheme,
            &DensityMatrix::from_pure(&StateVector::basis(2, 0).unwrap()),
            &input,
            1,
            0.5,
        )
        .unwrap();
        assert_eq!(report.outcome, ShimonyOutcome::NotAMixture);
        assert!(report.off_block_norm > 0.1);
    }
}
