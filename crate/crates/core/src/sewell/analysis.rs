//! Reading the evolved state through the pointer algebra: cell weights,
//! conditional expectations, measurement-condition checks, collapse and
//! repeated-measurement reports, and the reversal construction.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::qalgebra::{
    partial_trace, tensor, trace_distance, DensityMatrix, Factor, OperatorMatrix,
};
use crate::sewell::apparatus::ApparatusSpec;
use crate::sewell::macro_algebra::{MacroAlgebra, MEMBERSHIP_TOL};
use crate::sewell::model::{assemble_model, evolve, EvolvedState, SewellModel};
use crate::tolerances::{COND_TOL, MAX_TENSOR_DIM, W_FLOOR};

/// Cross-block coefficient `F_{r,s;α}(t) = tr(Ω_{r,s}(t) · Π_α)`.
///
/// For `r = s` the value is real and lies in `[0, 1]`; summed over all
/// cells (including the rest cell) the diagonal coefficients give 1.
pub fn f_coeff(
    state: &EvolvedState,
    algebra: &MacroAlgebra,
    r: usize,
    s: usize,
    alpha: usize,
) -> Result<Complex64> {
    let block = state.omega_block(r, s)?;
    let pi = algebra.projector(alpha)?;
    Ok(block.trace_product(pi))
}

/// Expectation `tr[Φ(t) · (o ⊗ m)]` of a joint observable.
///
/// `o` must be Hermitian and `m` a real combination of the cell
/// projectors; membership is checked by Hilbert–Schmidt projection onto
/// the algebra's span.
pub fn expectation(
    state: &EvolvedState,
    o: &OperatorMatrix,
    m: &OperatorMatrix,
    algebra: &MacroAlgebra,
) -> Result<f64> {
    o.require_hermitian("expectation object observable")?;
    let (_, residual) = algebra.project_member(m)?;
    if residual > MEMBERSHIP_TOL {
        return Err(CoreError::Contract {
            context: "expectation pointer observable (outside commutative algebra)",
            residual,
            tolerance: MEMBERSHIP_TOL,
        });
    }
    Ok(state.phi().expectation(&tensor(o, m)?))
}

/// Unconditional object expectation `E(O) = E(O ⊗ I)`.
pub fn expect_object(state: &EvolvedState, o: &OperatorMatrix) -> Result<f64> {
    o.require_hermitian("expect_object observable")?;
    let identity = OperatorMatrix::identity(state.apparatus_dim());
    Ok(state.phi().expectation(&tensor(o, &identity)?))
}

/// Cell weight `w_α(t) = E(I ⊗ Π_α)`.
pub fn pointer_weight(state: &EvolvedState, algebra: &MacroAlgebra, alpha: usize) -> Result<f64> {
    let pi = algebra.projector(alpha)?;
    let identity = OperatorMatrix::identity(state.n());
    Ok(state.phi().expectation(&tensor(&identity, pi)?))
}

/// Weights of all cells `α = 0..=ν`.
pub fn pointer_weights(state: &EvolvedState, algebra: &MacroAlgebra) -> Result<Vec<f64>> {
    (0..=algebra.nu())
        .map(|alpha| pointer_weight(state, algebra, alpha))
        .collect()
}

/// Conditional expectation of `o` on one cell.
#[derive(Debug, Clone)]
pub struct CellExpectation {
    pub alpha: usize,
    pub weight: f64,
    /// `E(O ⊗ Π_α) / w_α`; `None` when the cell weight is below the floor
    /// (an empty cell carries no conditional information — that is data,
    /// not an error).
    pub value: Option<f64>,
}

/// Conditional expectation of `o` given the pointer algebra, cell by cell.
///
/// The full functional `Σ_α value_α · Π_α` satisfies the defining identity
/// `E(E(O|ℳ)·M) = E(O ⊗ M)` for every member `M` of the algebra.
pub fn conditional_expectation(
    state: &EvolvedState,
    o: &OperatorMatrix,
    algebra: &MacroAlgebra,
) -> Result<Vec<CellExpectation>> {
    o.require_hermitian("conditional_expectation observable")?;
    let mut out = Vec::with_capacity(algebra.nu() + 1);
    for alpha in 0..=algebra.nu() {
        let weight = pointer_weight(state, algebra, alpha)?;
        let value = if weight > W_FLOOR {
            let pi = algebra.projector(alpha)?;
            let joint = state.phi().expectation(&tensor(o, pi)?);
            Some(joint / weight)
        } else {
            None
        };
        out.push(CellExpectation {
            alpha,
            weight,
            value,
        });
    }
    Ok(out)
}

/// Residual matrix of the pointer conditions at `t = τ`.
#[derive(Debug, Clone)]
pub struct MeasurementConditionsReport {
    pub pass: bool,
    /// `max_{r,β} |F_{r,r;β}(τ) − δ_{σ(r),β}|`.
    pub max_residual: f64,
    /// Residuals `[r][β]`, `β = 0..=ν`.
    pub residuals: Vec<Vec<f64>>,
    /// `max_{r≠s, α} |F_{r,s;α}(τ)|` — the cross terms the conditions kill.
    pub max_cross: f64,
    pub tolerance: f64,
}

/// Checks that at `t = τ` every diagonal block sits entirely in its
/// assigned cell. Failure is a report outcome, not an error.
pub fn verify_measurement_conditions(model: &SewellModel) -> Result<MeasurementConditionsReport> {
    let state = evolve(model, model.tau())?;
    let algebra = model.apparatus().macro_algebra();
    let n = model.object().n();
    let mut residuals = Vec::with_capacity(n);
    let mut max_residual = 0.0_f64;
    for r in 0..n {
        let target = algebra.sigma(r)?;
        let mut row = Vec::with_capacity(algebra.nu() + 1);
        for beta in 0..=algebra.nu() {
            let f = f_coeff(&state, algebra, r, r, beta)?;
            let expected = if beta == target { 1.0 } else { 0.0 };
            let residual = (f - Complex64::new(expected, 0.0)).norm();
            max_residual = max_residual.max(residual);
            row.push(residual);
        }
        residuals.push(row);
    }
    let mut max_cross = 0.0_f64;
    for r in 0..n {
        for s in 0..n {
            if r == s {
                continue;
            }
            for alpha in 0..=algebra.nu() {
                max_cross = max_cross.max(f_coeff(&state, algebra, r, s, alpha)?.norm());
            }
        }
    }
    Ok(MeasurementConditionsReport {
        pass: max_residual <= COND_TOL,
        max_residual,
        residuals,
        max_cross,
        tolerance: COND_TOL,
    })
}

/// Per-cell collapse data.
#[derive(Debug, Clone)]
pub struct CollapseCell {
    pub alpha: usize,
    /// Object eigenindex `σ⁻¹(α)`.
    pub r: usize,
    pub weight: f64,
    /// `|c_{σ⁻¹(α)}|²` — what the weight must equal.
    pub weight_target: f64,
    pub conditional: Option<f64>,
    /// `λ_{σ⁻¹(α)}` — what the conditional expectation must equal.
    pub conditional_target: f64,
}

/// Eigenstate-preparation special case: the final state factorizes as
/// `P_[u_k] ⊗ Ω_{k,k}(τ)`.
#[derive(Debug, Clone)]
pub struct EigenstateCase {
    pub k: usize,
    /// Entrywise distance of `Φ(τ)` from the product form.
    pub product_residual: f64,
}

/// Collapse summary at `t = τ`.
#[derive(Debug, Clone)]
pub struct CollapseReport {
    /// `E(O)` at τ.
    pub unconditional: f64,
    /// `Σ_r λ_r |c_r|²`.
    pub unconditional_expected: f64,
    pub cells: Vec<CollapseCell>,
    /// Weight left in the rest cell (should be ≈ 0 after the coupling).
    pub rest_weight: f64,
    pub eigenstate_case: Option<EigenstateCase>,
}

/// Builds the collapse report; requires the measurement conditions to PASS.
pub fn collapse_report(model: &SewellModel) -> Result<CollapseReport> {
    let conditions = verify_measurement_conditions(model)?;
    if !conditions.pass {
        return Err(CoreError::Contract {
            context: "collapse_report (measurement conditions not met)",
            residual: conditions.max_residual,
            tolerance: conditions.tolerance,
        });
    }
    let state = evolve(model, model.tau())?;
    let algebra = model.apparatus().macro_algebra();
    let o = model.object().observable();
    let unconditional = expect_object(&state, &o)?;
    let unconditional_expected: f64 = model
        .object()
        .lambdas()
        .iter()
        .zip(model.object().amplitudes())
        .map(|(l, c)| l * c.norm_sqr())
        .sum();
    let conditionals = conditional_expectation(&state, &o, algebra)?;
    let mut cells = Vec::new();
    for cell in &conditionals {
        if cell.alpha == 0 {
            continue;
        }
        if let Some(r) = algebra.sigma_inverse(cell.alpha) {
            cells.push(CollapseCell {
                alpha: cell.alpha,
                r,
                weight: cell.weight,
                weight_target: model.object().amplitudes()[r].norm_sqr(),
                conditional: cell.value,
                conditional_target: model.object().lambdas()[r],
            });
        }
    }
    let rest_weight = conditionals[0].weight;

    let eigenstate_case = model.object().eigenstate_index().map(|k| {
        let block = state.omega_block(k, k).expect("k < n");
        let product = tensor(
            &model.object().eigenstate(k).expect("k < n").projector(),
            block,
        )
        .expect("dims fixed by model");
        let product_residual = state.phi().op().sub(&product).max_abs();
        EigenstateCase {
            k,
            product_residual,
        }
    });

    Ok(CollapseReport {
        unconditional,
        unconditional_expected,
        cells,
        rest_weight,
        eigenstate_case,
    })
}

/// Joint pointer statistics of two successive measurements.
#[derive(Debug, Clone)]
pub struct TwoStageReport {
    /// `P(α₁, α₂)` over all cells of both apparatuses (index 0 = rest).
    pub joint: Vec<Vec<f64>>,
    /// Per object index `r`: `(P(σ₁(r), σ₂(r)), |c_r|²)`.
    pub diagonal: Vec<(f64, f64)>,
    /// Total mass off the conserved diagonal `α₂ = σ₂(σ₁⁻¹(α₁))`.
    pub off_diagonal_mass: f64,
    /// Marginal over the second pointer; equals the single-stage weights.
    pub marginal_first: Vec<f64>,
}

/// Runs the same measurement twice with independent apparatuses: coupling 1
/// during `(0, τ₁)`, coupling 2 during `(τ₁, τ₁+τ₂)`.
///
/// Conservation forces the joint distribution onto the diagonal
/// `α₂ = σ₂(σ₁⁻¹(α₁))`: a second measurement of the same conserved
/// observable must agree with the first.
pub fn two_stage_measurement(
    model: &SewellModel,
    second: &ApparatusSpec,
    tau2: f64,
) -> Result<TwoStageReport> {
    let n = model.object().n();
    let n1 = model.apparatus().dim();
    let n2 = second.dim();
    let total = n
        .checked_mul(n1)
        .and_then(|d| d.checked_mul(n2))
        .unwrap_or(usize::MAX);
    if total > MAX_TENSOR_DIM {
        return Err(CoreError::Capacity {
            requested: total,
            max: MAX_TENSOR_DIM,
        });
    }

    // Both apparatuses must implement a measurement of this object.
    let first_check = verify_measurement_conditions(model)?;
    if !first_check.pass {
        return Err(CoreError::Contract {
            context: "two_stage_measurement (first apparatus conditions)",
            residual: first_check.max_residual,
            tolerance: first_check.tolerance,
        });
    }
    let second_model = assemble_model(model.object().clone(), second.clone(), tau2)?;
    let second_check = verify_measurement_conditions(&second_model)?;
    if !second_check.pass {
        return Err(CoreError::Contract {
            context: "two_stage_measurement (second apparatus conditions)",
            residual: second_check.max_residual,
            tolerance: second_check.tolerance,
        });
    }

    let alg1 = model.apparatus().macro_algebra();
    let alg2 = second.macro_algebra();

    // Only the diagonal blocks contribute to pointer statistics; evolve
    // Ω₁⊗Ω₂ through both stages per object index. Stage generators split
    // into commuting factors, so each stage propagator is a Kronecker
    // product of single-apparatus propagators.
    let omega12 = tensor(
        model.apparatus().rest_state().op(),
        second.rest_state().op(),
    )?;
    let mut joint = vec![vec![0.0; alg2.nu() + 1]; alg1.nu() + 1];
    let mut per_r_joint = Vec::with_capacity(n);
    for r in 0..n {
        let weight = model.object().amplitudes()[r].norm_sqr();
        let u_stage1 = tensor(
            &model.propagator(r, model.tau())?,
            &second_model.free_propagator(r, model.tau())?,
        )?;
        // The object energy phase is already carried by the first factor's
        // propagator in stage 1 and by the second apparatus' coupled
        // propagator in stage 2; conjugation cancels any duplicated global
        // phase on diagonal blocks.
        let u_stage2 = tensor(
            &model.free_propagator(r, tau2)?,
            &second_model.propagator(r, tau2)?,
        )?;
        let u_total = u_stage1.matmul(&u_stage2);
        let evolved = omega12.conjugate_by(&u_total);
        let mut row = vec![vec![0.0; alg2.nu() + 1]; alg1.nu() + 1];
        for a1 in 0..=alg1.nu() {
            for a2 in 0..=alg2.nu() {
                let pp = tensor(alg1.projector(a1)?, alg2.projector(a2)?)?;
                let p = evolved.trace_product(&pp).re * weight;
                row[a1][a2] = p;
                joint[a1][a2] += p;
            }
        }
        per_r_joint.push(row);
    }

    let mut diagonal = Vec::with_capacity(n);
    let mut diag_mass = 0.0;
    for r in 0..n {
        let a1 = alg1.sigma(r)?;
        let a2 = alg2.sigma(r)?;
        let p = joint[a1][a2];
        diag_mass += p;
        diagonal.push((p, model.object().amplitudes()[r].norm_sqr()));
    }
    let total_mass: f64 = joint.iter().flatten().sum();
    let off_diagonal_mass = total_mass - diag_mass;
    let marginal_first = joint
        .iter()
        .map(|row| row.iter().sum::<f64>())
        .collect::<Vec<f64>>();

    Ok(TwoStageReport {
        joint,
        diagonal,
        off_diagonal_mass,
        marginal_first,
    })
}

/// Reversal analysis after a collapse to eigenindex `j`.
#[derive(Debug, Clone)]
pub struct ReverseReport {
    pub j: usize,
    /// The reversed state `U⁽ʲ⁾(τ) · Φ⁽ʲ⁾(τ) · U⁽ʲ⁾†(τ)`.
    pub reversed: DensityMatrix,
    /// Trace distance of the reversed apparatus factor from the rest state
    /// (zero: the apparatus retraces its path).
    pub apparatus_distance_to_rest: f64,
    /// Trace distance of the reversed object factor from `P_[u_j]`
    /// (zero: the object stays collapsed).
    pub object_distance_to_eigenstate: f64,
    /// Trace distance of the reversed object factor from the prepared
    /// object state — the collapse left behind.
    pub object_distance_to_initial: f64,
    /// Trace distance of the full reversed state from `Φ(0)`.
    pub distance_to_initial: f64,
}

/// Runs the post-collapse state `P_[u_j] ⊗ Ω_{j,j}(τ)` backwards through
/// the coupling and compares against the preparation.
///
/// The apparatus factor returns exactly to the rest state while the object
/// factor stays at `u_j`; for superposed preparations the reversed state
/// therefore differs from `Φ(0)` — the collapse is irreversible.
pub fn reverse_evolution(model: &SewellModel, j: usize) -> Result<ReverseReport> {
    let n = model.object().n();
    if j >= n {
        return Err(CoreError::Index {
            context: "reverse_evolution eigenindex",
            index: j,
            size: n,
        });
    }
    let big_n = model.apparatus().dim();
    let state = evolve(model, model.tau())?;
    let block = state.omega_block(j, j)?;
    let collapsed = DensityMatrix::new(tensor(
        &model.object().eigenstate(j)?.projector(),
        block,
    )?)?;
    // The reduced reversal operator P_[u_j] ⊗ U_j(τ) acts identically to
    // the full propagator on states supported in block j.
    let u_rev = tensor(
        &model.object().eigenstate(j)?.projector(),
        &model.propagator(j, model.tau())?,
    )?;
    let reversed = DensityMatrix::new(
        u_rev.matmul(collapsed.op()).matmul(&u_rev.adjoint()),
    )?;

    let initial = model.initial_state();
    let rev_object = partial_trace(&reversed, (n, big_n), Factor::Object)?;
    let rev_apparatus = partial_trace(&reversed, (n, big_n), Factor::Apparatus)?;
    let initial_object = partial_trace(&initial, (n, big_n), Factor::Object)?;

    let apparatus_distance_to_rest =
        trace_distance(&rev_apparatus, model.apparatus().rest_state())?;
    let eigen_proj =
        DensityMatrix::new(model.object().eigenstate(j)?.projector())?;
    let object_distance_to_eigenstate = trace_distance(&rev_object, &eigen_proj)?;
    let object_distance_to_initial = trace_distance(&rev_object, &initial_object)?;
    let distance_to_initial = trace_distance(&reversed, &initial)?;

    Ok(ReverseReport {
        j,
        reversed,
        apparatus_distance_to_rest,
        object_distance_to_eigenstate,
        object_distance_to_initial,
        distance_to_initial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sewell::apparatus::{build_pointer_apparatus, HaMode};
    use crate::sewell::object::ObjectSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn golden_model(cell_dim: usize, tau: f64) -> SewellModel {
        let object = ObjectSpec::with_zero_energies(
            vec![1.0, -1.0],
            vec![c(0.3_f64.sqrt(), 0.0), c(0.7_f64.sqrt(), 0.0)],
        )
        .unwrap();
        let apparatus = build_pointer_apparatus(2, cell_dim, tau, HaMode::Zero).unwrap();
        assemble_model(object, apparatus, tau).unwrap()
    }

    #[test]
    fn f_coefficients_at_rest_and_after_coupling() {
        let model = golden_model(2, 1.0);
        let algebra = model.apparatus().macro_algebra();
        let at_zero = evolve(&model, 0.0).unwrap();
        for r in 0..2 {
            assert!((f_coeff(&at_zero, algebra, r, r, 0).unwrap().re - 1.0).abs() < 1e-14);
            for alpha in 1..=2 {
                assert!(f_coeff(&at_zero, algebra, r, r, alpha).unwrap().norm() < 1e-14);
            }
        }
        let at_tau = evolve(&model, 1.0).unwrap();
        for r in 0..2 {
            let target = algebra.sigma(r).unwrap();
            let f = f_coeff(&at_tau, algebra, r, r, target).unwrap();
            assert!((f.re - 1.0).abs() < 1e-10, "F_rr;σ(r) = {f}");
        }
    }

    #[test]
    fn diagonal_f_is_cauchy_schwarz_bounded() {
        // Oracle: explicit matrices at an intermediate time.
        let model = golden_model(2, 1.0);
        let algebra = model.apparatus().macro_algebra();
        let state = evolve(&model, 0.37).unwrap();
        for alpha in 0..=2 {
            let f00 = f_coeff(&state, algebra, 0, 0, alpha).unwrap().re;
            let f11 = f_coeff(&state, algebra, 1, 1, alpha).unwrap().re;
            let f01 = f_coeff(&state, algebra, 0, 1, alpha).unwrap().norm();
            assert!(f00 * f11 >= f01 * f01 - 1e-12);
            assert!((-1e-12..=1.0 + 1e-12).contains(&f00));
        }
    }

    #[test]
    fn unconditional_expectation_is_conserved() {
        let model = golden_model(2, 1.0);
        let o = model.object().observable();
        let expected = 0.3 - 0.7;
        for t in [0.0, 0.5, 1.0, 2.0] {
            let state = evolve(&model, t).unwrap();
            let e = expect_object(&state, &o).unwrap();
            assert!((e - expected).abs() < 1e-10, "E(O) at t={t} was {e}");
        }
    }

    #[test]
    fn pointer_weights_resolve_unity() {
        let model = golden_model(3, 0.8);
        for t in [0.0, 0.3, 0.8, 1.6] {
            let state = evolve(&model, t).unwrap();
            let weights = pointer_weights(&state, model.apparatus().macro_algebra()).unwrap();
            let total: f64 = weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_rejects_non_members() {
        let model = golden_model(2, 1.0);
        let state = evolve(&model, 0.5).unwrap();
        let mut data = ndarray::Array2::zeros((6, 6));
        data[(0, 2)] = c(1.0, 0.0);
        data[(2, 0)] = c(1.0, 0.0);
        let m = OperatorMatrix::from_array(data).unwrap();
        let err = expectation(
            &state,
            &model.object().observable(),
            &m,
            model.apparatus().macro_algebra(),
        )
        .unwrap_err();
        assert!(matches!(err, CoreError::Contract { .. }));
    }

    #[test]
    fn conditional_expectation_satisfies_defining_identity() {
        let model = golden_model(2, 1.0);
        let algebra = model.apparatus().macro_algebra();
        let state = evolve(&model, 1.0).unwrap();
        let o = model.object().observable();
        let cells = conditional_expectation(&state, &o, algebra).unwrap();

        // E(I | K_α) = 1 on every populated cell.
        let id = OperatorMatrix::identity(2);
        for cell in conditional_expectation(&state, &id, algebra).unwrap() {
            if let Some(v) = cell.value {
                assert!((v - 1.0).abs() < 1e-10);
            }
        }

        // Defining identity E(E(O|ℳ)·M) = E(O⊗M) for randomized members.
        let mut seed = 0x2545F4914F6CDD1D_u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..10 {
            let coeffs: Vec<f64> = (0..=algebra.nu()).map(|_| next()).collect();
            let m = algebra.member(&coeffs).unwrap();
            // E(E(O|ℳ)·M) = Σ_α f_α coeff_α w_α for members of the algebra.
            let lhs: f64 = cells
                .iter()
                .map(|cell| cell.value.unwrap_or(0.0) * coeffs[cell.alpha] * cell.weight)
                .sum();
            let rhs = expectation(&state, &o, &m, algebra).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "identity residual {}", lhs - rhs);
        }
    }

    #[test]
    fn dual_route_conditional_expectation_agrees() {
        // Independent route: solve the defining identity on the algebra by
        // taking M = Π_β, which isolates f_β · w_β = E(O ⊗ Π_β).
        let model = golden_model(2, 1.0);
        let algebra = model.apparatus().macro_algebra();
        let state = evolve(&model, 0.41).unwrap();
        let o = model.object().observable();
        let cells = conditional_expectation(&state, &o, algebra).unwrap();
        for cell in &cells {
            if cell.weight <= W_FLOOR {
                continue;
            }
            let pi = algebra.projector(cell.alpha).unwrap();
            let joint = state.phi().expectation(&tensor(&o, pi).unwrap());
            let solved = joint / cell.weight;
            assert!((solved - cell.value.unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn measurement_conditions_pass_for_canonical_apparatus() {
        let model = golden_model(2, 1.0);
        let report = verify_measurement_conditions(&model).unwrap();
        assert!(report.pass);
        assert!(report.max_residual <= 1e-12, "residual {:e}", report.max_residual);
        assert!(report.max_cross <= 1e-10);
    }

    #[test]
    fn measurement_conditions_fail_without_coupling() {
        let object = ObjectSpec::with_zero_energies(
            vec![1.0, -1.0],
            vec![c(0.3_f64.sqrt(), 0.0), c(0.7_f64.sqrt(), 0.0)],
        )
        .unwrap();
        let apparatus = build_pointer_apparatus(2, 2, 1.0, HaMode::Zero)
            .unwrap()
            .with_zero_couplings();
        let model = assemble_model(object, apparatus, 1.0).unwrap();
        let report = verify_measurement_conditions(&model).unwrap();
        assert!(!report.pass);
        // The pointer never leaves the rest cell.
        assert!((report.residuals[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collapse_report_matches_hand_values() {
        let model = golden_model(2, 1.0);
        let report = collapse_report(&model).unwrap();
        assert!((report.unconditional - (-0.4)).abs() < 1e-10);
        assert!((report.unconditional_expected - (-0.4)).abs() < 1e-12);
        for cell in &report.cells {
            let cond = cell.conditional.unwrap();
            assert!(
                (cond - cell.conditional_target).abs() < 1e-10,
                "cell {} conditional {} target {}",
                cell.alpha,
                cond,
                cell.conditional_target
            );
            assert!((cell.weight - cell.weight_target).abs() < 1e-10);
        }
        assert!(report.rest_weight < 1e-10);
        assert!(report.eigenstate_case.is_none());
    }

    #[test]
    fn collapse_report_requires_conditions() {
        let object = ObjectSpec::with_zero_energies(
            vec![1.0, -1.0],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let apparatus = build_pointer_apparatus(2, 1, 1.0, HaMode::Zero)
            .unwrap()
            .with_zero_couplings();
        let model = assemble_model(object, apparatus, 1.0).unwrap();
        assert!(collapse_report(&model).is_err());
    }

    #[test]
    fn eigenstate_input_collapse_is_product() {
        let object = ObjectSpec::with_zero_energies(
            vec![1.0, -1.0],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let apparatus = build_pointer_apparatus(2, 2, 1.0, HaMode::Zero).unwrap();
        let model = assemble_model(object, apparatus, 1.0).unwrap();
        let report = collapse_report(&model).unwrap();
        let case = report.eigenstate_case.unwrap();
        assert_eq!(case.k, 1);
        assert!(case.product_residual < 1e-12);
    }

    #[test]
    fn two_stage_reproduces_amplitude_statistics() {
        let model = golden_model(1, 1.0);
        let second = build_pointer_apparatus(2, 1, 0.5, HaMode::Zero).unwrap();
        let report = two_stage_measurement(&model, &second, 0.5).unwrap();
        assert!(report.off_diagonal_mass.abs() < 1e-10);
        let expected = [0.3, 0.7];
        for (r, (p, c_sq)) in report.diagonal.iter().enumerate() {
            assert!((p - expected[r]).abs() < 1e-10);
            assert!((c_sq - expected[r]).abs() < 1e-12);
        }
        // Marginal over the second pointer equals single-stage weights.
        let state = evolve(&model, 1.0).unwrap();
        let weights = pointer_weights(&state, model.apparatus().macro_algebra()).unwrap();
        for alpha in 0..=2 {
            assert!((report.marginal_first[alpha] - weights[alpha]).abs() < 1e-10);
        }
    }

    #[test]
    fn two_stage_eigenstate_is_deterministic() {
        let object = ObjectSpec::with_zero_energies(
            vec![1.0, -1.0],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let apparatus = build_pointer_apparatus(2, 1, 1.0, HaMode::Zero).unwrap();
        let model = assemble_model(object, apparatus, 1.0).unwrap();
        let second = build_pointer_apparatus(2, 2, 0.7, HaMode::Zero).unwrap();
        let report = two_stage_measurement(&model, &second, 0.7).unwrap();
        assert!((report.diagonal[0].0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reversal_restores_apparatus_but_not_object() {
        let s = 0.5_f64.sqrt();
        let object =
            ObjectSpec::with_zero_energies(vec![1.0, -1.0], vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        let apparatus = build_pointer_apparatus(2, 2, 1.0, HaMode::Zero).unwrap();
        let model = assemble_model(object, apparatus, 1.0).unwrap();
        let report = reverse_evolution(&model, 0).unwrap();
        assert!(report.apparatus_distance_to_rest < 1e-10);
        assert!(report.object_distance_to_eigenstate < 1e-10);
        // Hand value for pure states: √(1 − |⟨u_j, ψ⟩|²) = 1/√2.
        assert!((report.object_distance_to_initial - 0.5_f64.sqrt()).abs() < 1e-10);
        assert!(report.distance_to_initial > 0.1);
    }

    #[test]
    fn reversal_index_is_checked() {
        let model = golden_model(1, 1.0);
        assert!(matches!(
            reverse_evolution(&model, 5).unwrap_err(),
            CoreError::Index { .. }
        ));
    }
}
