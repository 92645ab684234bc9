//! Malfunction probability of a scheme and the variance lower bound on it.

use crate::error::{CoreError, Result};
use crate::insolubility::scheme::{ConservedQuantity, MeasurementScheme};
use crate::qalgebra::{commutator, tensor, OperatorMatrix};

/// Conservation residual allowed for the bound check's hypothesis.
const CONSERVATION_TOL: f64 = 1e-10;

/// Slack granted to the bound comparison.
const BOUND_SLACK: f64 = 1e-10;

/// Apparatus variances below this count as zero (degenerate bound).
const M_SQUARED_FLOOR: f64 = 1e-12;

/// Malfunction statistics of a scheme.
///
/// `success_μ` is the probability that the pointer lands in cell `σ(μ)`
/// when the object is prepared in eigenstate `u_μ`. The headline `epsilon`
/// is the worst case over eigenstates; the input-averaged value is
/// reported alongside since the literature does not fix the convention.
#[derive(Debug, Clone)]
pub struct MalfunctionReport {
    /// `max_μ (1 − success_μ)`.
    pub epsilon: f64,
    /// `mean_μ (1 − success_μ)`.
    pub epsilon_mean: f64,
    /// `(μ, success_μ)` per eigenstate.
    pub per_eigenstate: Vec<(usize, f64)>,
    /// Apparatus variance `(ξ, (L⁽ᵃ⁾)² ξ)`; filled by the bound check.
    pub m_squared: Option<f64>,
    /// `1/(8·M²)`; `None` when `M² = 0` (the bound degenerates).
    pub bound: Option<f64>,
}

/// Computes the malfunction probability of a scheme.
pub fn malfunction_epsilon(scheme: &MeasurementScheme) -> Result<MalfunctionReport> {
    let n = scheme.object_dim();
    let identity_obj = OperatorMatrix::identity(n);
    let mut per_eigenstate = Vec::with_capacity(n);
    let mut worst = 0.0_f64;
    let mut mean = 0.0_f64;
    for mu in 0..n {
        let u_mu = scheme.eigenstate(mu)?;
        let final_state = scheme.apply(&u_mu.projector())?;
        let target = scheme.pointer().sigma(mu)?;
        let registered = tensor(&identity_obj, scheme.pointer().projector(target)?)?;
        let success = final_state.trace_product(&registered).re;
        worst = worst.max(1.0 - success);
        mean += (1.0 - success) / n as f64;
        per_eigenstate.push((mu, success));
    }
    Ok(MalfunctionReport {
        epsilon: worst,
        epsilon_mean: mean,
        per_eigenstate,
        m_squared: None,
        bound: None,
    })
}

/// Outcome of the variance-bound comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YanaseVerdict {
    /// `ε ≥ 1/(8M²)` within slack.
    Satisfied,
    /// The bound failed — would falsify the lower-bound claim.
    Violated,
    /// `M² = 0`: the bound is infinite and the scheme necessarily fails;
    /// flagged rather than errored.
    Degenerate,
    /// The observable commutes with the conserved quantity, so the bound's
    /// hypothesis is unmet and the check is skipped.
    NotApplicable,
}

/// Bound-check report.
#[derive(Debug, Clone)]
pub struct YanaseReport {
    pub verdict: YanaseVerdict,
    pub malfunction: MalfunctionReport,
    /// `‖[A⁽ᵒ⁾, L⁽ᵒ⁾]‖` — must be nonzero for the bound to apply.
    pub commutation_residual: f64,
    /// `‖U L U† − L‖` — the scheme must actually conserve `L`.
    pub conservation_residual: f64,
}

/// Checks `ε ≥ 1/(8M²)` for a conserving scheme measuring a qubit
/// observable that fails to commute with the conserved quantity, where
/// `M² = (ξ, (L⁽ᵃ⁾)²ξ)` is the apparatus variance reserve (ħ = 1).
pub fn yanase_bound_check(
    scheme: &MeasurementScheme,
    l: &ConservedQuantity,
) -> Result<YanaseReport> {
    if scheme.object_dim() != 2 {
        return Err(CoreError::Shape {
            context: "yanase_bound_check object (qubit observables only)",
            got: scheme.object_dim(),
            expected: 2,
        });
    }
    let commutation_residual = commutator(scheme.object_observable(), l.object_part()).max_abs();
    let conservation_residual = l.conservation_residual(scheme.unitary())?;

    if commutation_residual <= 1e-12 {
        let malfunction = malfunction_epsilon(scheme)?;
        return Ok(YanaseReport {
            verdict: YanaseVerdict::NotApplicable,
            malfunction,
            commutation_residual,
            conservation_residual,
        });
    }
    if conservation_residual > CONSERVATION_TOL {
        return Err(CoreError::Contract {
            context: "yanase_bound_check (unitary does not conserve L)",
            residual: conservation_residual,
            tolerance: CONSERVATION_TOL,
        });
    }

    let l_a = l.apparatus_part();
    let l_a_sq = l_a.matmul(l_a);
    let m_squared = scheme.initial_apparatus().expectation(&l_a_sq);
    let mut malfunction = malfunction_epsilon(scheme)?;
    malfunction.m_squared = Some(m_squared);

    if m_squared < M_SQUARED_FLOOR {
        return Ok(YanaseReport {
            verdict: YanaseVerdict::Degenerate,
            malfunction,
            commutation_residual,
            conservation_residual,
        });
    }
    let bound = (8.0 * m_squared).recip();
    malfunction.bound = Some(bound);
    let verdict = if malfunction.epsilon >= bound - BOUND_SLACK {
        YanaseVerdict::Satisfied
    } else {
        YanaseVerdict::Violated
    };
    Ok(YanaseReport {
        verdict,
        malfunction,
        commutation_residual,
        conservation_residual,
    })
}
