//! Apparatus construction: rest state, cell algebra, free Hamiltonian, and
//! the per-eigenvalue couplings.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::qalgebra::{DensityMatrix, OperatorMatrix};
use crate::sewell::macro_algebra::MacroAlgebra;
use crate::tolerances::{MAX_TENSOR_DIM, TOL_NORM};

/// Choice of apparatus free Hamiltonian for the canonical construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaMode {
    /// `H⁽ᵃ⁾ = 0`.
    Zero,
    /// A nonzero ladder repeated identically in every cell; commutes with
    /// all cell projectors and all couplings, so the pointer conditions
    /// still hold exactly at `t = τ`.
    CellCommuting,
}

/// Apparatus-side data: pointer algebra, rest state supported in the rest
/// cell, free Hamiltonian, and one Hermitian coupling per object index.
#[derive(Debug, Clone)]
pub struct ApparatusSpec {
    macro_algebra: MacroAlgebra,
    omega0: DensityMatrix,
    h_a: OperatorMatrix,
    couplings: Vec<OperatorMatrix>,
}

impl ApparatusSpec {
    pub fn new(
        macro_algebra: MacroAlgebra,
        omega0: DensityMatrix,
        h_a: OperatorMatrix,
        couplings: Vec<OperatorMatrix>,
    ) -> Result<Self> {
        let dim = macro_algebra.apparatus_dim();
        if omega0.dim() != dim {
            return Err(CoreError::Shape {
                context: "ApparatusSpec rest state dimension",
                got: omega0.dim(),
                expected: dim,
            });
        }
        if h_a.dim() != dim {
            return Err(CoreError::Shape {
                context: "ApparatusSpec free Hamiltonian dimension",
                got: h_a.dim(),
                expected: dim,
            });
        }
        h_a.require_hermitian("ApparatusSpec free Hamiltonian")?;
        for v in &couplings {
            if v.dim() != dim {
                return Err(CoreError::Shape {
                    context: "ApparatusSpec coupling dimension",
                    got: v.dim(),
                    expected: dim,
                });
            }
            v.require_hermitian("ApparatusSpec coupling")?;
        }
        // The rest state must live entirely in cell 0: Π₀ Ω Π₀ = Ω.
        let pi0 = macro_algebra.projector(0)?;
        let residual = pi0
            .matmul(omega0.op())
            .matmul(pi0)
            .sub(omega0.op())
            .max_abs();
        if residual > TOL_NORM {
            return Err(CoreError::Invariant {
                label: "rest_state_in_rest_cell",
                residual,
                tolerance: TOL_NORM,
            });
        }
        Ok(Self {
            macro_algebra,
            omega0,
            h_a,
            couplings,
        })
    }

    pub fn dim(&self) -> usize {
        self.macro_algebra.apparatus_dim()
    }

    pub fn macro_algebra(&self) -> &MacroAlgebra {
        &self.macro_algebra
    }

    pub fn rest_state(&self) -> &DensityMatrix {
        &self.omega0
    }

    pub fn free_hamiltonian(&self) -> &OperatorMatrix {
        &self.h_a
    }

    pub fn couplings(&self) -> &[OperatorMatrix] {
        &self.couplings
    }

    /// Same apparatus with all couplings replaced by zero (no interaction).
    pub fn with_zero_couplings(&self) -> Self {
        let dim = self.dim();
        Self {
            macro_algebra: self.macro_algebra.clone(),
            omega0: self.omega0.clone(),
            h_a: self.h_a.clone(),
            couplings: vec![OperatorMatrix::zeros(dim); self.couplings.len()],
        }
    }
}

/// The canonical pointer apparatus for an `n`-level object.
///
/// `n + 1` cells of equal dimension (`cell 0` rests, `σ(r) = r + 1`), the
/// rest state maximally mixed on cell 0, and couplings
/// `V_r = (π / 2τ) · G_r` where `G_r` swaps cell 0 with cell `σ(r)`
/// fiberwise. At `t = τ` the induced rotation has turned the rest state
/// fully into cell `σ(r)`, so the pointer conditions hold exactly.
pub fn build_pointer_apparatus(
    n: usize,
    cell_dim: usize,
    tau: f64,
    h_a_mode: HaMode,
) -> Result<ApparatusSpec> {
    let weight = (cell_dim as f64).recip();
    build_pointer_apparatus_with_rest(n, cell_dim, tau, h_a_mode, &vec![weight; cell_dim])
}

/// Canonical pointer apparatus with a configurable rest-state spectrum on
/// cell 0 (weights must form a probability vector of length `cell_dim`).
pub fn build_pointer_apparatus_with_rest(
    n: usize,
    cell_dim: usize,
    tau: f64,
    h_a_mode: HaMode,
    rest_weights: &[f64],
) -> Result<ApparatusSpec> {
    if n < 2 {
        return Err(CoreError::Shape {
            context: "pointer apparatus object dimension",
            got: n,
            expected: 2,
        });
    }
    if cell_dim == 0 {
        return Err(CoreError::Shape {
            context: "pointer apparatus cell dimension",
            got: 0,
            expected: 1,
        });
    }
    if tau <= 0.0 {
        return Err(CoreError::Contract {
            context: "pointer apparatus coupling window (τ > 0)",
            residual: tau,
            tolerance: 0.0,
        });
    }
    if rest_weights.len() != cell_dim {
        return Err(CoreError::Shape {
            context: "pointer apparatus rest-state weights",
            got: rest_weights.len(),
            expected: cell_dim,
        });
    }
    let dim = (n + 1) * cell_dim;
    if dim > MAX_TENSOR_DIM {
        return Err(CoreError::Capacity {
            requested: dim,
            max: MAX_TENSOR_DIM,
        });
    }

    let cells: Vec<Vec<usize>> = (0..=n)
        .map(|alpha| (alpha * cell_dim..(alpha + 1) * cell_dim).collect())
        .collect();
    let pointer_values: Vec<f64> = (1..=n).map(|alpha| alpha as f64).collect();
    let sigma: Vec<usize> = (1..=n).collect();
    let macro_algebra = MacroAlgebra::from_index_partition(dim, &cells, pointer_values, sigma)?;

    let mut rest_diag = vec![0.0; dim];
    rest_diag[..cell_dim].copy_from_slice(rest_weights);
    let omega0 = DensityMatrix::new(OperatorMatrix::diag(&rest_diag))?;

    let h_a = match h_a_mode {
        HaMode::Zero => OperatorMatrix::zeros(dim),
        HaMode::CellCommuting => {
            // Identical intra-cell ladder in every cell: commutes with each
            // Π_α and with every fiberwise swap generator.
            let mut diag = vec![0.0; dim];
            for alpha in 0..=n {
                for k in 0..cell_dim {
                    diag[alpha * cell_dim + k] = k as f64;
                }
            }
            OperatorMatrix::diag(&diag)
        }
    };

    let angle = std::f64::consts::FRAC_PI_2 / tau;
    let couplings: Vec<OperatorMatrix> = (0..n)
        .map(|r| {
            let target = r + 1;
            let mut data = ndarray::Array2::zeros((dim, dim));
            for k in 0..cell_dim {
                let a = k; // cell 0, fiber k
                let b = target * cell_dim + k;
                data[(a, b)] = Complex64::new(angle, 0.0);
                data[(b, a)] = Complex64::new(angle, 0.0);
            }
            OperatorMatrix::from_array(data).expect("square by construction")
        })
        .collect();

    ApparatusSpec::new(macro_algebra, omega0, h_a, couplings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::expm_hermitian;

    #[test]
    fn minimal_pointer_apparatus_shape() {
        let app = build_pointer_apparatus(2, 1, 1.0, HaMode::Zero).unwrap();
        assert_eq!(app.dim(), 3);
        for alpha in 0..=2 {
            assert_eq!(app.macro_algebra().cell_dim(alpha).unwrap(), 1);
        }
        // Rest-state weights: all mass in cell 0.
        for alpha in 0..=2 {
            let pi = app.macro_algebra().projector(alpha).unwrap();
            let w = app.rest_state().expectation(pi);
            let expected = if alpha == 0 { 1.0 } else { 0.0 };
            assert!((w - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn coupling_swaps_rest_state_into_target_cell() {
        // Direct evolution oracle: conjugate Ω by exp(i V_1 τ) and check all
        // mass landed in cell 1.
        let tau = 0.7;
        let app = build_pointer_apparatus(2, 3, tau, HaMode::Zero).unwrap();
        let u = expm_hermitian(&app.couplings()[0], tau).unwrap();
        let moved = app.rest_state().op().conjugate_by(&u.adjoint());
        let pi1 = app.macro_algebra().projector(1).unwrap();
        let residual = pi1.matmul(&moved).matmul(pi1).sub(&moved).max_abs();
        assert!(residual < 1e-12, "support residual {residual:e}");
    }

    #[test]
    fn cell_commuting_mode_commutes_with_cells_and_couplings() {
        let app = build_pointer_apparatus(3, 2, 1.0, HaMode::CellCommuting).unwrap();
        let h = app.free_hamiltonian();
        for alpha in 0..=3 {
            let pi = app.macro_algebra().projector(alpha).unwrap();
            assert!(crate::qalgebra::commutator(h, pi).max_abs() < 1e-15);
        }
        for v in app.couplings() {
            assert!(crate::qalgebra::commutator(h, v).max_abs() < 1e-15);
        }
    }

    #[test]
    fn rest_state_outside_cell_zero_rejected() {
        let app = build_pointer_apparatus(2, 1, 1.0, HaMode::Zero).unwrap();
        let bad_rest = DensityMatrix::maximally_mixed(3);
        let err = ApparatusSpec::new(
            app.macro_algebra().clone(),
            bad_rest,
            app.free_hamiltonian().clone(),
            app.couplings().to_vec(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            CoreError::Invariant {
                label: "rest_state_in_rest_cell",
                ..
            }
        ));
    }
}
