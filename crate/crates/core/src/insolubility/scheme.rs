//! Candidate measurement schemes and additively conserved quantities.

use crate::error::{CoreError, Result};
use crate::qalgebra::{tensor, DensityMatrix, HermitianEigen, OperatorMatrix, StateVector};
use crate::sewell::MacroAlgebra;
use crate::tolerances::TOL_UNIT;

/// A candidate measurement of a Hermitian object observable.
///
/// The pointer algebra lives on the apparatus; its `σ` map sends the
/// observable's eigenindices (ascending eigenvalue order) to live cells.
/// Unlike the pointer-apparatus construction, the initial apparatus state
/// may sit inside a live cell and the rest cell may be empty.
#[derive(Debug, Clone)]
pub struct MeasurementScheme {
    object_obs: OperatorMatrix,
    object_eigen: HermitianEigen,
    initial_apparatus: DensityMatrix,
    unitary: OperatorMatrix,
    pointer: MacroAlgebra,
}

impl MeasurementScheme {
    pub fn new(
        object_obs: OperatorMatrix,
        initial_apparatus: DensityMatrix,
        unitary: OperatorMatrix,
        pointer: MacroAlgebra,
    ) -> Result<Self> {
        object_obs.require_hermitian("MeasurementScheme object observable")?;
        let n = object_obs.dim();
        let big_n = pointer.apparatus_dim();
        if initial_apparatus.dim() != big_n {
            return Err(CoreError::Shape {
                context: "MeasurementScheme initial apparatus dimension",
                got: initial_apparatus.dim(),
                expected: big_n,
            });
        }
        if unitary.dim() != n * big_n {
            return Err(CoreError::Shape {
                context: "MeasurementScheme unitary dimension",
                got: unitary.dim(),
                expected: n * big_n,
            });
        }
        let unit_residual = unitary.unitarity_residual();
        if unit_residual > TOL_UNIT {
            return Err(CoreError::Contract {
                context: "MeasurementScheme unitary",
                residual: unit_residual,
                tolerance: TOL_UNIT,
            });
        }
        if pointer.sigma_len() != n {
            return Err(CoreError::Shape {
                context: "MeasurementScheme sigma (one live cell per eigenindex)",
                got: pointer.sigma_len(),
                expected: n,
            });
        }
        let object_eigen = HermitianEigen::new(&object_obs)?;
        Ok(Self {
            object_obs,
            object_eigen,
            initial_apparatus,
            unitary,
            pointer,
        })
    }

    pub fn object_dim(&self) -> usize {
        self.object_obs.dim()
    }

    pub fn apparatus_dim(&self) -> usize {
        self.pointer.apparatus_dim()
    }

    pub fn object_observable(&self) -> &OperatorMatrix {
        &self.object_obs
    }

    pub fn initial_apparatus(&self) -> &DensityMatrix {
        &self.initial_apparatus
    }

    pub fn unitary(&self) -> &OperatorMatrix {
        &self.unitary
    }

    pub fn pointer(&self) -> &MacroAlgebra {
        &self.pointer
    }

    /// Eigenstate `u_μ` of the object observable (ascending eigenvalues).
    pub fn eigenstate(&self, mu: usize) -> Result<StateVector> {
        if mu >= self.object_dim() {
            return Err(CoreError::Index {
                context: "MeasurementScheme eigenstate",
                index: mu,
                size: self.object_dim(),
            });
        }
        StateVector::normalized(self.object_eigen.eigenvector(mu))
    }

    pub fn eigenvalue(&self, mu: usize) -> Result<f64> {
        self.object_eigen
            .eigenvalues()
            .get(mu)
            .copied()
            .ok_or(CoreError::Index {
                context: "MeasurementScheme eigenvalue",
                index: mu,
                size: self.object_dim(),
            })
    }

    /// `U · (ρ_object ⊗ ρ_apparatus) · U†`.
    pub fn apply(&self, object_state: &OperatorMatrix) -> Result<OperatorMatrix> {
        let joint = tensor(object_state, self.initial_apparatus.op())?;
        Ok(self
            .unitary
            .matmul(&joint)
            .matmul(&self.unitary.adjoint()))
    }
}

/// An additively conserved quantity `L = L⁽ᵒ⁾⊗I + I⊗L⁽ᵃ⁾`.
#[derive(Debug, Clone)]
pub struct ConservedQuantity {
    l_object: OperatorMatrix,
    l_apparatus: OperatorMatrix,
}

impl ConservedQuantity {
    pub fn new(l_object: OperatorMatrix, l_apparatus: OperatorMatrix) -> Result<Self> {
        l_object.require_hermitian("ConservedQuantity object part")?;
        l_apparatus.require_hermitian("ConservedQuantity apparatus part")?;
        Ok(Self {
            l_object,
            l_apparatus,
        })
    }

    pub fn object_part(&self) -> &OperatorMatrix {
        &self.l_object
    }

    pub fn apparatus_part(&self) -> &OperatorMatrix {
        &self.l_apparatus
    }

    /// The total quantity on the composite space.
    pub fn total(&self) -> Result<OperatorMatrix> {
        let n = self.l_object.dim();
        let big_n = self.l_apparatus.dim();
        Ok(tensor(&self.l_object, &OperatorMatrix::identity(big_n))?
            .add(&tensor(&OperatorMatrix::identity(n), &self.l_apparatus)?))
    }

    /// Entrywise norm of `U L U† − L`; zero means `U` conserves `L`.
    pub fn conservation_residual(&self, u: &OperatorMatrix) -> Result<f64> {
        let total = self.total()?;
        Ok(u.matmul(&total).matmul(&u.adjoint()).sub(&total).max_abs())
    }
}
