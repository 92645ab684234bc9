//! Density matrices: validated mixed states, partial traces, and trace
//! distance.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::qalgebra::operator::{HermitianEigen, OpFlags, OperatorMatrix};
use crate::qalgebra::state::StateVector;
use crate::tolerances::{TOL_HERM, TOL_NORM, TOL_PSD};

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Object,
    Apparatus,
}

/// A Hermitian, unit-trace, positive-semidefinite matrix.
///
/// All three properties are checked at construction; the smallest
/// eigenvalue may undershoot zero only by the PSD tolerance.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: OperatorMatrix,
}

impl DensityMatrix {
    pub fn new(op: OperatorMatrix) -> Result<Self> {
        let herm = op.hermiticity_residual();
        if herm > TOL_HERM {
            return Err(CoreError::Contract {
                context: "DensityMatrix::new (hermiticity)",
                residual: herm,
                tolerance: TOL_HERM,
            });
        }
        let trace_residual = (op.trace() - Complex64::new(1.0, 0.0)).norm();
        if trace_residual > TOL_NORM {
            return Err(CoreError::Contract {
                context: "DensityMatrix::new (unit trace)",
                residual: trace_residual,
                tolerance: TOL_NORM,
            });
        }
        let min_eig = HermitianEigen::new(&op)?.min_eigenvalue();
        if min_eig < -TOL_PSD {
            return Err(CoreError::Contract {
                context: "DensityMatrix::new (positivity)",
                residual: -min_eig,
                tolerance: TOL_PSD,
            });
        }
        Ok(Self { op })
    }

    /// Pure state `v·v†`.
    pub fn from_pure(v: &StateVector) -> Self {
        Self { op: v.projector() }
    }

    /// `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let scale = Complex64::new((dim as f64).recip(), 0.0);
        let data = Array2::eye(dim).mapv(|z: Complex64| z * scale);
        Self {
            op: OperatorMatrix::from_array_with_flags(
                data,
                OpFlags {
                    hermitian: true,
                    unitary: dim == 1,
                    projector: dim == 1,
                },
            ),
        }
    }

    /// Classical mixture `Σ wᵢ ρᵢ`; weights must be a probability vector.
    pub fn mixture(components: &[(f64, DensityMatrix)]) -> Result<Self> {
        if components.is_empty() {
            return Err(CoreError::Contract {
                context: "DensityMatrix::mixture (empty)",
                residual: 0.0,
                tolerance: 0.0,
            });
        }
        let dim = components[0].1.dim();
        let mut data: Array2<Complex64> = Array2::zeros((dim, dim));
        let mut total = 0.0;
        for (w, rho) in components {
            if rho.dim() != dim {
                return Err(CoreError::Shape {
                    context: "DensityMatrix::mixture",
                    got: rho.dim(),
                    expected: dim,
                });
            }
            total += w;
            data = data + rho.op.data().mapv(|z| z * Complex64::new(*w, 0.0));
        }
        let residual = (total - 1.0).abs();
        if residual > TOL_NORM {
            return Err(CoreError::Contract {
                context: "DensityMatrix::mixture (weights)",
                residual,
                tolerance: TOL_NORM,
            });
        }
        Self::new(OperatorMatrix::from_array(data)?)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &OperatorMatrix {
        &self.op
    }

    pub fn into_op(self) -> OperatorMatrix {
        self.op
    }

    /// `u† · ρ · u`; unitarity of `u` is the caller's contract.
    pub fn conjugate_by(&self, u: &OperatorMatrix) -> Result<Self> {
        Self::new(self.op.conjugate_by(u))
    }

    /// Expectation `tr(ρ · a)` of a Hermitian observable; real part by
    /// construction, returned as such.
    pub fn expectation(&self, a: &OperatorMatrix) -> f64 {
        self.op.trace_product(a).re
    }
}

/// Reduced state of one factor of a bipartite `(object_dim · apparatus_dim)`
/// density matrix; the trace is preserved.
pub fn partial_trace(
    w: &DensityMatrix,
    dims: (usize, usize),
    keep: Factor,
) -> Result<DensityMatrix> {
    let (n, big_n) = dims;
    if n * big_n != w.dim() {
        return Err(CoreError::Shape {
            context: "partial_trace",
            got: w.dim(),
            expected: n * big_n,
        });
    }
    let data = w.op().data();
    let reduced = match keep {
        Factor::Object => {
            let mut out: Array2<Complex64> = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..big_n {
                        acc += data[(i * big_n + k, j * big_n + k)];
                    }
                    out[(i, j)] = acc;
                }
            }
            out
        }
        Factor::Apparatus => {
            let mut out: Array2<Complex64> = Array2::zeros((big_n, big_n));
            for k in 0..big_n {
                for l in 0..big_n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        acc += data[(i * big_n + k, i * big_n + l)];
                    }
                    out[(k, l)] = acc;
                }
            }
            out
        }
    };
    DensityMatrix::new(OperatorMatrix::from_array(reduced)?)
}

/// `½ · Σ singular values of (a - b)`; for Hermitian differences the
/// singular values are the absolute eigenvalues. Lies in [0, 1].
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(CoreError::Shape {
            context: "trace_distance",
            got: b.dim(),
            expected: a.dim(),
        });
    }
    let diff = a.op().sub(b.op());
    let eig = HermitianEigen::new(&diff)?;
    Ok(0.5 * eig.eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
}
