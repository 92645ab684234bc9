//! The measured object: eigenvalues, free energies, and preparation
//! amplitudes.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::qalgebra::{OperatorMatrix, StateVector};
use crate::tolerances::TOL_NORM;

/// Smallest admissible gap between object eigenvalues; closer pairs count
/// as degenerate and are rejected.
const MIN_EIGENVALUE_GAP: f64 = 1e-12;

/// Object-side data: the measured observable's eigenvalues `λ_r`, the free
/// energies `ε_r`, and the preparation amplitudes `c_r`.
///
/// The observable's eigenbasis is fixed to the standard basis, so the
/// observable is `diag(λ)` and the free Hamiltonian `diag(ε)`.
#[derive(Debug, Clone)]
pub struct ObjectSpec {
    lambdas: Vec<f64>,
    energies: Vec<f64>,
    amplitudes: Vec<Complex64>,
}

impl ObjectSpec {
    pub fn new(lambdas: Vec<f64>, energies: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = lambdas.len();
        if !(2..=16).contains(&n) {
            return Err(CoreError::Shape {
                context: "ObjectSpec dimension (allowed 2..=16)",
                got: n,
                expected: 2,
            });
        }
        if energies.len() != n {
            return Err(CoreError::Shape {
                context: "ObjectSpec energies",
                got: energies.len(),
                expected: n,
            });
        }
        if amplitudes.len() != n {
            return Err(CoreError::Shape {
                context: "ObjectSpec amplitudes",
                got: amplitudes.len(),
                expected: n,
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        let residual = (norm_sq - 1.0).abs();
        if residual > TOL_NORM {
            return Err(CoreError::Contract {
                context: "ObjectSpec amplitudes (normalization)",
                residual,
                tolerance: TOL_NORM,
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (lambdas[i] - lambdas[j]).abs();
                if gap <= MIN_EIGENVALUE_GAP {
                    return Err(CoreError::Contract {
                        context: "ObjectSpec eigenvalues (degenerate pair)",
                        residual: gap,
                        tolerance: MIN_EIGENVALUE_GAP,
                    });
                }
            }
        }
        Ok(Self {
            lambdas,
            energies,
            amplitudes,
        })
    }

    /// Equal free energies (zero); the common reduced setting.
    pub fn with_zero_energies(lambdas: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let energies = vec![0.0; lambdas.len()];
        Self::new(lambdas, energies, amplitudes)
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The measured observable `diag(λ)`.
    pub fn observable(&self) -> OperatorMatrix {
        OperatorMatrix::diag(&self.lambdas)
    }

    /// The free object Hamiltonian `diag(ε)`.
    pub fn hamiltonian(&self) -> OperatorMatrix {
        OperatorMatrix::diag(&self.energies)
    }

    /// The prepared superposition `ψ = Σ c_r · e_r`.
    pub fn psi(&self) -> StateVector {
        StateVector::from_slice(&self.amplitudes).expect("normalization validated at construction")
    }

    /// Basis eigenstate `u_r`.
    pub fn eigenstate(&self, r: usize) -> Result<StateVector> {
        StateVector::basis(self.n(), r)
    }

    /// Index `k` with `|c_k| = 1` when the preparation is an eigenstate.
    pub fn eigenstate_index(&self) -> Option<usize> {
        self.amplitudes
            .iter()
            .position(|c| (c.norm_sqr() - 1.0).abs() <= 1e-12)
    }
}
