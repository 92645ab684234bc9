//! Normalized state vectors.

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::qalgebra::operator::{OpFlags, OperatorMatrix};
use crate::tolerances::TOL_NORM;

/// A unit vector in a finite-dimensional Hilbert space.
#[derive(Debug, Clone)]
pub struct StateVector {
    amplitudes: Array1<Complex64>,
}

impl StateVector {
    /// Accepts amplitudes already normalized within the central tolerance.
    pub fn new(amplitudes: Array1<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let residual = (norm_sq - 1.0).abs();
        if residual > TOL_NORM {
            return Err(CoreError::Contract {
                context: "StateVector::new (normalization)",
                residual,
                tolerance: TOL_NORM,
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; the zero vector has no direction and is
    /// rejected.
    pub fn normalized(amplitudes: Array1<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(CoreError::Contract {
                context: "StateVector::normalized (zero vector)",
                residual: norm_sq,
                tolerance: 0.0,
            });
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self {
            amplitudes: amplitudes.mapv(|z| z * scale),
        })
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(Array1::from_vec(amplitudes.to_vec()))
    }

    /// Standard basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(CoreError::Index {
                context: "StateVector::basis",
                index: k,
                size: dim,
            });
        }
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    /// Inner product `(self, other)`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Kronecker product of two state vectors.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.dim(), other.dim());
        let mut amplitudes = Array1::zeros(da * db);
        for i in 0..da {
            for k in 0..db {
                amplitudes[i * db + k] = self.amplitudes[i] * other.amplitudes[k];
            }
        }
        Self { amplitudes }
    }

    /// Rank-1 projector `v·v†`.
    pub fn projector(&self) -> OperatorMatrix {
        let dim = self.dim();
        let mut data = ndarray::Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                data[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        OperatorMatrix::from_array_with_flags(
            data,
            OpFlags {
                hermitian: true,
                unitary: dim == 1,
                projector: true,
            },
        )
    }
}

/// Rank-1 projector onto a normalized state.
pub fn projector_onto(v: &StateVector) -> OperatorMatrix {
    v.projector()
}
