//! Square complex matrices with cached structural flags, tensor products,
//! and spectral-decomposition propagators.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::tolerances::{EIGEN_GROUP_TOL, MAX_TENSOR_DIM, TOL_HERM, TOL_PROJ, TOL_UNIT};

/// Structural properties detected at construction time.
///
/// Flags are conservative: `true` certifies the property holds within the
/// central tolerances, `false` only means it was not certified (e.g. a
/// tensor product propagates flags conjunctively without re-measuring).
/// [`OperatorMatrix::recompute_flags`] re-measures on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpFlags {
    pub hermitian: bool,
    pub unitary: bool,
    pub projector: bool,
}

/// A dense `dim × dim` complex matrix in row-major layout.
///
/// Immutable after construction; all operations return new values.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    data: Array2<Complex64>,
    flags: OpFlags,
}

impl OperatorMatrix {
    /// Wraps a square array, measuring the structural flags.
    pub fn from_array(data: Array2<Complex64>) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c {
            return Err(CoreError::Shape {
                context: "OperatorMatrix::from_array",
                got: c,
                expected: r,
            });
        }
        let flags = measure_flags(&data);
        Ok(Self { data, flags })
    }

    /// Builds from a row-major slice of length `dim * dim`.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(CoreError::Shape {
                context: "OperatorMatrix::from_rows",
                got: entries.len(),
                expected: dim * dim,
            });
        }
        let data = Array2::from_shape_vec((dim, dim), entries.to_vec())
            .expect("length checked above");
        Self::from_array(data)
    }

    /// Internal fast path: callers assert the flags they know by
    /// construction instead of re-measuring.
    pub(crate) fn from_array_with_flags(data: Array2<Complex64>, flags: OpFlags) -> Self {
        Self { data, flags }
    }

    pub fn identity(dim: usize) -> Self {
        let data = Array2::eye(dim);
        Self {
            data,
            flags: OpFlags {
                hermitian: true,
                unitary: true,
                projector: true,
            },
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: Array2::zeros((dim, dim)),
            flags: OpFlags {
                hermitian: true,
                unitary: false,
                projector: true,
            },
        }
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let dim = values.len();
        let mut data = Array2::zeros((dim, dim));
        for (i, v) in values.iter().enumerate() {
            data[(i, i)] = Complex64::new(*v, 0.0);
        }
        let flags = measure_flags(&data);
        Self { data, flags }
    }

    pub fn pauli_x() -> Self {
        Self::from_rows(
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .expect("static shape")
    }

    pub fn pauli_y() -> Self {
        Self::from_rows(
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .expect("static shape")
    }

    pub fn pauli_z() -> Self {
        Self::diag(&[1.0, -1.0])
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn flags(&self) -> OpFlags {
        self.flags
    }

    /// Re-measures the structural flags against the current tolerances.
    pub fn recompute_flags(&self) -> OpFlags {
        measure_flags(&self.data)
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let dim = self.dim();
        let mut out = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] = self.data[(j, i)].conj();
            }
        }
        let flags = OpFlags {
            hermitian: self.flags.hermitian,
            unitary: self.flags.unitary,
            projector: self.flags.projector,
        };
        Self { data: out, flags }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().sum()
    }

    /// Max entrywise modulus; the crate's working matrix norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix product. Panics on dimension mismatch (programmer error;
    /// public entry points validate shapes before arithmetic).
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "matmul dimension mismatch");
        let data = self.data.dot(&rhs.data);
        let flags = measure_flags(&data);
        Self { data, flags }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "add dimension mismatch");
        let data = &self.data + &rhs.data;
        let flags = measure_flags(&data);
        Self { data, flags }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "sub dimension mismatch");
        let data = &self.data - &rhs.data;
        let flags = measure_flags(&data);
        Self { data, flags }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let data = self.data.mapv(|z| z * factor);
        let flags = measure_flags(&data);
        Self { data, flags }
    }

    /// tr(self · rhs) in O(dim²), without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Complex64 {
        assert_eq!(self.dim(), rhs.dim(), "trace_product dimension mismatch");
        let dim = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += self.data[(i, j)] * rhs.data[(j, i)];
            }
        }
        acc
    }

    /// Conjugation `u† · self · u`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.adjoint().matmul(self).matmul(u)
    }

    /// Max entrywise |A[i,j] - conj(A[j,i])|.
    pub fn hermiticity_residual(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..dim {
            for j in i..dim {
                let r = (self.data[(i, j)] - self.data[(j, i)].conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Max entrywise norm of (A†A - I).
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.adjoint().matmul(self);
        let dim = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((gram.data[(i, j)] - expected).norm());
            }
        }
        worst
    }

    /// Max entrywise norm of (A² - A).
    pub fn idempotence_residual(&self) -> f64 {
        let sq = self.matmul(self);
        sq.sub(self).max_abs()
    }

    /// Errors unless the matrix is Hermitian within the central tolerance.
    pub fn require_hermitian(&self, context: &'static str) -> Result<()> {
        let residual = self.hermiticity_residual();
        if residual > TOL_HERM {
            return Err(CoreError::Contract {
                context,
                residual,
                tolerance: TOL_HERM,
            });
        }
        Ok(())
    }
}

fn measure_flags(data: &Array2<Complex64>) -> OpFlags {
    let dim = data.nrows();
    let mut herm_res = 0.0_f64;
    for i in 0..dim {
        for j in i..dim {
            herm_res = herm_res.max((data[(i, j)] - data[(j, i)].conj()).norm());
        }
    }
    let hermitian = herm_res <= TOL_HERM;

    // A†A and A² share the O(dim³) cost; measure both in one pass.
    let mut unit_res = 0.0_f64;
    let mut proj_res = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            let mut gram = Complex64::new(0.0, 0.0);
            let mut sq = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                gram += data[(k, i)].conj() * data[(k, j)];
                sq += data[(i, k)] * data[(k, j)];
            }
            let eye = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            unit_res = unit_res.max((gram - eye).norm());
            proj_res = proj_res.max((sq - data[(i, j)]).norm());
        }
    }
    OpFlags {
        hermitian,
        unitary: unit_res <= TOL_UNIT,
        projector: hermitian && proj_res <= TOL_PROJ,
    }
}

/// Commutator `a·b - b·a`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a.matmul(b).sub(&b.matmul(a))
}

/// Kronecker product with flags propagated conjunctively.
///
/// `out[(i·db + k), (j·db + l)] = a[i,j] · b[k,l]`.
pub fn tensor(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    let (da, db) = (a.dim(), b.dim());
    let dim = da.checked_mul(db).unwrap_or(usize::MAX);
    if dim > MAX_TENSOR_DIM {
        return Err(CoreError::Capacity {
            requested: dim,
            max: MAX_TENSOR_DIM,
        });
    }
    let mut data = Array2::zeros((dim, dim));
    for i in 0..da {
        for j in 0..da {
            let aij = a.data[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    data[(i * db + k, j * db + l)] = aij * b.data[(k, l)];
                }
            }
        }
    }
    let flags = OpFlags {
        hermitian: a.flags.hermitian && b.flags.hermitian,
        unitary: a.flags.unitary && b.flags.unitary,
        projector: a.flags.projector && b.flags.projector,
    };
    Ok(OperatorMatrix::from_array_with_flags(data, flags))
}

/// Full spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues ascend; eigenvectors are the corresponding columns. Kept as
/// a value so propagators at many times reuse one decomposition.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<Complex64>,
}

impl HermitianEigen {
    pub fn new(op: &OperatorMatrix) -> Result<Self> {
        op.require_hermitian("HermitianEigen::new")?;
        let (eigenvalues, eigenvectors) = op.data.eigh(UPLO::Lower)?;
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> Array1<Complex64> {
        self.eigenvectors.column(k).to_owned()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> OperatorMatrix {
        let dim = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (k, lam) in self.eigenvalues.iter().enumerate() {
            let fv = f(*lam);
            for i in 0..dim {
                scaled[(i, k)] *= fv;
            }
        }
        let mut vdag = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                vdag[(i, j)] = self.eigenvectors[(j, i)].conj();
            }
        }
        let data = scaled.dot(&vdag);
        let flags = measure_flags(&data);
        OperatorMatrix::from_array_with_flags(data, flags)
    }

    /// Propagator `exp(i · H · t)`.
    pub fn propagator(&self, t: f64) -> OperatorMatrix {
        self.apply(|lam| Complex64::new(0.0, lam * t).exp())
    }

    /// Eigenvalues grouped into spectral points with their projectors.
    ///
    /// Consecutive eigenvalues closer than `group_tol` share a projector;
    /// returned pairs are `(representative eigenvalue, projector)`.
    pub fn spectral_projectors(&self, group_tol: f64) -> Vec<(f64, OperatorMatrix)> {
        let dim = self.eigenvalues.len();
        let mut out = Vec::new();
        let mut k = 0;
        while k < dim {
            let lam = self.eigenvalues[k];
            let mut members = vec![k];
            let mut next = k + 1;
            while next < dim && (self.eigenvalues[next] - self.eigenvalues[next - 1]).abs() <= group_tol {
                members.push(next);
                next += 1;
            }
            let mut data: Array2<Complex64> = Array2::zeros((dim, dim));
            for &m in &members {
                let v = self.eigenvectors.column(m);
                for i in 0..dim {
                    for j in 0..dim {
                        data[(i, j)] += v[i] * v[j].conj();
                    }
                }
            }
            let flags = measure_flags(&data);
            out.push((lam, OperatorMatrix::from_array_with_flags(data, flags)));
            k = next;
        }
        out
    }
}

/// `exp(i · h · t)` for Hermitian `h`, via full spectral decomposition.
///
/// Spectral rather than series construction keeps the result unitary to
/// roundoff at any `t`.
pub fn expm_hermitian(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    let eig = HermitianEigen::new(h)?;
    Ok(eig.propagator(t))
}

/// Spectral projectors of a Hermitian operator with the default grouping
/// tolerance.
pub fn spectral_projectors_of(op: &OperatorMatrix) -> Result<Vec<(f64, OperatorMatrix)>> {
    Ok(HermitianEigen::new(op)?.spectral_projectors(EIGEN_GROUP_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_identity_case() {
        let i2 = OperatorMatrix::identity(2);
        let i4 = tensor(&i2, &i2).unwrap();
        assert_eq!(i4.dim(), 4);
        assert_abs_diff_eq!(i4.sub(&OperatorMatrix::identity(4)).max_abs(), 0.0);
        assert!(i4.flags().unitary && i4.flags().projector);
    }

    #[test]
    fn tensor_diagonal_hand_case() {
        let a = OperatorMatrix::diag(&[1.0, 2.0]);
        let b = OperatorMatrix::diag(&[3.0, 4.0]);
        let t = tensor(&a, &b).unwrap();
        let expected = OperatorMatrix::diag(&[3.0, 4.0, 6.0, 8.0]);
        assert_abs_diff_eq!(t.sub(&expected).max_abs(), 0.0);
    }

    #[test]
    fn tensor_matches_index_formula() {
        // Independent oracle: evaluate the defining index formula directly.
        let a = OperatorMatrix::from_rows(
            2,
            &[c(0.3, 0.1), c(-1.2, 0.4), c(0.0, -0.7), c(2.0, 0.0)],
        )
        .unwrap();
        let b = OperatorMatrix::from_rows(
            3,
            &[
                c(1.0, 0.0),
                c(0.5, -0.5),
                c(0.0, 2.0),
                c(-0.3, 0.0),
                c(0.0, 0.0),
                c(1.0, 1.0),
                c(0.2, 0.2),
                c(-1.0, 0.5),
                c(0.7, 0.0),
            ],
        )
        .unwrap();
        let t = tensor(&a, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    for l in 0..3 {
                        let expected = a.entry(i, j) * b.entry(k, l);
                        assert_eq!(t.entry(i * 3 + k, j * 3 + l), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_capacity_guard() {
        let big = OperatorMatrix::identity(100);
        let err = tensor(&big, &big).unwrap_err();
        assert!(matches!(err, CoreError::Capacity { requested: 10000, .. }));
    }

    #[test]
    fn expm_zero_generator_is_identity() {
        let z = OperatorMatrix::zeros(3);
        let u = expm_hermitian(&z, 1.7).unwrap();
        assert!(u.sub(&OperatorMatrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn expm_pauli_x_at_pi_is_minus_identity() {
        // Hand spectral decomposition: exp(i·π·σx) = cos(π)·I + i·sin(π)·σx = -I.
        let u = expm_hermitian(&OperatorMatrix::pauli_x(), std::f64::consts::PI).unwrap();
        let minus_i = OperatorMatrix::identity(2).scale(c(-1.0, 0.0));
        assert!(u.sub(&minus_i).max_abs() < 1e-14);
    }

    #[test]
    fn expm_random_is_unitary() {
        let h = OperatorMatrix::from_rows(
            3,
            &[
                c(0.9, 0.0),
                c(0.2, 0.7),
                c(-0.4, 0.1),
                c(0.2, -0.7),
                c(-1.3, 0.0),
                c(0.0, -0.6),
                c(-0.4, -0.1),
                c(0.0, 0.6),
                c(0.5, 0.0),
            ],
        )
        .unwrap();
        let u = expm_hermitian(&h, 2.3).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
        assert!(u.flags().unitary);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = OperatorMatrix::from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let err = expm_hermitian(&m, 1.0).unwrap_err();
        assert!(matches!(err, CoreError::Contract { .. }));
    }

    #[test]
    fn spectral_projectors_resolve_identity() {
        let h = OperatorMatrix::pauli_z();
        let projs = spectral_projectors_of(&h).unwrap();
        assert_eq!(projs.len(), 2);
        let sum = projs[0].1.add(&projs[1].1);
        assert!(sum.sub(&OperatorMatrix::identity(2)).max_abs() < 1e-14);
        assert!(projs.iter().all(|(_, p)| p.flags().projector));
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = OperatorMatrix::pauli_x();
        let b = OperatorMatrix::pauli_y();
        let direct = a.matmul(&b).trace();
        assert_abs_diff_eq!((a.trace_product(&b) - direct).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn flags_detect_structure() {
        let p = OperatorMatrix::diag(&[1.0, 0.0, 1.0]);
        assert!(p.flags().projector && p.flags().hermitian && !p.flags().unitary);
        let u = OperatorMatrix::pauli_y();
        assert!(u.flags().unitary && u.flags().hermitian);
    }
}
