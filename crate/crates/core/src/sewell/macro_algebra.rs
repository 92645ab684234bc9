//! The commutative pointer algebra: orthogonal cell projectors summing to
//! the identity, pointer values on the live cells, and the correspondence
//! between object eigenstates and cells.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::qalgebra::OperatorMatrix;
use crate::tolerances::TOL_PROJ;

/// Hilbert–Schmidt residual above which an operator does not count as a
/// member of the algebra's span.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// A finitely generated commutative algebra of apparatus observables.
///
/// Cell `0` is the rest cell; cells `1..=ν` are the live cells carrying
/// pointer values `m_α`. The map `σ` assigns to each object eigenindex the
/// live cell its measurement outcome occupies. The rest cell may be empty
/// (rank 0) for schemes that start inside a live cell.
#[derive(Debug, Clone)]
pub struct MacroAlgebra {
    apparatus_dim: usize,
    cell_dims: Vec<usize>,
    projectors: Vec<OperatorMatrix>,
    pointer_values: Vec<f64>,
    sigma: Vec<usize>,
}

impl MacroAlgebra {
    /// Validates the resolution of identity, orthogonality, ranks, and the
    /// injectivity of `σ` into the live cells.
    ///
    /// `projectors[0]` is the rest cell; `pointer_values` has one entry per
    /// live cell; `sigma[r]` is the live cell (1-based) for object index `r`.
    pub fn new(
        projectors: Vec<OperatorMatrix>,
        pointer_values: Vec<f64>,
        sigma: Vec<usize>,
    ) -> Result<Self> {
        if projectors.is_empty() {
            return Err(CoreError::Shape {
                context: "MacroAlgebra projectors (need at least the rest cell)",
                got: 0,
                expected: 1,
            });
        }
        let nu = projectors.len() - 1;
        if pointer_values.len() != nu {
            return Err(CoreError::Shape {
                context: "MacroAlgebra pointer values",
                got: pointer_values.len(),
                expected: nu,
            });
        }
        let dim = projectors[0].dim();
        let mut sum = OperatorMatrix::zeros(dim);
        for (alpha, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(CoreError::Shape {
                    context: "MacroAlgebra projector dimension",
                    got: p.dim(),
                    expected: dim,
                });
            }
            let idem = p.idempotence_residual();
            let herm = p.hermiticity_residual();
            let residual = idem.max(herm);
            if residual > TOL_PROJ {
                return Err(CoreError::Invariant {
                    label: "cell_projector_idempotent",
                    residual,
                    tolerance: TOL_PROJ,
                });
            }
            for q in projectors.iter().skip(alpha + 1) {
                let cross = p.matmul(q).max_abs();
                if cross > TOL_PROJ {
                    return Err(CoreError::Invariant {
                        label: "cell_projectors_orthogonal",
                        residual: cross,
                        tolerance: TOL_PROJ,
                    });
                }
            }
            sum = sum.add(p);
        }
        let completeness = sum.sub(&OperatorMatrix::identity(dim)).max_abs();
        if completeness > TOL_PROJ {
            return Err(CoreError::Invariant {
                label: "cell_projectors_complete",
                residual: completeness,
                tolerance: TOL_PROJ,
            });
        }
        let mut cell_dims = Vec::with_capacity(nu + 1);
        for p in &projectors {
            let tr = p.trace().re;
            let rank = tr.round();
            if (tr - rank).abs() > 1e-9 || rank < 0.0 {
                return Err(CoreError::Invariant {
                    label: "cell_projector_rank_integral",
                    residual: (tr - rank).abs(),
                    tolerance: 1e-9,
                });
            }
            cell_dims.push(rank as usize);
        }
        let mut seen = vec![false; nu + 1];
        for (r, &alpha) in sigma.iter().enumerate() {
            if alpha == 0 || alpha > nu {
                return Err(CoreError::Index {
                    context: "MacroAlgebra sigma target (live cells only)",
                    index: alpha,
                    size: nu,
                });
            }
            if seen[alpha] {
                return Err(CoreError::Index {
                    context: "MacroAlgebra sigma (not injective)",
                    index: r,
                    size: nu,
                });
            }
            seen[alpha] = true;
        }
        Ok(Self {
            apparatus_dim: dim,
            cell_dims,
            projectors,
            pointer_values,
            sigma,
        })
    }

    /// Builds diagonal projectors from a partition of the standard basis.
    ///
    /// `cells[α]` lists the basis indices of cell `α` (index 0 = rest cell,
    /// which may be empty). Every basis index must appear exactly once.
    pub fn from_index_partition(
        apparatus_dim: usize,
        cells: &[Vec<usize>],
        pointer_values: Vec<f64>,
        sigma: Vec<usize>,
    ) -> Result<Self> {
        let mut used = vec![false; apparatus_dim];
        let mut projectors = Vec::with_capacity(cells.len());
        for members in cells {
            let mut diag = vec![0.0; apparatus_dim];
            for &idx in members {
                if idx >= apparatus_dim {
                    return Err(CoreError::Index {
                        context: "MacroAlgebra cell basis index",
                        index: idx,
                        size: apparatus_dim,
                    });
                }
                if used[idx] {
                    return Err(CoreError::Index {
                        context: "MacroAlgebra cell basis index (reused)",
                        index: idx,
                        size: apparatus_dim,
                    });
                }
                used[idx] = true;
                diag[idx] = 1.0;
            }
            projectors.push(OperatorMatrix::diag(&diag));
        }
        if used.iter().any(|u| !u) {
            return Err(CoreError::Invariant {
                label: "cell_partition_covers_basis",
                residual: used.iter().filter(|u| !**u).count() as f64,
                tolerance: 0.0,
            });
        }
        Self::new(projectors, pointer_values, sigma)
    }

    /// Number of live cells ν.
    pub fn nu(&self) -> usize {
        self.projectors.len() - 1
    }

    pub fn apparatus_dim(&self) -> usize {
        self.apparatus_dim
    }

    /// Cell projector `Π_α`, `α ∈ 0..=ν`.
    pub fn projector(&self, alpha: usize) -> Result<&OperatorMatrix> {
        self.projectors.get(alpha).ok_or(CoreError::Index {
            context: "MacroAlgebra projector",
            index: alpha,
            size: self.projectors.len(),
        })
    }

    pub fn cell_dim(&self, alpha: usize) -> Result<usize> {
        self.cell_dims.get(alpha).copied().ok_or(CoreError::Index {
            context: "MacroAlgebra cell dimension",
            index: alpha,
            size: self.cell_dims.len(),
        })
    }

    pub fn pointer_values(&self) -> &[f64] {
        &self.pointer_values
    }

    /// Live cell assigned to object eigenindex `r`.
    pub fn sigma(&self, r: usize) -> Result<usize> {
        self.sigma.get(r).copied().ok_or(CoreError::Index {
            context: "MacroAlgebra sigma",
            index: r,
            size: self.sigma.len(),
        })
    }

    pub fn sigma_len(&self) -> usize {
        self.sigma.len()
    }

    /// Object eigenindex mapped to live cell `alpha`, if any.
    pub fn sigma_inverse(&self, alpha: usize) -> Option<usize> {
        self.sigma.iter().position(|&a| a == alpha)
    }

    /// The pointer observable `M = Σ_{α≥1} m_α Π_α`.
    pub fn pointer_observable(&self) -> OperatorMatrix {
        let mut m = OperatorMatrix::zeros(self.apparatus_dim);
        for (alpha, value) in self.pointer_values.iter().enumerate() {
            m = m.add(&self.projectors[alpha + 1].scale(Complex64::new(*value, 0.0)));
        }
        m
    }

    /// Algebra element `Σ coeffs[α] Π_α` (coefficients over all cells,
    /// including the rest cell).
    pub fn member(&self, coeffs: &[f64]) -> Result<OperatorMatrix> {
        if coeffs.len() != self.projectors.len() {
            return Err(CoreError::Shape {
                context: "MacroAlgebra member coefficients",
                got: coeffs.len(),
                expected: self.projectors.len(),
            });
        }
        let mut m = OperatorMatrix::zeros(self.apparatus_dim);
        for (c, p) in coeffs.iter().zip(self.projectors.iter()) {
            m = m.add(&p.scale(Complex64::new(*c, 0.0)));
        }
        Ok(m)
    }

    /// Hilbert–Schmidt projection of `m` onto the algebra's span.
    ///
    /// Returns the real coefficients per cell and the residual (distance to
    /// the span plus any imaginary part of the coefficients). Membership
    /// holds when the residual is at most [`MEMBERSHIP_TOL`].
    pub fn project_member(&self, m: &OperatorMatrix) -> Result<(Vec<f64>, f64)> {
        if m.dim() != self.apparatus_dim {
            return Err(CoreError::Shape {
                context: "MacroAlgebra::project_member",
                got: m.dim(),
                expected: self.apparatus_dim,
            });
        }
        let mut coeffs = Vec::with_capacity(self.projectors.len());
        let mut imag_residual = 0.0_f64;
        let mut reconstructed = OperatorMatrix::zeros(self.apparatus_dim);
        for (alpha, p) in self.projectors.iter().enumerate() {
            let d = self.cell_dims[alpha];
            let coeff = if d == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                p.trace_product(m) / Complex64::new(d as f64, 0.0)
            };
            imag_residual = imag_residual.max(coeff.im.abs());
            coeffs.push(coeff.re);
            reconstructed = reconstructed.add(&p.scale(Complex64::new(coeff.re, 0.0)));
        }
        let span_residual = m.sub(&reconstructed).max_abs();
        Ok((coeffs, span_residual.max(imag_residual)))
    }
}
