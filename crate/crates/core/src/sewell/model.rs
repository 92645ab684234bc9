//! Model assembly and temporal evolution.
//!
//! The total Hamiltonian during the coupling window is block diagonal over
//! object eigenstates, `H_S = Σ_r P_[u_r] ⊗ K_r` with
//! `K_r = H⁽ᵃ⁾ + V_r + ε_r·I`, so the composite state always has the form
//! `Φ(t) = Σ_{r,s} c_r c̄_s |u_r⟩⟨u_s| ⊗ Ω_{r,s}(t)` and evolution reduces
//! to conjugating the apparatus blocks by the per-eigenvalue propagators.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::qalgebra::{tensor, DensityMatrix, HermitianEigen, OperatorMatrix};
use crate::sewell::apparatus::ApparatusSpec;
use crate::sewell::object::ObjectSpec;
use crate::tolerances::MAX_TENSOR_DIM;

/// Residual allowed in the structural identities checked at assembly.
const ASSEMBLY_TOL: f64 = 1e-12;

/// The assembled object–apparatus model with cached spectral data for the
/// per-eigenvalue generators.
#[derive(Debug, Clone)]
pub struct SewellModel {
    object: ObjectSpec,
    apparatus: ApparatusSpec,
    tau: f64,
    k_ops: Vec<OperatorMatrix>,
    k_eigs: Vec<HermitianEigen>,
    h_a_eig: HermitianEigen,
    h_s: OperatorMatrix,
}

impl SewellModel {
    pub fn object(&self) -> &ObjectSpec {
        &self.object
    }

    pub fn apparatus(&self) -> &ApparatusSpec {
        &self.apparatus
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Coupled-window generator `K_r` for object index `r`.
    pub fn k_op(&self, r: usize) -> Result<&OperatorMatrix> {
        self.k_ops.get(r).ok_or(CoreError::Index {
            context: "SewellModel coupling generator",
            index: r,
            size: self.k_ops.len(),
        })
    }

    /// Total Hamiltonian during the coupling window.
    pub fn h_total(&self) -> &OperatorMatrix {
        &self.h_s
    }

    /// Free total Hamiltonian (couplings removed).
    pub fn h_free(&self) -> OperatorMatrix {
        let n = self.object.n();
        let big_n = self.apparatus.dim();
        let h_obj = tensor(&self.object.hamiltonian(), &OperatorMatrix::identity(big_n))
            .expect("dims validated at assembly");
        let h_app = tensor(&OperatorMatrix::identity(n), self.apparatus.free_hamiltonian())
            .expect("dims validated at assembly");
        h_obj.add(&h_app)
    }

    pub fn composite_dim(&self) -> usize {
        self.object.n() * self.apparatus.dim()
    }

    /// Interacting-phase propagator `U_r(t) = exp(i K_r t)`.
    pub fn propagator(&self, r: usize, t: f64) -> Result<OperatorMatrix> {
        let eig = self.k_eigs.get(r).ok_or(CoreError::Index {
            context: "SewellModel propagator",
            index: r,
            size: self.k_eigs.len(),
        })?;
        Ok(eig.propagator(t))
    }

    /// Free-phase propagator `exp(i (H⁽ᵃ⁾ + ε_r I) t)`.
    pub fn free_propagator(&self, r: usize, t: f64) -> Result<OperatorMatrix> {
        let eps = *self.object.energies().get(r).ok_or(CoreError::Index {
            context: "SewellModel free propagator",
            index: r,
            size: self.object.n(),
        })?;
        let phase = Complex64::new(0.0, eps * t).exp();
        Ok(self.h_a_eig.propagator(t).scale(phase))
    }

    /// Initial composite state `Φ(0) = P_[ψ] ⊗ Ω`.
    pub fn initial_state(&self) -> DensityMatrix {
        let p_psi = self.object.psi().projector();
        let op = tensor(&p_psi, self.apparatus.rest_state().op())
            .expect("dims validated at assembly");
        DensityMatrix::new(op).expect("product of valid states")
    }
}

/// State of the composite at a given time, as the dense density matrix plus
/// the apparatus blocks it was assembled from.
#[derive(Debug, Clone)]
pub struct EvolvedState {
    t: f64,
    phi: DensityMatrix,
    omega_blocks: Vec<Vec<OperatorMatrix>>,
    amplitudes: Vec<Complex64>,
}

impl EvolvedState {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn phi(&self) -> &DensityMatrix {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.omega_blocks.len()
    }

    pub fn apparatus_dim(&self) -> usize {
        self.omega_blocks[0][0].dim()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Apparatus block `Ω_{r,s}(t)`.
    pub fn omega_block(&self, r: usize, s: usize) -> Result<&OperatorMatrix> {
        self.omega_blocks
            .get(r)
            .and_then(|row| row.get(s))
            .ok_or(CoreError::Index {
                context: "EvolvedState omega block",
                index: r * self.omega_blocks.len() + s,
                size: self.omega_blocks.len() * self.omega_blocks.len(),
            })
    }
}

/// Validates the model invariants and caches the per-eigenvalue spectral
/// decompositions.
///
/// The construction only ever produces couplings of the conserving shape
/// `V = Σ_r P_[u_r] ⊗ V_r`; assembly re-checks the two structural
/// identities that encode it (block decomposition of the total Hamiltonian
/// and commutation with the measured observable) and names the one that
/// fails.
pub fn assemble_model(
    object: ObjectSpec,
    apparatus: ApparatusSpec,
    tau: f64,
) -> Result<SewellModel> {
    let n = object.n();
    let big_n = apparatus.dim();
    if apparatus.couplings().len() != n {
        return Err(CoreError::Shape {
            context: "assemble_model couplings (one per object index)",
            got: apparatus.couplings().len(),
            expected: n,
        });
    }
    if apparatus.macro_algebra().sigma_len() != n {
        return Err(CoreError::Shape {
            context: "assemble_model sigma (defined for every object index)",
            got: apparatus.macro_algebra().sigma_len(),
            expected: n,
        });
    }
    if tau <= 0.0 {
        return Err(CoreError::Contract {
            context: "assemble_model coupling window (τ > 0)",
            residual: tau,
            tolerance: 0.0,
        });
    }
    let dim = n.checked_mul(big_n).unwrap_or(usize::MAX);
    if dim > MAX_TENSOR_DIM {
        return Err(CoreError::Capacity {
            requested: dim,
            max: MAX_TENSOR_DIM,
        });
    }

    let identity_a = OperatorMatrix::identity(big_n);
    let mut k_ops = Vec::with_capacity(n);
    let mut h_s = OperatorMatrix::zeros(dim);
    for r in 0..n {
        let eps = object.energies()[r];
        let k = apparatus
            .free_hamiltonian()
            .add(&apparatus.couplings()[r])
            .add(&identity_a.scale(Complex64::new(eps, 0.0)));
        let u_r = object.eigenstate(r)?;
        h_s = h_s.add(&tensor(&u_r.projector(), &k)?);
        k_ops.push(k);
    }

    // H_S must equal H⁽ᵒ⁾⊗I + I⊗H⁽ᵃ⁾ + Σ_r P_[u_r]⊗V_r entrywise.
    let mut expected = tensor(&object.hamiltonian(), &identity_a)?.add(&tensor(
        &OperatorMatrix::identity(n),
        apparatus.free_hamiltonian(),
    )?);
    for r in 0..n {
        expected = expected.add(&tensor(
            &object.eigenstate(r)?.projector(),
            &apparatus.couplings()[r],
        )?);
    }
    let decomposition_residual = h_s.sub(&expected).max_abs();
    if decomposition_residual > ASSEMBLY_TOL {
        return Err(CoreError::Invariant {
            label: "hamiltonian_block_decomposition",
            residual: decomposition_residual,
            tolerance: ASSEMBLY_TOL,
        });
    }

    // The measured observable is conserved: [O⊗I, H_S] = 0.
    let o_total = tensor(&object.observable(), &identity_a)?;
    let conservation_residual = crate::qalgebra::commutator(&o_total, &h_s).max_abs();
    if conservation_residual > ASSEMBLY_TOL {
        return Err(CoreError::Invariant {
            label: "observable_commutes_with_hamiltonian",
            residual: conservation_residual,
            tolerance: ASSEMBLY_TOL,
        });
    }

    let k_eigs = k_ops
        .iter()
        .map(HermitianEigen::new)
        .collect::<Result<Vec<_>>>()?;
    let h_a_eig = HermitianEigen::new(apparatus.free_hamiltonian())?;

    Ok(SewellModel {
        object,
        apparatus,
        tau,
        k_ops,
        k_eigs,
        h_a_eig,
        h_s,
    })
}

/// Evolves the composite to time `t`.
///
/// * `t ≤ 0` — the prepared product state.
/// * `0 < t ≤ τ` — blockwise conjugation by the coupled propagators,
///   `Ω_{r,s}(t) = U_r†(t) · Ω · U_s(t)`; the value at `τ` is the
///   continuous closed-form limit from the left.
/// * `t > τ` — free evolution of the `t = τ` blocks.
pub fn evolve(model: &SewellModel, t: f64) -> Result<EvolvedState> {
    let n = model.object().n();
    let omega0 = model.apparatus().rest_state().op();

    let blocks: Vec<Vec<OperatorMatrix>> = if t <= 0.0 {
        (0..n)
            .map(|_| (0..n).map(|_| omega0.clone()).collect())
            .collect()
    } else {
        let t_coupled = t.min(model.tau());
        let coupled: Vec<OperatorMatrix> = (0..n)
            .map(|r| model.propagator(r, t_coupled))
            .collect::<Result<Vec<_>>>()?;
        let free: Option<Vec<OperatorMatrix>> = if t > model.tau() {
            Some(
                (0..n)
                    .map(|r| model.free_propagator(r, t - model.tau()))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|s| {
                        let mut block =
                            coupled[r].adjoint().matmul(omega0).matmul(&coupled[s]);
                        if let Some(free) = &free {
                            block = free[r].adjoint().matmul(&block).matmul(&free[s]);
                        }
                        block
                    })
                    .collect()
            })
            .collect()
    };

    let amplitudes = model.object().amplitudes().to_vec();
    let phi = assemble_phi(&amplitudes, &blocks)?;
    Ok(EvolvedState {
        t,
        phi,
        omega_blocks: blocks,
        amplitudes,
    })
}

/// `Φ = Σ_{r,s} c_r c̄_s |u_r⟩⟨u_s| ⊗ Ω_{r,s}`.
fn assemble_phi(
    amplitudes: &[Complex64],
    blocks: &[Vec<OperatorMatrix>],
) -> Result<DensityMatrix> {
    let n = amplitudes.len();
    let big_n = blocks[0][0].dim();
    let dim = n * big_n;
    let mut data: Array2<Complex64> = Array2::zeros((dim, dim));
    for r in 0..n {
        for s in 0..n {
            let weight = amplitudes[r] * amplitudes[s].conj();
            let block = blocks[r][s].data();
            for i in 0..big_n {
                for j in 0..big_n {
                    data[(r * big_n + i, s * big_n + j)] = weight * block[(i, j)];
                }
            }
        }
    }
    DensityMatrix::new(OperatorMatrix::from_array(data)?)
}
