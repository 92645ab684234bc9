//! The distinctness-based measurement predicate under component-wise
//! unitary evolution of declared ensembles.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::qalgebra::{
    spectral_projectors_of, tensor, DensityMatrix, HermitianEigen, OperatorMatrix, StateVector,
};
use crate::tolerances::{DISTINCT_TOL, TOL_NORM};

/// A declared ensemble decomposition `{(c_n, φ_n)}` of a mixed state.
///
/// Density matrices do not determine their decompositions, so the
/// decomposition is carried explicitly and evolution acts component-wise
/// with unchanged weights.
#[derive(Debug, Clone)]
pub struct Ensemble {
    components: Vec<(f64, StateVector)>,
}

impl Ensemble {
    pub fn new(components: Vec<(f64, StateVector)>) -> Result<Self> {
        if components.is_empty() {
            return Err(CoreError::Shape {
                context: "Ensemble components",
                got: 0,
                expected: 1,
            });
        }
        let dim = components[0].1.dim();
        let mut total = 0.0;
        for (w, v) in &components {
            if *w <= 0.0 {
                return Err(CoreError::Contract {
                    context: "Ensemble weights (must be positive)",
                    residual: *w,
                    tolerance: 0.0,
                });
            }
            if v.dim() != dim {
                return Err(CoreError::Shape {
                    context: "Ensemble component dimension",
                    got: v.dim(),
                    expected: dim,
                });
            }
            total += w;
        }
        let residual = (total - 1.0).abs();
        if residual > TOL_NORM {
            return Err(CoreError::Contract {
                context: "Ensemble weights (must sum to 1)",
                residual,
                tolerance: TOL_NORM,
            });
        }
        Ok(Self { components })
    }

    pub fn pure(v: StateVector) -> Self {
        Self {
            components: vec![(1.0, v)],
        }
    }

    pub fn components(&self) -> &[(f64, StateVector)] {
        &self.components
    }

    /// Component-wise unitary evolution with unchanged weights.
    pub fn evolve(&self, u: &OperatorMatrix) -> Result<Ensemble> {
        let mut out = Vec::with_capacity(self.components.len());
        for (w, v) in &self.components {
            if u.dim() != v.dim() {
                return Err(CoreError::Shape {
                    context: "Ensemble::evolve",
                    got: u.dim(),
                    expected: v.dim(),
                });
            }
            let amplitudes = u.data().dot(v.amplitudes());
            out.push((*w, StateVector::normalized(amplitudes)?));
        }
        Ensemble::new(out)
    }

    /// Attaches a fixed second-factor component to every member.
    pub fn tensor_components(&self, other: &Ensemble) -> Result<Ensemble> {
        let mut out = Vec::new();
        for (w1, v1) in &self.components {
            for (w2, v2) in &other.components {
                out.push((w1 * w2, v1.tensor(v2)));
            }
        }
        Ensemble::new(out)
    }

    /// The mixed state the ensemble presents.
    pub fn state(&self) -> Result<DensityMatrix> {
        let mixture: Vec<(f64, DensityMatrix)> = self
            .components
            .iter()
            .map(|(w, v)| (*w, DensityMatrix::from_pure(v)))
            .collect();
        DensityMatrix::mixture(&mixture)
    }
}

/// True when the two states assign measurably different probabilities to
/// at least one spectral projector of `a`.
pub fn a_distinct(w1: &DensityMatrix, w2: &DensityMatrix, a: &OperatorMatrix) -> Result<bool> {
    if w1.dim() != w2.dim() || w1.dim() != a.dim() {
        return Err(CoreError::Shape {
            context: "a_distinct dimensions",
            got: w2.dim(),
            expected: w1.dim(),
        });
    }
    for (_, projector) in spectral_projectors_of(a)? {
        let p1 = w1.expectation(&projector);
        let p2 = w2.expectation(&projector);
        if (p1 - p2).abs() > DISTINCT_TOL {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Verdict of the distinctness predicate.
#[derive(Debug, Clone)]
pub struct FineBrownVerdict {
    /// True when every object-distinct probe pair stays pointer-distinct.
    pub is_measurement: bool,
    /// `(k, k′, still distinct after U)` for each object-distinct pair.
    pub pairs: Vec<(usize, usize, bool)>,
}

/// Checks whether `u` transfers object distinctions to the pointer: for
/// every pair of probe ensembles distinct with respect to `a_obj`, the
/// evolved composites must be distinct with respect to `I ⊗ a_app`.
///
/// Evolution is component-wise over the declared decompositions (probes ×
/// spectral components of the apparatus preparation) with weights carried
/// through unchanged.
pub fn fine_brown_is_measurement(
    u: &OperatorMatrix,
    a_obj: &OperatorMatrix,
    a_app: &OperatorMatrix,
    w_app: &DensityMatrix,
    probes: &[Ensemble],
) -> Result<FineBrownVerdict> {
    a_obj.require_hermitian("fine_brown object observable")?;
    a_app.require_hermitian("fine_brown pointer observable")?;
    let unit_residual = u.unitarity_residual();
    if unit_residual > crate::tolerances::TOL_UNIT {
        return Err(CoreError::Contract {
            context: "fine_brown unitary",
            residual: unit_residual,
            tolerance: crate::tolerances::TOL_UNIT,
        });
    }

    // The apparatus preparation's declared decomposition is its spectral
    // one.
    let app_eigen = HermitianEigen::new(w_app.op())?;
    let mut app_components = Vec::new();
    for (k, lam) in app_eigen.eigenvalues().iter().enumerate() {
        if *lam > 1e-12 {
            app_components.push((*lam, StateVector::normalized(app_eigen.eigenvector(k))?));
        }
    }
    let app_ensemble = Ensemble::new(app_components)?;

    let probe_states: Vec<DensityMatrix> =
        probes.iter().map(|e| e.state()).collect::<Result<_>>()?;
    let pointer_total = tensor(&OperatorMatrix::identity(a_obj.dim()), a_app)?;

    let mut pairs = Vec::new();
    let mut all_pass = true;
    for k in 0..probes.len() {
        for k2 in (k + 1)..probes.len() {
            if !a_distinct(&probe_states[k], &probe_states[k2], a_obj)? {
                continue;
            }
            let final_k = probes[k]
                .tensor_components(&app_ensemble)?
                .evolve(u)?
                .state()?;
            let final_k2 = probes[k2]
                .tensor_components(&app_ensemble)?
                .evolve(u)?
                .state()?;
            let distinct = a_distinct(&final_k, &final_k2, &pointer_total)?;
            all_pass &= distinct;
            pairs.push((k, k2, distinct));
        }
    }
    if pairs.is_empty() {
        return Err(CoreError::Contract {
            context: "fine_brown probes (need at least one object-distinct pair)",
            residual: probes.len() as f64,
            tolerance: 2.0,
        });
    }
    Ok(FineBrownVerdict {
        is_measurement: all_pass,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::insolubility::mixture::is_pointer_mixture;
    use crate::sewell::MacroAlgebra;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn controlled_shift() -> OperatorMatrix {
        OperatorMatrix::from_rows(
            4,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn distinctness_detects_and_ignores() {
        let z = OperatorMatrix::pauli_z();
        let e0 = DensityMatrix::from_pure(&StateVector::basis(2, 0).unwrap());
        let e1 = DensityMatrix::from_pure(&StateVector::basis(2, 1).unwrap());
        assert!(a_distinct(&e0, &e1, &z).unwrap());
        assert!(!a_distinct(&e0, &e0, &z).unwrap());
        // Maximally mixed states agree on every projector of any observable.
        let m = DensityMatrix::maximally_mixed(2);
        assert!(!a_distinct(&m, &m, &OperatorMatrix::pauli_x()).unwrap());
    }

    #[test]
    fn controlled_shift_is_a_measurement() {
        // Hand evaluation: pointer distributions (1,0) vs (0,1).
        let probes = vec![
            Ensemble::pure(StateVector::basis(2, 0).unwrap()),
            Ensemble::pure(StateVector::basis(2, 1).unwrap()),
        ];
        let verdict = fine_brown_is_measurement(
            &controlled_shift(),
            &OperatorMatrix::pauli_z(),
            &OperatorMatrix::pauli_z(),
            &DensityMatrix::from_pure(&StateVector::basis(2, 0).unwrap()),
            &probes,
        )
        .unwrap();
        assert!(verdict.is_measurement);
        assert_eq!(verdict.pairs, vec![(0, 1, true)]);
    }

    #[test]
    fn idle_unitary_is_not_a_measurement() {
        let probes = vec![
            Ensemble::pure(StateVector::basis(2, 0).unwrap()),
            Ensemble::pure(StateVector::basis(2, 1).unwrap()),
        ];
        let verdict = fine_brown_is_measurement(
            &OperatorMatrix::identity(4),
            &OperatorMatrix::pauli_z(),
            &OperatorMatrix::pauli_z(),
            &DensityMatrix::from_pure(&StateVector::basis(2, 0).unwrap()),
            &probes,
        )
        .unwrap();
        assert!(!verdict.is_measurement);
    }

    #[test]
    fn too_few_distinct_probes_is_vacuous() {
        let probes = vec![Ensemble::pure(StateVector::basis(2, 0).unwrap())];
        let err = fine_brown_is_measurement(
            &controlled_shift(),
            &OperatorMatrix::pauli_z(),
            &OperatorMatrix::pauli_z(),
            &DensityMatrix::from_pure(&StateVector::basis(2, 0).unwrap()),
            &probes,
        )
        .unwrap_err();
        assert!(matches!(err, CoreError::Contract { .. }));
    }

    #[test]
    fn superposed_probe_yields_non_mixture_final_state() {
        // The faithful scheme turns the superposed probe into an entangled
        // final ensemble that no pointer mixture reproduces.
        let s = 0.5_f64.sqrt();
        let probe = Ensemble::pure(StateVector::from_slice(&[c(s, 0.0), c(s, 0.0)]).unwrap());
        let app = Ensemble::pure(StateVector::basis(2, 0).unwrap());
        let final_state = probe
            .tensor_components(&app)
            .unwrap()
            .evolve(&controlled_shift())
            .unwrap()
            .state()
            .unwrap();
        let pointer = MacroAlgebra::from_index_partition(
            2,
            &[vec![], vec![0], vec![1]],
            vec![1.0, -1.0],
            vec![2, 1],
        )
        .unwrap();
        let check = is_pointer_mixture(&final_state, &pointer, 1e-10).unwrap();
        assert!(!check.is_mixture);
        assert!((check.off_block_norm - s).abs() < 1e-6);
    }
}
