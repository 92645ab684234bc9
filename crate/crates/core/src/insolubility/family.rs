//! Families of conserving measurement schemes, random sampling over them,
//! and seeded minimization of the malfunction probability.
//!
//! A conserving unitary is parametrized through its Hermitian generator
//! restricted to the commutant of the total conserved quantity: the
//! generator is an arbitrary Hermitian matrix inside each eigenblock of
//! `L_total` and zero between blocks, so `U = exp(iG)` commutes with
//! `L_total` exactly (up to the spectral grouping tolerance).

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{CoreError, Result};
use crate::insolubility::malfunction::{malfunction_epsilon, yanase_bound_check, YanaseVerdict};
use crate::insolubility::scheme::{ConservedQuantity, MeasurementScheme};
use crate::qalgebra::{expm_hermitian, DensityMatrix, HermitianEigen, OperatorMatrix, StateVector};
use crate::sewell::MacroAlgebra;

/// Diagonal values closer than this share a commutant block.
const BLOCK_GROUP_TOL: f64 = 1e-9;

/// A parametrized family of schemes whose unitaries conserve a fixed
/// additive quantity.
#[derive(Debug, Clone)]
pub struct ConservingFamily {
    object_obs: OperatorMatrix,
    l: ConservedQuantity,
    pointer: MacroAlgebra,
    xi: StateVector,
    /// Composite basis columns arranged block by block.
    basis: Array2<Complex64>,
    /// Sizes of the commutant blocks, in basis order.
    block_sizes: Vec<usize>,
    /// For ladder-type (diagonal) families: `(object index, apparatus
    /// level)` label per composite basis column, enabling embedding of a
    /// smaller family's generator into a larger one.
    labels: Option<Vec<(usize, i64)>>,
    param_count: usize,
}

impl ConservingFamily {
    /// Builds the family for an arbitrary conserved quantity by
    /// diagonalizing `L_total` and grouping its eigenspaces.
    pub fn new(
        object_obs: OperatorMatrix,
        l: ConservedQuantity,
        pointer: MacroAlgebra,
        xi: StateVector,
    ) -> Result<Self> {
        object_obs.require_hermitian("ConservingFamily observable")?;
        let big_n = pointer.apparatus_dim();
        if l.apparatus_part().dim() != big_n || xi.dim() != big_n {
            return Err(CoreError::Shape {
                context: "ConservingFamily apparatus dimensions",
                got: l.apparatus_part().dim(),
                expected: big_n,
            });
        }
        let total = l.total()?;
        let eig = HermitianEigen::new(&total)?;
        let dim = total.dim();
        let values = eig.eigenvalues();
        // Eigenvalues ascend, so blocks are contiguous runs.
        let mut basis = Array2::zeros((dim, dim));
        let mut block_sizes = Vec::new();
        let mut col = 0;
        let mut k = 0;
        while k < dim {
            let mut size = 1;
            while k + size < dim && (values[k + size] - values[k + size - 1]).abs() <= BLOCK_GROUP_TOL
            {
                size += 1;
            }
            for m in k..k + size {
                let v = eig.eigenvector(m);
                for i in 0..dim {
                    basis[(i, col)] = v[i];
                }
                col += 1;
            }
            block_sizes.push(size);
            k += size;
        }
        let param_count = block_sizes.iter().map(|d| d * d).sum();
        Ok(Self {
            object_obs,
            l,
            pointer,
            xi,
            basis,
            block_sizes,
            labels: None,
            param_count,
        })
    }

    /// The canonical spin-exchange setting: measure `σ_x` on a qubit while
    /// `σ_z ⊗ I + I ⊗ ladder` is conserved.
    ///
    /// The apparatus ladder is `diag(N−1, N−3, …, −(N−1))` (levels in the
    /// same units as `σ_z`), and the pointer cells split the ladder by
    /// sign with zero levels resting in cell 0. Conservation only couples
    /// adjacent levels, so the initial apparatus state needs level spread
    /// to move weight between the sign cells at all; it is the uniform
    /// superposition over the innermost level window (`{+2, 0, −2}` for
    /// odd sizes, `{+1, −1}` for even) — a state shared by every family of
    /// the same parity, so generators embed across sizes with their
    /// malfunction probability unchanged.
    pub fn yanase(apparatus_dim: usize) -> Result<Self> {
        if apparatus_dim < 2 {
            return Err(CoreError::Shape {
                context: "ConservingFamily::yanase apparatus dimension",
                got: apparatus_dim,
                expected: 2,
            });
        }
        let n = apparatus_dim;
        let levels: Vec<i64> = (0..n).map(|j| (n as i64 - 1) - 2 * j as i64).collect();
        let ladder: Vec<f64> = levels.iter().map(|d| *d as f64).collect();
        let l = ConservedQuantity::new(OperatorMatrix::pauli_z(), OperatorMatrix::diag(&ladder))?;

        let rest: Vec<usize> = (0..n).filter(|j| levels[*j] == 0).collect();
        let positive: Vec<usize> = (0..n).filter(|j| levels[*j] > 0).collect();
        let negative: Vec<usize> = (0..n).filter(|j| levels[*j] < 0).collect();
        // Eigenindex 0 of σx carries eigenvalue −1 → negative cell (2);
        // eigenindex 1 carries +1 → positive cell (1).
        let pointer = MacroAlgebra::from_index_partition(
            n,
            &[rest, positive, negative],
            vec![1.0, -1.0],
            vec![2, 1],
        )?;

        let window: &[i64] = if n % 2 == 1 { &[2, 0, -2] } else { &[1, -1] };
        let weight = Complex64::new((window.len() as f64).sqrt().recip(), 0.0);
        let mut amplitudes = ndarray::Array1::zeros(n);
        for d in window {
            let j = (0..n)
                .find(|j| levels[*j] == *d)
                .expect("window levels exist for every size of this parity");
            amplitudes[j] = weight;
        }
        let xi = StateVector::new(amplitudes)?;

        let mut family = Self::new(OperatorMatrix::pauli_x(), l, pointer, xi)?;
        // Composite index (i, j) has label (i, level_j); L_total is diagonal
        // here, so the eigenbasis is a permutation of the standard basis and
        // each basis column carries a well-defined label.
        let mut labels = vec![(0usize, 0i64); 2 * n];
        for col in 0..2 * n {
            let mut support = None;
            for row in 0..2 * n {
                if family.basis[(row, col)].norm() > 0.5 {
                    support = Some(row);
                    break;
                }
            }
            let row = support.expect("permutation basis column");
            labels[col] = (row / n, levels[row % n]);
        }
        family.labels = Some(labels);
        Ok(family)
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn apparatus_dim(&self) -> usize {
        self.pointer.apparatus_dim()
    }

    pub fn conserved(&self) -> &ConservedQuantity {
        &self.l
    }

    pub fn initial_apparatus(&self) -> &StateVector {
        &self.xi
    }

    /// Hermitian generator in the commutant defined by a parameter vector:
    /// per block, the diagonal entries followed by (re, im) pairs for the
    /// strict upper triangle.
    pub fn generator(&self, params: &[f64]) -> Result<OperatorMatrix> {
        if params.len() != self.param_count {
            return Err(CoreError::Shape {
                context: "ConservingFamily generator parameters",
                got: params.len(),
                expected: self.param_count,
            });
        }
        let dim = self.basis.nrows();
        let mut block_matrix: Array2<Complex64> = Array2::zeros((dim, dim));
        let mut offset = 0;
        let mut base = 0;
        for &size in &self.block_sizes {
            for p in 0..size {
                block_matrix[(base + p, base + p)] = Complex64::new(params[offset], 0.0);
                offset += 1;
            }
            for p in 0..size {
                for q in (p + 1)..size {
                    let entry = Complex64::new(params[offset], params[offset + 1]);
                    offset += 2;
                    block_matrix[(base + p, base + q)] = entry;
                    block_matrix[(base + q, base + p)] = entry.conj();
                }
            }
            base += size;
        }
        let mut basis_dag = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                basis_dag[(i, j)] = self.basis[(j, i)].conj();
            }
        }
        let g = self.basis.dot(&block_matrix).dot(&basis_dag);
        OperatorMatrix::from_array(g)
    }

    /// Reads the parameter vector back off a generator known to lie in the
    /// commutant.
    pub fn params_from_generator(&self, g: &OperatorMatrix) -> Result<Vec<f64>> {
        let dim = self.basis.nrows();
        if g.dim() != dim {
            return Err(CoreError::Shape {
                context: "ConservingFamily::params_from_generator",
                got: g.dim(),
                expected: dim,
            });
        }
        let mut basis_dag = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                basis_dag[(i, j)] = self.basis[(j, i)].conj();
            }
        }
        let in_basis = basis_dag.dot(g.data()).dot(&self.basis);
        let mut params = Vec::with_capacity(self.param_count);
        let mut base = 0;
        for &size in &self.block_sizes {
            for p in 0..size {
                params.push(in_basis[(base + p, base + p)].re);
            }
            for p in 0..size {
                for q in (p + 1)..size {
                    params.push(in_basis[(base + p, base + q)].re);
                    params.push(in_basis[(base + p, base + q)].im);
                }
            }
            base += size;
        }
        Ok(params)
    }

    /// The scheme `U = exp(iG(params))` with this family's observable,
    /// initial apparatus state, and pointer.
    pub fn scheme(&self, params: &[f64]) -> Result<MeasurementScheme> {
        let g = self.generator(params)?;
        let u = expm_hermitian(&g, 1.0)?;
        MeasurementScheme::new(
            self.object_obs.clone(),
            DensityMatrix::from_pure(&self.xi),
            u,
            self.pointer.clone(),
        )
    }

    /// Malfunction probability of the scheme at a parameter point.
    pub fn epsilon(&self, params: &[f64]) -> Result<f64> {
        Ok(malfunction_epsilon(&self.scheme(params)?)?.epsilon)
    }

    /// Gaussian parameter draw (unit-scale block entries).
    pub fn random_params(&self, rng: &mut impl Rng) -> Vec<f64> {
        (0..self.param_count).map(|_| normal(rng)).collect()
    }

    /// Re-expresses a smaller same-shape family's generator in this
    /// family's parameters, padding the new levels with zeros. Available
    /// only for ladder-type families of matching level parity.
    pub fn embed_params(&self, small: &ConservingFamily, small_params: &[f64]) -> Option<Vec<f64>> {
        let labels_big = self.labels.as_ref()?;
        let labels_small = small.labels.as_ref()?;
        let g_small = small.generator(small_params).ok()?;
        // Map label -> small basis column.
        let mut lookup = std::collections::HashMap::new();
        for (col, label) in labels_small.iter().enumerate() {
            lookup.insert(*label, col);
        }
        let dim = self.basis.nrows();
        let mut g_big: Array2<Complex64> = Array2::zeros((dim, dim));
        // Small generator entries in the small family's block basis.
        let small_in_basis = {
            let sd = small.basis.nrows();
            let mut dag = Array2::zeros((sd, sd));
            for i in 0..sd {
                for j in 0..sd {
                    dag[(i, j)] = small.basis[(j, i)].conj();
                }
            }
            dag.dot(g_small.data()).dot(&small.basis)
        };
        for p in 0..dim {
            for q in 0..dim {
                if let (Some(&sp), Some(&sq)) =
                    (lookup.get(&labels_big[p]), lookup.get(&labels_big[q]))
                {
                    g_big[(p, q)] = small_in_basis[(sp, sq)];
                }
            }
        }
        // g_big is expressed in this family's block basis already.
        let mut params = Vec::with_capacity(self.param_count);
        let mut base = 0;
        for &size in &self.block_sizes {
            for p in 0..size {
                params.push(g_big[(base + p, base + p)].re);
            }
            for p in 0..size {
                for q in (p + 1)..size {
                    params.push(g_big[(base + p, base + q)].re);
                    params.push(g_big[(base + p, base + q)].im);
                }
            }
            base += size;
        }
        Some(params)
    }
}

fn normal(rng: &mut impl Rng) -> f64 {
    // Box–Muller; both uniforms strictly inside (0, 1].
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Result of a seeded search over a conserving family.
#[derive(Debug, Clone)]
pub struct OptimizedScheme {
    pub scheme: MeasurementScheme,
    pub epsilon: f64,
    pub params: Vec<f64>,
}

/// Seeded local search for the smallest malfunction probability in a
/// family: warm starts, the zero generator, and random restarts, each
/// refined by coordinate descent with a shrinking step under a fixed
/// evaluation budget. Returns the best scheme found; makes no global
/// optimality claim.
pub fn minimize_epsilon(
    family: &ConservingFamily,
    budget: usize,
    seed: u64,
    warm_starts: &[Vec<f64>],
) -> Result<OptimizedScheme> {
    if family.param_count() == 0 {
        return Err(CoreError::Contract {
            context: "minimize_epsilon (family has no parameters)",
            residual: 0.0,
            tolerance: 0.0,
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut candidates: Vec<Vec<f64>> = warm_starts.to_vec();
    candidates.push(vec![0.0; family.param_count()]);
    for _ in 0..3 {
        candidates.push(family.random_params(&mut rng));
    }
    let per_candidate = (budget / candidates.len()).max(1);

    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in candidates {
        let mut params = start;
        let mut value = family.epsilon(&params)?;
        let mut evals = 1;
        let mut step = 0.4;
        while evals < per_candidate && step > 1e-6 {
            let mut improved = false;
            'cycle: for i in 0..family.param_count() {
                for dir in [1.0, -1.0] {
                    if evals >= per_candidate {
                        break 'cycle;
                    }
                    let mut trial = params.clone();
                    trial[i] += dir * step;
                    let trial_value = family.epsilon(&trial)?;
                    evals += 1;
                    if trial_value < value {
                        value = trial_value;
                        params = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, params));
        }
    }
    let (epsilon, params) = best.expect("at least one candidate");
    Ok(OptimizedScheme {
        scheme: family.scheme(&params)?,
        epsilon,
        params,
    })
}

/// Seeded searches across apparatus sizes with warm starts embedded from
/// the previous size of the same level parity, making the best found value
/// nonincreasing along each parity chain.
pub fn yanase_epsilon_chain(
    dims: &[usize],
    budget_per_dim: usize,
    seed: u64,
) -> Result<Vec<(usize, OptimizedScheme)>> {
    let mut out = Vec::with_capacity(dims.len());
    let mut prev: [Option<(ConservingFamily, Vec<f64>)>; 2] = [None, None];
    for (k, &dim) in dims.iter().enumerate() {
        let family = ConservingFamily::yanase(dim)?;
        let mut warm = Vec::new();
        if let Some((small_family, small_params)) = &prev[dim % 2] {
            if let Some(embedded) = family.embed_params(small_family, small_params) {
                warm.push(embedded);
            }
        }
        let optimized = minimize_epsilon(&family, budget_per_dim, seed.wrapping_add(k as u64), &warm)?;
        prev[dim % 2] = Some((family, optimized.params.clone()));
        out.push((dim, optimized));
    }
    Ok(out)
}

/// Tally of randomized bound checks.
#[derive(Debug, Clone)]
pub struct YanaseSampleSummary {
    pub total: usize,
    pub satisfied: usize,
    pub violated: usize,
    pub degenerate: usize,
    pub not_applicable: usize,
    /// Smallest `ε − 1/(8M²)` seen over applicable samples.
    pub min_margin: f64,
}

/// Draws random conserving schemes (`samples_per_dim` per apparatus size)
/// and checks the malfunction bound on each. Streams are keyed by
/// `(seed, dim)` so per-size batches are independent of iteration order.
pub fn sample_yanase_bound(
    dims: &[usize],
    samples_per_dim: usize,
    seed: u64,
) -> Result<YanaseSampleSummary> {
    let mut summary = YanaseSampleSummary {
        total: 0,
        satisfied: 0,
        violated: 0,
        degenerate: 0,
        not_applicable: 0,
        min_margin: f64::INFINITY,
    };
    for &dim in dims {
        let family = ConservingFamily::yanase(dim)?;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(dim as u64);
        for _ in 0..samples_per_dim {
            let params = family.random_params(&mut rng);
            let scheme = family.scheme(&params)?;
            let report = yanase_bound_check(&scheme, family.conserved())?;
            summary.total += 1;
            match report.verdict {
                YanaseVerdict::Satisfied => {
                    summary.satisfied += 1;
                    if let Some(bound) = report.malfunction.bound {
                        summary.min_margin =
                            summary.min_margin.min(report.malfunction.epsilon - bound);
                    }
                }
                YanaseVerdict::Violated => summary.violated += 1,
                YanaseVerdict::Degenerate => summary.degenerate += 1,
                YanaseVerdict::NotApplicable => summary.not_applicable += 1,
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::commutator;

    #[test]
    fn generators_live_in_the_commutant() {
        let family = ConservingFamily::yanase(5).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..5 {
            let params = family.random_params(&mut rng);
            let g = family.generator(&params).unwrap();
            let total = family.conserved().total().unwrap();
            assert!(commutator(&g, &total).max_abs() < 1e-10);
            let u = expm_hermitian(&g, 1.0).unwrap();
            assert!(family.conserved().conservation_residual(&u).unwrap() < 1e-10);
        }
    }

    #[test]
    fn params_round_trip_through_generator() {
        let family = ConservingFamily::yanase(4).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let params = family.random_params(&mut rng);
        let g = family.generator(&params).unwrap();
        let recovered = family.params_from_generator(&g).unwrap();
        for (a, b) in params.iter().zip(recovered.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_preserves_epsilon() {
        let small = ConservingFamily::yanase(3).unwrap();
        let big = ConservingFamily::yanase(5).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let params = small.random_params(&mut rng);
        let embedded = big.embed_params(&small, &params).unwrap();
        let eps_small = small.epsilon(&params).unwrap();
        let eps_big = big.epsilon(&embedded).unwrap();
        assert!(
            (eps_small - eps_big).abs() < 1e-10,
            "{eps_small} vs {eps_big}"
        );
    }

    #[test]
    fn commuting_target_reaches_zero_epsilon() {
        // Measuring σz under σz ⊗ I + I ⊗ ladder conservation admits an
        // exact scheme; the search should find ε ≈ 0.
        let n = 2;
        let ladder = OperatorMatrix::diag(&[1.0, -1.0]);
        let l = ConservedQuantity::new(OperatorMatrix::pauli_z(), ladder).unwrap();
        let pointer = MacroAlgebra::from_index_partition(
            n,
            &[vec![], vec![0], vec![1]],
            vec![1.0, -1.0],
            vec![2, 1],
        )
        .unwrap();
        let xi = StateVector::basis(n, 0).unwrap();
        let family =
            ConservingFamily::new(OperatorMatrix::pauli_z(), l, pointer, xi).unwrap();
        let best = minimize_epsilon(&family, 4000, 5, &[]).unwrap();
        assert!(best.epsilon < 1e-6, "found {}", best.epsilon);
    }

    #[test]
    fn empty_family_is_rejected() {
        // A 1×1 apparatus with a fully nondegenerate L_total gives only
        // singleton blocks, but params still exist (phases); a zero-param
        // family cannot arise from new(), so check the guard directly.
        let family = ConservingFamily::yanase(2).unwrap();
        assert!(family.param_count() > 0);
        let empty = ConservingFamily {
            param_count: 0,
            ..family
        };
        assert!(minimize_epsilon(&empty, 10, 0, &[]).is_err());
    }
}
