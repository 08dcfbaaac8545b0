//! Pure states and block-sparse density matrices over a sector basis.
//!
//! Density matrices are stored as a map from sector pairs `(k, l)` to dense
//! blocks holding the coefficients `ρ_{kσσ',lττ'}`; rows are the composite
//! index `(σ, σ')` with `σ` varying slowest. Block `(l, k)` is always the
//! conjugate transpose of block `(k, l)`, exactly-zero blocks are omitted,
//! and every constructor returns a state that passes [`DensityMatrix::validate`].

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::numerics::{self, TolerancePolicy};

fn is_zero_block(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Product of per-mode `√(n_i!)` factors: the norm of `Π (a_i†)^{n_i} |0⟩`.
fn creation_norm(occ: &[u32]) -> f64 {
    occ.iter().map(|&n| factorial(n).sqrt()).product()
}

/// Normalized pure state of `N` bosons over a mode bipartition.
#[derive(Debug, Clone)]
pub struct PureState {
    basis: Arc<FockBasis>,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Wrap an amplitude vector, requiring unit norm within `trace_tol`.
    pub fn new(
        basis: Arc<FockBasis>,
        amplitudes: DVector<Complex64>,
        policy: &TolerancePolicy,
    ) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::ShapeMismatch {
                rows: amplitudes.len(),
                cols: 1,
                expected_rows: basis.dim(),
                expected_cols: 1,
            });
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > policy.trace_tol {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(PureState { basis, amplitudes })
    }

    /// Wrap without checks; test backdoor for exercising rejection paths.
    #[cfg(test)]
    pub(crate) fn new_unchecked(basis: Arc<FockBasis>, amplitudes: DVector<Complex64>) -> Self {
        PureState { basis, amplitudes }
    }

    /// Wrap and normalize an amplitude vector; rejects the zero vector.
    pub fn normalized(basis: Arc<FockBasis>, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::ShapeMismatch {
                rows: amplitudes.len(),
                cols: 1,
                expected_rows: basis.dim(),
                expected_cols: 1,
            });
        }
        let norm = amplitudes.norm();
        if norm < 1e-150 {
            return Err(Error::ZeroState);
        }
        Ok(PureState {
            basis,
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// Amplitude on the basis vector `|k, σ; N-k, σ'⟩`.
    pub fn amplitude(&self, k: usize, s: usize, sp: usize) -> Result<Complex64> {
        Ok(self.amplitudes[self.basis.flat_index(k, s, sp)?])
    }

    /// Sector-`k` amplitudes reshaped to the `d1(k) × d2(k)` coefficient
    /// matrix `C^(k)` with rows `σ` and columns `σ'`.
    pub fn sector_matrix(&self, k: usize) -> Result<DMatrix<Complex64>> {
        let shape = self.basis.sector(k)?;
        let offset = self.basis.offset(k)?;
        Ok(DMatrix::from_fn(shape.d1, shape.d2, |s, sp| {
            self.amplitudes[offset + s * shape.d2 + sp]
        }))
    }

    /// Squared amplitude weight held by sector `k`.
    pub fn sector_weight(&self, k: usize) -> Result<f64> {
        let shape = self.basis.sector(k)?;
        let offset = self.basis.offset(k)?;
        Ok(self
            .amplitudes
            .as_slice()[offset..offset + shape.dim()]
            .iter()
            .map(|z| z.norm_sqr())
            .sum())
    }
}

/// Polynomial in one party's creation operators: terms `(coefficient,
/// per-mode degrees)`.
#[derive(Debug, Clone)]
pub struct PolynomialSpec {
    terms: Vec<(Complex64, Vec<u32>)>,
}

impl PolynomialSpec {
    pub fn new(terms: Vec<(Complex64, Vec<u32>)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyPolynomial);
        }
        Ok(PolynomialSpec { terms })
    }

    pub fn terms(&self) -> &[(Complex64, Vec<u32>)] {
        &self.terms
    }

    /// Common total degree of all monomials, or an error when inhomogeneous.
    pub fn homogeneous_degree(&self) -> Result<usize> {
        let degrees: Vec<usize> = self
            .terms
            .iter()
            .map(|(_, d)| d.iter().map(|&x| x as usize).sum())
            .collect();
        if degrees.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::InhomogeneousPolynomial { degrees });
        }
        Ok(degrees[0])
    }

    fn check_modes(&self, modes: usize) -> Result<()> {
        for (_, d) in &self.terms {
            if d.len() != modes {
                return Err(Error::MonomialLength {
                    len: d.len(),
                    modes,
                });
            }
        }
        Ok(())
    }
}

/// Fock basis state `|occ⟩` as a pure state.
pub fn from_fock_occupation(basis: &Arc<FockBasis>, occ: &[u32]) -> Result<PureState> {
    let (k, s, sp) = basis.index_of(occ)?;
    let mut amplitudes = DVector::zeros(basis.dim());
    amplitudes[basis.flat_index(k, s, sp)?] = Complex64::new(1.0, 0.0);
    Ok(PureState {
        basis: Arc::clone(basis),
        amplitudes,
    })
}

/// Normalized state `P(a†) Q(b†) |0⟩` for local polynomials `P` on the
/// first party and `Q` on the second.
///
/// `P` must be homogeneous of some degree `k₀` and `Q` of degree `N - k₀`;
/// each applied monomial contributes the bosonic factor `Π √(n_i!)`.
/// The result is a product state supported on sector `k₀`.
pub fn from_local_polynomials(
    basis: &Arc<FockBasis>,
    p: &PolynomialSpec,
    q: &PolynomialSpec,
) -> Result<PureState> {
    let bp = basis.bipartition();
    p.check_modes(bp.left())?;
    q.check_modes(bp.right())?;
    let k0 = p.homogeneous_degree()?;
    let deg_q = q.homogeneous_degree()?;
    let n = basis.n_particles() as usize;
    if k0 + deg_q != n {
        return Err(Error::DegreeMismatch {
            left_degree: k0,
            right_degree: deg_q,
            particles: n,
        });
    }
    let mut amplitudes: DVector<Complex64> = DVector::zeros(basis.dim());
    for (cp, left) in p.terms() {
        for (cq, right) in q.terms() {
            let mut occ = left.clone();
            occ.extend_from_slice(right);
            let (k, s, sp) = basis.index_of(&occ)?;
            let factor = creation_norm(left) * creation_norm(right);
            amplitudes[basis.flat_index(k, s, sp)?] += cp * cq * factor;
        }
    }
    if amplitudes.norm() < 1e-150 {
        return Err(Error::ZeroState);
    }
    PureState::normalized(Arc::clone(basis), amplitudes)
}

/// Density matrix in sector-block form.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    basis: Arc<FockBasis>,
    blocks: BTreeMap<(usize, usize), DMatrix<Complex64>>,
}

impl DensityMatrix {
    /// Build from explicit blocks and validate the result.
    pub fn from_blocks(
        basis: Arc<FockBasis>,
        blocks: BTreeMap<(usize, usize), DMatrix<Complex64>>,
        policy: &TolerancePolicy,
    ) -> Result<Self> {
        let rho = Self::from_blocks_unvalidated(basis, blocks)?;
        rho.validate(policy)?;
        Ok(rho)
    }

    /// Build from blocks whose validity is guaranteed by construction.
    /// Shapes are still checked; exactly-zero blocks are dropped.
    pub(crate) fn from_blocks_unvalidated(
        basis: Arc<FockBasis>,
        blocks: BTreeMap<(usize, usize), DMatrix<Complex64>>,
    ) -> Result<Self> {
        let n = basis.n_particles() as usize;
        let mut kept = BTreeMap::new();
        for ((k, l), block) in blocks {
            let max = n;
            if k > max || l > max {
                return Err(Error::SectorOutOfRange { k: k.max(l), max });
            }
            let rows = basis.sector(k)?.dim();
            let cols = basis.sector(l)?.dim();
            if block.nrows() != rows || block.ncols() != cols {
                return Err(Error::ShapeMismatch {
                    rows: block.nrows(),
                    cols: block.ncols(),
                    expected_rows: rows,
                    expected_cols: cols,
                });
            }
            if !is_zero_block(&block) {
                kept.insert((k, l), block);
            }
        }
        Ok(DensityMatrix {
            basis,
            blocks: kept,
        })
    }

    /// Slice a dense matrix into sector blocks and validate.
    pub fn from_dense(
        basis: Arc<FockBasis>,
        dense: &DMatrix<Complex64>,
        policy: &TolerancePolicy,
    ) -> Result<Self> {
        let dim = basis.dim();
        if dense.nrows() != dim || dense.ncols() != dim {
            return Err(Error::ShapeMismatch {
                rows: dense.nrows(),
                cols: dense.ncols(),
                expected_rows: dim,
                expected_cols: dim,
            });
        }
        let n = basis.n_particles() as usize;
        let mut blocks = BTreeMap::new();
        for k in 0..=n {
            let (rk, ok) = (basis.sector(k)?.dim(), basis.offset(k)?);
            if rk == 0 {
                continue;
            }
            for l in 0..=n {
                let (rl, ol) = (basis.sector(l)?.dim(), basis.offset(l)?);
                if rl == 0 {
                    continue;
                }
                let block = dense.view((ok, ol), (rk, rl)).into_owned();
                blocks.insert((k, l), block);
            }
        }
        Self::from_blocks(basis, blocks, policy)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// Stored nonzero blocks, keyed by `(k, l)`.
    pub fn blocks(&self) -> &BTreeMap<(usize, usize), DMatrix<Complex64>> {
        &self.blocks
    }

    pub fn block(&self, k: usize, l: usize) -> Option<&DMatrix<Complex64>> {
        self.blocks.get(&(k, l))
    }

    /// Diagonal minor `ρ_k` as a dense block (zeros when absent).
    pub fn minor(&self, k: usize) -> Result<DMatrix<Complex64>> {
        let d = self.basis.sector(k)?.dim();
        Ok(match self.blocks.get(&(k, k)) {
            Some(b) => b.clone(),
            None => DMatrix::zeros(d, d),
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks
            .iter()
            .filter(|((k, l), _)| k == l)
            .map(|(_, b)| b.trace())
            .sum()
    }

    /// Assemble the full dense matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.basis.dim();
        let mut dense = DMatrix::zeros(dim, dim);
        for ((k, l), block) in &self.blocks {
            let ok = self.basis.offset(*k).expect("stored block in range");
            let ol = self.basis.offset(*l).expect("stored block in range");
            dense
                .view_mut((ok, ol), (block.nrows(), block.ncols()))
                .copy_from(block);
        }
        dense
    }

    /// Check Hermiticity, positive semidefiniteness (scale-aware floor),
    /// and unit trace against the policy.
    pub fn validate(&self, policy: &TolerancePolicy) -> Result<()> {
        let dense = self.to_dense();
        let dev = numerics::hermiticity_deviation(&dense);
        if dev > policy.hermiticity_tol {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: policy.hermiticity_tol,
            });
        }
        let trace = dense.trace();
        if (trace.re - 1.0).abs() > policy.trace_tol {
            return Err(Error::BadTrace {
                trace: trace.re,
                expected: 1.0,
            });
        }
        numerics::check_psd(&dense, policy)
    }

    /// `true` when the operands address the same particle number and
    /// bipartition.
    pub fn same_basis(&self, other: &DensityMatrix) -> bool {
        self.basis.n_particles() == other.basis.n_particles()
            && self.basis.bipartition() == other.basis.bipartition()
    }
}

/// Projector `|ψ⟩⟨ψ|` in block form.
pub fn pure_to_density(psi: &PureState) -> DensityMatrix {
    let basis = Arc::clone(psi.basis());
    let n = basis.n_particles() as usize;
    let amps = psi.amplitudes();
    let mut blocks = BTreeMap::new();
    for k in 0..=n {
        let (rk, ok) = (basis.sector(k).unwrap().dim(), basis.offset(k).unwrap());
        for l in 0..=n {
            let (rl, ol) = (basis.sector(l).unwrap().dim(), basis.offset(l).unwrap());
            let block = DMatrix::from_fn(rk, rl, |i, j| amps[ok + i] * amps[ol + j].conj());
            if !is_zero_block(&block) {
                blocks.insert((k, l), block);
            }
        }
    }
    DensityMatrix {
        basis,
        blocks,
    }
}

/// Convex mixture of density matrices.
pub fn mix_density(
    weights: &[f64],
    states: &[DensityMatrix],
    policy: &TolerancePolicy,
) -> Result<DensityMatrix> {
    let sum: f64 = weights.iter().sum();
    if weights.len() != states.len()
        || weights.iter().any(|&w| w < 0.0)
        || (sum - 1.0).abs() > policy.trace_tol
    {
        return Err(Error::BadWeights { sum });
    }
    let first = states.first().ok_or(Error::BadWeights { sum })?;
    let basis = Arc::clone(first.basis());
    let mut blocks: BTreeMap<(usize, usize), DMatrix<Complex64>> = BTreeMap::new();
    for (w, rho) in weights.iter().zip(states) {
        if !first.same_basis(rho) {
            return Err(Error::BasisMismatch);
        }
        for (key, block) in rho.blocks() {
            let scaled = block * Complex64::new(*w, 0.0);
            blocks
                .entry(*key)
                .and_modify(|acc| *acc += &scaled)
                .or_insert(scaled);
        }
    }
    DensityMatrix::from_blocks_unvalidated(basis, blocks)
}

/// Convex mixture of pure-state projectors.
pub fn mix(
    weights: &[f64],
    states: &[PureState],
    policy: &TolerancePolicy,
) -> Result<DensityMatrix> {
    let projectors: Vec<DensityMatrix> = states.iter().map(pure_to_density).collect();
    mix_density(weights, &projectors, policy)
}

/// Ginibre-induced random density matrix: `ρ = GG†/Tr(GG†)` with `G` a
/// `dim × rank` complex standard Gaussian matrix seeded by `seed`.
pub fn random_density(basis: &Arc<FockBasis>, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let dim = basis.dim();
    if rank < 1 || rank > dim {
        return Err(Error::RankOutOfRange { rank, max: dim });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let g = DMatrix::from_fn(dim, rank, |_, _| {
        // The fill order is part of the determinism contract.
        Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))
    });
    let mut rho = &g * g.adjoint();
    let trace = rho.trace().re;
    rho /= Complex64::new(trace, 0.0);
    DensityMatrix::from_dense(Arc::clone(basis), &rho, &TolerancePolicy::default())
}

/// Random normalized pure state with Gaussian amplitudes.
pub fn random_pure(basis: &Arc<FockBasis>, seed: u64) -> Result<PureState> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let v = DVector::from_fn(basis.dim(), |_, _| {
        Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))
    });
    PureState::normalized(Arc::clone(basis), v)
}

/// Random homogeneous polynomial of the given degree: every degree-`degree`
/// monomial over `modes` modes, with Gaussian complex coefficients.
pub fn random_polynomial(degree: u32, modes: usize, seed: u64) -> Result<PolynomialSpec> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let terms = crate::fock::enumerate_occupations(degree, modes)
        .into_iter()
        .map(|occ| {
            (
                Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)),
                occ,
            )
        })
        .collect();
    PolynomialSpec::new(terms)
}

/// Drop every off-diagonal sector block. Idempotent and trace-preserving;
/// this is also the infinite-time limit of dephasing.
pub fn block_diagonal_project(rho: &DensityMatrix) -> DensityMatrix {
    let blocks: BTreeMap<(usize, usize), DMatrix<Complex64>> = rho
        .blocks()
        .iter()
        .filter(|((k, l), _)| k == l)
        .map(|(key, block)| (*key, block.clone()))
        .collect();
    DensityMatrix {
        basis: Arc::clone(rho.basis()),
        blocks,
    }
}

/// Mix `ρ` with a random cross-sector pure state: `(1-ε) ρ + ε |τ⟩⟨τ|`.
///
/// The perturbing state has support on at least two sectors whenever the
/// basis offers more than one populated sector.
pub fn perturb_offdiagonal(rho: &DensityMatrix, epsilon: f64, seed: u64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::ParameterRange {
            name: "epsilon",
            value: epsilon,
            range: "[0, 1]",
        });
    }
    if epsilon == 0.0 {
        return Ok(rho.clone());
    }
    let basis = rho.basis();
    let populated = basis.sectors().iter().filter(|s| s.dim() > 0).count();
    let mut tau = random_pure(basis, seed)?;
    if populated >= 2 {
        for attempt in 0..64 {
            let supported = (0..=basis.n_particles() as usize)
                .filter(|&k| tau.sector_weight(k).unwrap() > 1e-6)
                .count();
            if supported >= 2 {
                break;
            }
            tau = random_pure(basis, seed.wrapping_add(1 + attempt))?;
        }
    }
    let tau_rho = pure_to_density(&tau);
    let mut blocks: BTreeMap<(usize, usize), DMatrix<Complex64>> = rho
        .blocks()
        .iter()
        .map(|(key, block)| (*key, block * Complex64::new(1.0 - epsilon, 0.0)))
        .collect();
    for (key, block) in tau_rho.blocks() {
        let scaled = block * Complex64::new(epsilon, 0.0);
        blocks
            .entry(*key)
            .and_modify(|acc| *acc += &scaled)
            .or_insert(scaled);
    }
    DensityMatrix::from_blocks_unvalidated(Arc::clone(basis), blocks)
}

/// Block-diagonal state on the `N=4, M=4, m=2` basis whose `k=2` sector
/// carries a caller-supplied two-qutrit matrix.
///
/// The nine `k=2` Fock vectors `|σ; σ'⟩` are identified with the two-qutrit
/// product basis `|i⟩⊗|j⟩` via `(σ, σ') ↦ i·3 + j` in the basis ordering,
/// which is exactly the sector's composite row index. Sectors `k ≠ 2` are
/// filled with `fillers[k]` when given, else with the normalized identity
/// (a mixture of Fock projectors, hence separable).
pub fn embed_qutrit_block(
    basis: &Arc<FockBasis>,
    sigma: &DMatrix<Complex64>,
    weights: &[f64],
    fillers: &BTreeMap<usize, DMatrix<Complex64>>,
    policy: &TolerancePolicy,
) -> Result<DensityMatrix> {
    let bp = basis.bipartition();
    if basis.n_particles() != 4 || bp.modes() != 4 || bp.left() != 2 {
        return Err(Error::WrongBipartition {
            required: "N = 4, M = 4, m = 2",
            m: bp.left(),
            rest: bp.right(),
        });
    }
    if sigma.nrows() != 9 || sigma.ncols() != 9 {
        return Err(Error::ShapeMismatch {
            rows: sigma.nrows(),
            cols: sigma.ncols(),
            expected_rows: 9,
            expected_cols: 9,
        });
    }
    let trace = sigma.trace();
    if (trace.re - 1.0).abs() > policy.trace_tol {
        return Err(Error::BadTrace {
            trace: trace.re,
            expected: 1.0,
        });
    }
    numerics::check_psd(sigma, policy)?;
    let sum: f64 = weights.iter().sum();
    if weights.len() != 5 || weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > policy.trace_tol
    {
        return Err(Error::BadWeights { sum });
    }
    let mut blocks = BTreeMap::new();
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let d = basis.sector(k)?.dim();
        let block = if k == 2 {
            sigma * Complex64::new(w, 0.0)
        } else {
            match fillers.get(&k) {
                Some(f) => {
                    if f.nrows() != d || f.ncols() != d {
                        return Err(Error::ShapeMismatch {
                            rows: f.nrows(),
                            cols: f.ncols(),
                            expected_rows: d,
                            expected_cols: d,
                        });
                    }
                    let ft = f.trace();
                    if (ft.re - 1.0).abs() > policy.trace_tol {
                        return Err(Error::BadTrace {
                            trace: ft.re,
                            expected: 1.0,
                        });
                    }
                    numerics::check_psd(f, policy)?;
                    f * Complex64::new(w, 0.0)
                }
                None => {
                    DMatrix::identity(d, d) * Complex64::new(w / d as f64, 0.0)
                }
            }
        };
        blocks.insert((k, k), block);
    }
    DensityMatrix::from_blocks(Arc::clone(basis), blocks, policy)
}

/// The a-parameterized two-qutrit state that is PPT yet entangled for
/// `0 < a < 1` (bound entanglement), on the product basis `|i⟩⊗|j⟩` with
/// flat index `i·3 + j`.
pub fn horodecki_qutrit_state(a: f64) -> Result<DMatrix<Complex64>> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::ParameterRange {
            name: "a",
            value: a,
            range: "[0, 1]",
        });
    }
    let norm = 1.0 / (8.0 * a + 1.0);
    let b = (1.0 + a) / 2.0;
    let c = (1.0 - a * a).sqrt() / 2.0;
    let mut m = DMatrix::<Complex64>::zeros(9, 9);
    let re = |x: f64| Complex64::new(x, 0.0);
    // Coherences among |00⟩, |11⟩, |22⟩ (indices 0, 4, 8) and the uniform
    // diagonal, with the distinguished 2x2 block on indices 6 and 8.
    for &i in &[0usize, 4, 8] {
        for &j in &[0usize, 4, 8] {
            m[(i, j)] = re(a);
        }
    }
    for &i in &[1usize, 2, 3, 5, 7] {
        m[(i, i)] = re(a);
    }
    m[(6, 6)] = re(b);
    m[(8, 8)] = re(b);
    m[(6, 8)] = re(c);
    m[(8, 6)] = re(c);
    Ok(m * re(norm))
}

/// Incoherent mixture of fixed-`N` states sharing one bipartition.
#[derive(Debug)]
pub struct NumberSectorMixture {
    components: Vec<(f64, DensityMatrix)>,
}

impl NumberSectorMixture {
    /// Validate weights (non-negative, summing to 1) and a shared
    /// bipartition across components; particle numbers may differ.
    pub fn new(components: Vec<(f64, DensityMatrix)>, policy: &TolerancePolicy) -> Result<Self> {
        let sum: f64 = components.iter().map(|(w, _)| w).sum();
        if components.is_empty() || (sum - 1.0).abs() > policy.trace_tol {
            return Err(Error::BadWeights { sum });
        }
        for (w, rho) in &components {
            if *w < 0.0 {
                return Err(Error::NegativeWeight {
                    weight: *w,
                    particles: rho.basis().n_particles() as usize,
                });
            }
            rho.validate(policy)?;
        }
        let bp = components[0].1.basis().bipartition();
        if components.iter().any(|(_, rho)| rho.basis().bipartition() != bp) {
            return Err(Error::BasisMismatch);
        }
        Ok(NumberSectorMixture { components })
    }

    pub fn components(&self) -> &[(f64, DensityMatrix)] {
        &self.components
    }
}

/// The NOON state (|N;0⟩ + |0;N⟩)/√2 on the two-mode basis with the mode
/// bipartition (1, 1). Maximally mode-entangled at every N; its negativity
/// is 1/2 regardless of N.
pub fn noon_state(n: u32) -> Result<PureState> {
    if n == 0 {
        return Err(Error::ParameterRange {
            name: "N",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let basis = FockBasis::new(n, crate::fock::ModeBipartition::new(2, 1)?)?;
    let mut v = DVector::zeros(basis.dim());
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (k0, s0, sp0) = basis.index_of(&[n, 0])?;
    let (k1, s1, sp1) = basis.index_of(&[0, n])?;
    let i0 = basis.flat_index(k0, s0, sp0)?;
    let i1 = basis.flat_index(k1, s1, sp1)?;
    v[i0] = inv_sqrt2;
    v[i1] = inv_sqrt2;
    PureState::new(basis, v, &TolerancePolicy::default())
}
