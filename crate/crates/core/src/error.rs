//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bipartition: left party has {left} modes but only {modes} modes exist (need m <= M)")]
    InvalidBipartition { left: usize, modes: usize },

    #[error("mode count must be at least 1")]
    NoModes,

    #[error("occupation vector has {len} entries, expected {modes}")]
    OccupationLength { len: usize, modes: usize },

    #[error("occupation vector sums to {got} particles, basis holds {expected}")]
    ParticleCount { got: usize, expected: usize },

    #[error("sector k = {k} out of range 0..={max}")]
    SectorOutOfRange { k: usize, max: usize },

    #[error("sector index ({index}) out of range for sector k = {k} (dimension {dim})")]
    SectorIndexOutOfRange { k: usize, index: usize, dim: usize },

    #[error("binomial C({n}, {k}) overflows")]
    BinomialOverflow { n: usize, k: usize },

    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("dense eigensolver returned non-finite eigenvalues on a {size} x {size} matrix")]
    Eigensolver { size: usize },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} below floor {floor:.3e}")]
    NotPositive { min_eigenvalue: f64, floor: f64 },

    #[error("trace is {trace:.17}, expected {expected}")]
    BadTrace { trace: f64, expected: f64 },

    #[error("state is not normalized: squared amplitudes sum to {norm_sq:.17}")]
    NotNormalized { norm_sq: f64 },

    #[error("matrix has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("extended operator would need {rows} rows x {cols} columns; cap is {cap} rows")]
    DimensionCap { rows: usize, cols: usize, cap: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("weights must be non-negative and sum to 1 (got sum {sum:.17})")]
    BadWeights { sum: f64 },

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("polynomial is empty")]
    EmptyPolynomial,

    #[error("polynomial is not homogeneous: monomial degrees {degrees:?}")]
    InhomogeneousPolynomial { degrees: Vec<usize> },

    #[error("polynomial degrees {left_degree} + {right_degree} do not add up to particle count {particles}")]
    DegreeMismatch {
        left_degree: usize,
        right_degree: usize,
        particles: usize,
    },

    #[error("polynomial monomial has {len} degrees, party has {modes} modes")]
    MonomialLength { len: usize, modes: usize },

    #[error("state produced by the polynomials has zero norm")]
    ZeroState,

    #[error("basis mismatch: operands were built over different Fock bases")]
    BasisMismatch,

    #[error("operation requires bipartition {required}, basis has (m, M-m) = ({m}, {rest})")]
    WrongBipartition {
        required: &'static str,
        m: usize,
        rest: usize,
    },

    #[error("mixture weight {weight} for particle number {particles} is negative")]
    NegativeWeight { weight: f64, particles: usize },

    #[error("parameter {name} = {value} out of range {range}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("state file: {0}")]
    StateFile(String),

    #[error("sector negativity decomposition disagrees with full re-evaluation: {lhs:.17} vs {rhs:.17}")]
    TrajectoryCrossCheck { lhs: f64, rhs: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
