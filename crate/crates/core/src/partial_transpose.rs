//! Partial transposition with respect to the first party.
//!
//! On a fixed-`N` state the partial transpose swaps first-party indices
//! between bra and ket, sending the sector block `(k, l)` into a block that
//! couples `l` first-party particles to `N - k` second-party particles.
//! [`realign_block`] produces exactly those blocks, whose singular values
//! carry the negativity; [`ExtendedOperator`] embeds the state into the
//! product of the two parties' full `0..=N`-particle spaces, where the
//! partially transposed matrix lives as an ordinary Hermitian operator.
//! The extended route is the brute-force oracle; the realigned blocks are
//! the production path.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{occupation_count, FockBasis};
use crate::states::DensityMatrix;

/// Refuse extended-operator construction above this many rows by default.
pub const DEFAULT_EXTENDED_CAP: usize = 4096;

/// Off-diagonal sector block rearranged by partial transposition.
///
/// Rows are composite `(τ, σ')` indices of shape `d1(l) · d2(k)` and
/// columns `(σ, τ')` of shape `d1(k) · d2(l)`; the entry at
/// `((τ, σ'), (σ, τ'))` is `ρ_{kσσ',lττ'}`. For `k = l` this is the
/// standard partial transpose of the minor `ρ_k`.
#[derive(Debug, Clone)]
pub struct RealignedBlock {
    pub k: usize,
    pub l: usize,
    pub matrix: DMatrix<Complex64>,
}

/// Rearrange sector block `(k, l)` of `ρ` under partial transposition.
pub fn realign_block(rho: &DensityMatrix, k: usize, l: usize) -> Result<RealignedBlock> {
    let basis = rho.basis();
    let sk = basis.sector(k)?;
    let sl = basis.sector(l)?;
    let rows = sl.d1 * sk.d2;
    let cols = sk.d1 * sl.d2;
    let matrix = match rho.block(k, l) {
        None => DMatrix::zeros(rows, cols),
        Some(block) => DMatrix::from_fn(rows, cols, |r, c| {
            let (tau, sig_p) = (r / sk.d2, r % sk.d2);
            let (sig, tau_p) = (c / sl.d2, c % sl.d2);
            block[(sig * sk.d2 + sig_p, tau * sl.d2 + tau_p)]
        }),
    };
    Ok(RealignedBlock { k, l, matrix })
}

/// Dense operator on the product of the two parties' `0..=N`-particle
/// Fock spaces, of shape `D1·D2` with `D1 = C(N+m, N)`, `D2 = C(N+M-m, N)`.
///
/// The composite index puts the first party slowest: `i1 · D2 + i2`, with
/// each party's index running over its particle sectors in increasing
/// order and over occupations in the basis enumeration order within each.
#[derive(Debug, Clone)]
pub struct ExtendedOperator {
    basis: Arc<FockBasis>,
    matrix: DMatrix<Complex64>,
    left_offsets: Vec<usize>,
    right_offsets: Vec<usize>,
    left_dim: usize,
    right_dim: usize,
}

impl ExtendedOperator {
    /// Embed `ρ` into the extended space without transposing. Fails with
    /// the offending sizes when the extended row count exceeds `cap`.
    pub fn embed(rho: &DensityMatrix, cap: usize) -> Result<Self> {
        let basis = Arc::clone(rho.basis());
        let n = basis.n_particles() as usize;
        let bp = basis.bipartition();
        let mut left_offsets = Vec::with_capacity(n + 1);
        let mut right_offsets = Vec::with_capacity(n + 1);
        let (mut left_dim, mut right_dim) = (0usize, 0usize);
        for a in 0..=n {
            left_offsets.push(left_dim);
            right_offsets.push(right_dim);
            left_dim += occupation_count(a, bp.left())?;
            right_dim += occupation_count(a, bp.right())?;
        }
        let rows = left_dim.checked_mul(right_dim).unwrap_or(usize::MAX);
        if rows > cap {
            return Err(Error::DimensionCap {
                rows,
                cols: rows,
                cap,
            });
        }
        let mut op = ExtendedOperator {
            basis: Arc::clone(&basis),
            matrix: DMatrix::zeros(rows, rows),
            left_offsets,
            right_offsets,
            left_dim,
            right_dim,
        };
        for (&(k, l), block) in rho.blocks().iter() {
            let sk = basis.sector(k)?;
            let sl = basis.sector(l)?;
            for s in 0..sk.d1 {
                for sp in 0..sk.d2 {
                    let row = op.flat(k, s, n - k, sp);
                    for t in 0..sl.d1 {
                        for tp in 0..sl.d2 {
                            let col = op.flat(l, t, n - l, tp);
                            op.matrix[(row, col)] = block[(s * sk.d2 + sp, t * sl.d2 + tp)];
                        }
                    }
                }
            }
        }
        Ok(op)
    }

    /// Composite flat index of `|a, s⟩ ⊗ |b, sp⟩`.
    fn flat(&self, a: usize, s: usize, b: usize, sp: usize) -> usize {
        (self.left_offsets[a] + s) * self.right_dim + self.right_offsets[b] + sp
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn left_dim(&self) -> usize {
        self.left_dim
    }

    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// Partial transpose on the first party: an exact entrywise permutation
    /// swapping the first-party row and column indices.
    pub fn partial_transpose(&self) -> Self {
        let (d1, d2) = (self.left_dim, self.right_dim);
        let mut out = DMatrix::zeros(self.matrix.nrows(), self.matrix.ncols());
        for i1 in 0..d1 {
            for j1 in 0..d1 {
                for i2 in 0..d2 {
                    for j2 in 0..d2 {
                        out[(i1 * d2 + i2, j1 * d2 + j2)] =
                            self.matrix[(j1 * d2 + i2, i1 * d2 + j2)];
                    }
                }
            }
        }
        ExtendedOperator {
            basis: Arc::clone(&self.basis),
            matrix: out,
            left_offsets: self.left_offsets.clone(),
            right_offsets: self.right_offsets.clone(),
            left_dim: d1,
            right_dim: d2,
        }
    }

    /// Dense sub-block between the extended row sector `(a, b)` and column
    /// sector `(c, d)` of first/second-party particle numbers.
    pub fn sector_block(&self, row: (usize, usize), col: (usize, usize)) -> Result<DMatrix<Complex64>> {
        let n = self.basis.n_particles() as usize;
        let bp = self.basis.bipartition();
        for part in [row.0, row.1, col.0, col.1] {
            if part > n {
                return Err(Error::SectorOutOfRange { k: part, max: n });
            }
        }
        let rows_l = occupation_count(row.0, bp.left())?;
        let rows_r = occupation_count(row.1, bp.right())?;
        let cols_l = occupation_count(col.0, bp.left())?;
        let cols_r = occupation_count(col.1, bp.right())?;
        Ok(DMatrix::from_fn(rows_l * rows_r, cols_l * cols_r, |r, c| {
            let (i, p) = (r / rows_r, r % rows_r);
            let (j, q) = (c / cols_r, c % cols_r);
            self.matrix[(
                self.flat(row.0, i, row.1, p),
                self.flat(col.0, j, col.1, q),
            )]
        }))
    }
}

/// Dense partially transposed operator `ρ̃` on the extended space.
pub fn extended_partial_transpose(rho: &DensityMatrix, cap: usize) -> Result<ExtendedOperator> {
    Ok(ExtendedOperator::embed(rho, cap)?.partial_transpose())
}
