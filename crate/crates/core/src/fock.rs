//! Occupation-number bases organized by a mode bipartition.
//!
//! For `N` bosons in `M` modes split into the first `m` modes and the
//! remaining `M - m`, every basis vector factors as `|k, σ⟩ ⊗ |N-k, σ'⟩`
//! where `k` is the particle count in the first group, `σ` enumerates the
//! `d1(k) = C(k + m - 1, k)` occupations of the first group and `σ'` the
//! `d2(k) = C(N - k + M - m - 1, N - k)` occupations of the second. The
//! basis stores all sectors `k = 0..=N` together with flat offsets, so a
//! state vector or density matrix can be addressed either by sector-local
//! indices or by a single flat index.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Split of `modes` total modes into the first `left` and the rest.
///
/// `left` may be `0` or `modes`; such degenerate bipartitions put every
/// particle on one side and are permitted so callers can treat them
/// uniformly (all states are trivially unentangled across them).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeBipartition {
    modes: usize,
    left: usize,
}

impl ModeBipartition {
    pub fn new(modes: usize, left: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        if left > modes {
            return Err(Error::InvalidBipartition { left, modes });
        }
        Ok(ModeBipartition { modes, left })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.modes - self.left
    }
}

/// Occupation numbers for a contiguous group of modes.
pub type OccupationVector = Vec<u32>;

/// Dimensions of one fixed-`k` sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorShape {
    /// Particles in the first mode group.
    pub k: usize,
    /// Occupations of the first group holding `k` particles.
    pub d1: usize,
    /// Occupations of the second group holding `N - k` particles.
    pub d2: usize,
}

impl SectorShape {
    /// Rows (and columns) this sector contributes to a flat state vector.
    pub fn dim(&self) -> usize {
        self.d1 * self.d2
    }
}

/// Exact binomial coefficient, or an overflow error.
///
/// By convention `C(n, 0) = 1` for every `n`, including the empty-group
/// case that arises for zero-mode bipartition sides.
pub fn binomial(n: usize, k: usize) -> Result<usize> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::BinomialOverflow { n, k })?;
        acc /= (i + 1) as u128;
    }
    usize::try_from(acc).map_err(|_| Error::BinomialOverflow { n, k })
}

/// Number of occupations of `modes` modes by `particles` particles,
/// `C(particles + modes - 1, particles)`. Zero modes admit exactly the
/// empty occupation when `particles == 0` and nothing otherwise.
pub fn occupation_count(particles: usize, modes: usize) -> Result<usize> {
    if modes == 0 {
        return Ok(if particles == 0 { 1 } else { 0 });
    }
    binomial(particles + modes - 1, particles)
}

/// All occupations of `modes` modes by `particles` particles in descending
/// lexicographic order: `[particles, 0, ..]` first, `[0, .., particles]`
/// last.
pub fn enumerate_occupations(particles: u32, modes: usize) -> Vec<OccupationVector> {
    if modes == 0 {
        return if particles == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    let mut occ = vec![0u32; modes];
    occ[0] = particles;
    loop {
        out.push(occ.clone());
        // Successor: move one particle from the rightmost non-terminal mode
        // to its neighbor, gathering everything to its right back onto that
        // neighbor. This steps through compositions in descending lex order.
        let mut pivot = None;
        for i in (0..modes - 1).rev() {
            if occ[i] > 0 {
                pivot = Some(i);
                break;
            }
        }
        let Some(i) = pivot else { break };
        occ[i] -= 1;
        let tail: u32 = occ[i + 1..].iter().sum();
        for x in &mut occ[i + 1..] {
            *x = 0;
        }
        occ[i + 1] = tail + 1;
    }
    out
}

/// Basis of the `N`-particle space over a mode bipartition.
///
/// Flat indices run over sectors in increasing `k`; inside a sector the
/// first-group index `σ` varies slowest: `flat = offset(k) + σ * d2 + σ'`.
#[derive(Debug)]
pub struct FockBasis {
    n_particles: u32,
    bipartition: ModeBipartition,
    sectors: Vec<SectorShape>,
    left_occs: Vec<Vec<OccupationVector>>,
    right_occs: Vec<Vec<OccupationVector>>,
    offsets: Vec<usize>,
    total_dim: usize,
    index: HashMap<OccupationVector, (usize, usize, usize)>,
}

impl FockBasis {
    /// Build the basis for `n_particles` bosons over `bipartition`.
    pub fn new(n_particles: u32, bipartition: ModeBipartition) -> Result<Arc<Self>> {
        let n = n_particles as usize;
        let mut sectors = Vec::with_capacity(n + 1);
        let mut left_occs = Vec::with_capacity(n + 1);
        let mut right_occs = Vec::with_capacity(n + 1);
        let mut offsets = Vec::with_capacity(n + 1);
        let mut index = HashMap::new();
        let mut total = 0usize;
        for k in 0..=n {
            let d1 = occupation_count(k, bipartition.left())?;
            let d2 = occupation_count(n - k, bipartition.right())?;
            let lo = enumerate_occupations(k as u32, bipartition.left());
            let ro = enumerate_occupations((n - k) as u32, bipartition.right());
            debug_assert_eq!(lo.len(), d1);
            debug_assert_eq!(ro.len(), d2);
            offsets.push(total);
            for (s, l) in lo.iter().enumerate() {
                for (sp, r) in ro.iter().enumerate() {
                    let mut occ = l.clone();
                    occ.extend_from_slice(r);
                    index.insert(occ, (k, s, sp));
                }
            }
            total += d1 * d2;
            sectors.push(SectorShape { k, d1, d2 });
            left_occs.push(lo);
            right_occs.push(ro);
        }
        Ok(Arc::new(FockBasis {
            n_particles,
            bipartition,
            sectors,
            left_occs,
            right_occs,
            offsets,
            total_dim: total,
            index,
        }))
    }

    pub fn n_particles(&self) -> u32 {
        self.n_particles
    }

    pub fn bipartition(&self) -> ModeBipartition {
        self.bipartition
    }

    /// Sector shapes for `k = 0..=N`, in order.
    pub fn sectors(&self) -> &[SectorShape] {
        &self.sectors
    }

    pub fn sector(&self, k: usize) -> Result<SectorShape> {
        self.sectors
            .get(k)
            .copied()
            .ok_or(Error::SectorOutOfRange {
                k,
                max: self.n_particles as usize,
            })
    }

    /// Total Hilbert-space dimension `C(N + M - 1, N)`.
    pub fn dim(&self) -> usize {
        self.total_dim
    }

    /// Flat offset of sector `k`.
    pub fn offset(&self, k: usize) -> Result<usize> {
        self.offsets
            .get(k)
            .copied()
            .ok_or(Error::SectorOutOfRange {
                k,
                max: self.n_particles as usize,
            })
    }

    /// Flat index of sector-local `(k, σ, σ')`.
    pub fn flat_index(&self, k: usize, s: usize, sp: usize) -> Result<usize> {
        let shape = self.sector(k)?;
        if s >= shape.d1 {
            return Err(Error::SectorIndexOutOfRange {
                k,
                index: s,
                dim: shape.d1,
            });
        }
        if sp >= shape.d2 {
            return Err(Error::SectorIndexOutOfRange {
                k,
                index: sp,
                dim: shape.d2,
            });
        }
        Ok(self.offsets[k] + s * shape.d2 + sp)
    }

    /// Sector-local coordinates `(k, σ, σ')` of a full occupation vector.
    pub fn index_of(&self, occ: &[u32]) -> Result<(usize, usize, usize)> {
        if occ.len() != self.bipartition.modes() {
            return Err(Error::OccupationLength {
                len: occ.len(),
                modes: self.bipartition.modes(),
            });
        }
        let total: usize = occ.iter().map(|&x| x as usize).sum();
        if total != self.n_particles as usize {
            return Err(Error::ParticleCount {
                got: total,
                expected: self.n_particles as usize,
            });
        }
        self.index
            .get(occ)
            .copied()
            .ok_or(Error::BasisMismatch)
    }

    /// First-group occupation `σ` of sector `k`.
    pub fn left_occupation(&self, k: usize, s: usize) -> Result<&OccupationVector> {
        let shape = self.sector(k)?;
        self.left_occs[k].get(s).ok_or(Error::SectorIndexOutOfRange {
            k,
            index: s,
            dim: shape.d1,
        })
    }

    /// Second-group occupation `σ'` of sector `k`.
    pub fn right_occupation(&self, k: usize, sp: usize) -> Result<&OccupationVector> {
        let shape = self.sector(k)?;
        self.right_occs[k]
            .get(sp)
            .ok_or(Error::SectorIndexOutOfRange {
                k,
                index: sp,
                dim: shape.d2,
            })
    }

    /// Full occupation vector at sector-local `(k, σ, σ')`.
    pub fn occupation_of(&self, k: usize, s: usize, sp: usize) -> Result<OccupationVector> {
        let mut occ = self.left_occupation(k, s)?.clone();
        occ.extend_from_slice(self.right_occupation(k, sp)?);
        Ok(occ)
    }

    /// Occupation vector at a flat index.
    pub fn occupation_at(&self, flat: usize) -> Result<OccupationVector> {
        let (k, s, sp) = self.unflatten(flat)?;
        self.occupation_of(k, s, sp)
    }

    /// Sector-local coordinates of a flat index.
    pub fn unflatten(&self, flat: usize) -> Result<(usize, usize, usize)> {
        if flat >= self.total_dim {
            return Err(Error::SectorIndexOutOfRange {
                k: 0,
                index: flat,
                dim: self.total_dim,
            });
        }
        let k = match self.offsets.binary_search(&flat) {
            Ok(mut i) => {
                // Zero-dimensional sectors share an offset; take the last.
                while i + 1 < self.offsets.len() && self.offsets[i + 1] == flat {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        let rel = flat - self.offsets[k];
        let d2 = self.sectors[k].d2;
        Ok((k, rel / d2, rel % d2))
    }
}

/// Sector dimension table for `n` particles over `bipartition`.
pub fn sector_dims(n: u32, bipartition: ModeBipartition) -> Result<Vec<SectorShape>> {
    let basis = FockBasis::new(n, bipartition)?;
    Ok(basis.sectors().to_vec())
}
