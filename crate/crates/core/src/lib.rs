//! Mode-bipartite entanglement of fixed-particle-number bosonic states.
//!
//! `bosent` decides and quantifies entanglement between two groups of modes
//! for pure and mixed states of `N` bosons in `M` modes. Particle-number
//! conservation gives every operator a sector structure over the particle
//! count `k` held by the first mode group; the partial transpose maps this
//! structure onto blocks whose singular values yield the exact negativity,
//! and the same blocks drive the separability criteria.
//!
//! Modules, bottom up:
//!
//! * [`numerics`]: dense Hermitian eigensolves, SVDs, trace norms, and the
//!   shared [`numerics::TolerancePolicy`].
//! * [`fock`]: sector-aware occupation-number bases for a mode bipartition.
//! * [`states`]: pure states, block-sparse density matrices, constructors.
//! * [`partial_transpose`]: realigned sector blocks and the extended-space
//!   embedding of the partial transpose.
//! * [`negativity`]: sector-decomposed, two-mode closed-form, and dense
//!   oracle negativity computations.
//! * [`criteria`]: Schmidt decomposition, PPT tests, separability
//!   certificates, and the classification cascade.
//! * [`dynamics`]: number-conserving dephasing in closed form with an
//!   independent integrator cross-check.
//! * [`io`]: state files and report serialization.

pub mod criteria;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod io;
pub mod negativity;
pub mod numerics;
pub mod partial_transpose;
pub mod states;

pub use error::{Error, Result};
pub use fock::{FockBasis, ModeBipartition, SectorShape};
pub use negativity::{NegativityMethod, NegativityReport};
pub use numerics::TolerancePolicy;
pub use states::{DensityMatrix, PureState};
