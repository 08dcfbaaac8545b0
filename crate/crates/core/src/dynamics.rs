//! Collective dephasing of the mode bipartition.
//!
//! The noise operator is the particle-number imbalance `V` between the two
//! parties; it is diagonal on sectors with eigenvalue `2k - N`, so the
//! generator acts entrywise on sector blocks and the propagator has the
//! closed form `ρ_kl(t) = exp(-γ t (k - l)²) ρ_kl(0)`. Minors are frozen,
//! coherences between different local particle numbers decay, and the
//! infinite-time limit is the block-diagonal projection. A dense
//! fixed-step integrator over the same generator, written against the
//! matrix products rather than the closed form, serves as the
//! cross-check oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::negativity::negativity_general;
use crate::numerics::TolerancePolicy;
use crate::states::DensityMatrix;
use std::sync::Arc;

/// Dephasing strength and elapsed time, both nonnegative and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingParams {
    gamma: f64,
    t: f64,
}

impl DephasingParams {
    pub fn new(gamma: f64, t: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::ParameterRange {
                name: "gamma",
                value: gamma,
                range: "[0, inf)",
            });
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::ParameterRange {
                name: "t",
                value: t,
                range: "[0, inf)",
            });
        }
        Ok(Self { gamma, t })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// Eigenvalue of the imbalance operator on sector `k`: the first party
/// holds `k` particles, the second `N - k`, so the imbalance is `2k - N`.
pub fn v_eigenvalue(n_particles: u32, k: usize) -> Result<i64> {
    let n = n_particles as usize;
    if k > n {
        return Err(Error::SectorOutOfRange { k, max: n });
    }
    Ok(2 * k as i64 - n as i64)
}

/// The imbalance operator as a dense diagonal matrix in the flat basis.
pub fn dephasing_operator(basis: &Arc<FockBasis>) -> DMatrix<Complex64> {
    let dim = basis.dim();
    let mut v = DMatrix::zeros(dim, dim);
    for shape in basis.sectors() {
        let eig = 2 * shape.k as i64 - basis.n_particles() as i64;
        let offset = basis.offset(shape.k).expect("sector in range");
        for i in 0..shape.dim() {
            v[(offset + i, offset + i)] = Complex64::new(eig as f64, 0.0);
        }
    }
    v
}

/// Lindblad generator `(γ/2)(V ρ V - ½{V², ρ})`, evaluated through dense
/// matrix products. Kept free of the sector shortcut on purpose: this is
/// the independent side of the trajectory cross-check.
pub fn lindblad_rhs(
    rho: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
    gamma: f64,
) -> DMatrix<Complex64> {
    let v2 = v * v;
    let half = Complex64::new(0.5, 0.0);
    (v * rho * v - (&v2 * rho + rho * &v2) * half) * Complex64::new(gamma / 2.0, 0.0)
}

/// Propagate by the closed form: block `(k, l)` picks up the factor
/// `exp(-γ t (k - l)²)`. Diagonal blocks are carried over untouched, so
/// `t = 0` is an exact identity and large `γ t` underflows the factor to
/// zero, reproducing the block-diagonal projection exactly.
pub fn dephase_closed_form(
    rho: &DensityMatrix,
    params: &DephasingParams,
) -> Result<DensityMatrix> {
    let mut blocks = std::collections::BTreeMap::new();
    for (&(k, l), block) in rho.blocks() {
        if k == l {
            blocks.insert((k, l), block.clone());
            continue;
        }
        let delta = k as f64 - l as f64;
        let factor = (-params.gamma() * params.t() * delta * delta).exp();
        blocks.insert((k, l), block * Complex64::new(factor, 0.0));
    }
    DensityMatrix::from_blocks_unvalidated(Arc::clone(rho.basis()), blocks)
}

/// Fixed-step fourth-order integration of the dense Lindblad equation.
/// The result is revalidated as a density matrix, which doubles as a
/// check that the integrator preserved hermiticity, trace, and positivity
/// to within the policy.
pub fn integrate_oracle(
    rho: &DensityMatrix,
    params: &DephasingParams,
    steps: usize,
    policy: &TolerancePolicy,
) -> Result<DensityMatrix> {
    if steps == 0 {
        return Err(Error::ParameterRange {
            name: "steps",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let v = dephasing_operator(rho.basis());
    let mut state = rho.to_dense();
    let h = params.t() / steps as f64;
    let ch = |x: f64| Complex64::new(x, 0.0);
    for _ in 0..steps {
        let k1 = lindblad_rhs(&state, &v, params.gamma());
        let k2 = lindblad_rhs(&(&state + &k1 * ch(h / 2.0)), &v, params.gamma());
        let k3 = lindblad_rhs(&(&state + &k2 * ch(h / 2.0)), &v, params.gamma());
        let k4 = lindblad_rhs(&(&state + &k3 * ch(h)), &v, params.gamma());
        state += (k1 + k2 * ch(2.0) + k3 * ch(2.0) + k4) * ch(h / 6.0);
    }
    DensityMatrix::from_dense(Arc::clone(rho.basis()), &state, policy)
}

/// Negativity along a dephasing trajectory.
///
/// Each point is computed twice: once by composing the initial negativity
/// report with the per-block decay factors (trace norms scale linearly
/// with their blocks, minors are invariant), and once by re-running the
/// full decomposition on the propagated state. Disagreement beyond the
/// oracle tolerance aborts with the two values.
pub fn negativity_trajectory(
    rho: &DensityMatrix,
    gamma: f64,
    t_grid: &[f64],
    policy: &TolerancePolicy,
) -> Result<Vec<(f64, f64)>> {
    let base = negativity_general(rho, policy)?;
    let minor_sum: f64 = base.per_minor.values().sum();
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let params = DephasingParams::new(gamma, t)?;
        let composed = minor_sum
            + base
                .off_diagonal
                .iter()
                .map(|(&(k, l), &tn)| {
                    let delta = k as f64 - l as f64;
                    (-gamma * t * delta * delta).exp() * tn
                })
                .sum::<f64>();
        let evolved = dephase_closed_form(rho, &params)?;
        let recomputed = negativity_general(&evolved, policy)?.total;
        if (composed - recomputed).abs() > policy.oracle_agreement_tol {
            return Err(Error::TrajectoryCrossCheck {
                lhs: composed,
                rhs: recomputed,
            });
        }
        out.push((t, recomputed));
    }
    Ok(out)
}
