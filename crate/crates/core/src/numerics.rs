//! Dense complex linear-algebra kernels and the shared tolerance policy.
//!
//! Every verdict in this crate traces back to an eigenvalue or a singular
//! value computed here, compared against one [`TolerancePolicy`]. Keeping the
//! kernels and the thresholds in one place makes the verdicts auditable.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Thresholds shared by all modules. No module keeps private magic numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TolerancePolicy {
    /// Eigenvalues of nominally PSD matrices may dip this far below zero.
    pub psd_floor: f64,
    /// Anything smaller counts as zero (negativities, singular values).
    pub zero_threshold: f64,
    /// Frobenius tolerance for certificate reconstructions.
    pub reconstruction_tol: f64,
    /// Allowed disagreement between independent computation routes.
    pub oracle_agreement_tol: f64,
    /// Max entrywise deviation from Hermitian symmetry.
    pub hermiticity_tol: f64,
    /// Allowed deviation of a unit trace or unit norm.
    pub trace_tol: f64,
    /// Eigenvalues closer than this are treated as one degenerate cluster.
    pub degeneracy_gap: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            psd_floor: 1e-10,
            zero_threshold: 1e-10,
            reconstruction_tol: 1e-10,
            oracle_agreement_tol: 1e-10,
            hermiticity_tol: 1e-12,
            trace_tol: 1e-12,
            degeneracy_gap: 1e-8,
        }
    }
}

impl TolerancePolicy {
    /// Set every threshold to `tol`. Used by the CLI `--tolerance` override.
    pub fn uniform(tol: f64) -> Self {
        TolerancePolicy {
            psd_floor: tol,
            zero_threshold: tol,
            reconstruction_tol: tol,
            oracle_agreement_tol: tol,
            hermiticity_tol: tol,
            trace_tol: tol,
            degeneracy_gap: tol,
        }
    }
}

/// Max entrywise deviation |A - A†|.
pub fn hermiticity_deviation(a: &DMatrix<Complex64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

fn check_finite(a: &DMatrix<Complex64>) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order with matching orthonormal
/// eigenvector columns. Rejects input whose Hermiticity deviation exceeds
/// the policy tolerance.
pub fn eigh(
    h: &DMatrix<Complex64>,
    policy: &TolerancePolicy,
) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    check_finite(h)?;
    let dev = hermiticity_deviation(h);
    if dev > policy.hermiticity_tol {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: policy.hermiticity_tol,
        });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    // Symmetrize before handing off so the solver sees an exactly Hermitian
    // matrix regardless of which triangle it reads.
    let sym = DMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    // Exactly-zero rows are eigenvalue-0 directions. Deflating them before
    // the QR iteration matters for correctness, not just speed: the dense
    // solver can break down (NaN eigenvalues) on the highly reducible
    // matrices produced by sector embeddings.
    let zero = Complex64::new(0.0, 0.0);
    let is_live: Vec<bool> = (0..n)
        .map(|i| (0..n).any(|j| sym[(i, j)] != zero))
        .collect();
    let live: Vec<usize> = (0..n).filter(|&i| is_live[i]).collect();
    let k = live.len();
    let mut pairs: Vec<(f64, DVector<Complex64>)> = Vec::with_capacity(n);
    for i in (0..n).filter(|&i| !is_live[i]) {
        let mut e = DVector::zeros(n);
        e[i] = Complex64::new(1.0, 0.0);
        pairs.push((0.0, e));
    }
    if k > 0 {
        let sub = DMatrix::from_fn(k, k, |r, c| sym[(live[r], live[c])]);
        let se = SymmetricEigen::new(sub);
        if se.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::Eigensolver { size: n });
        }
        for j in 0..k {
            let mut v = DVector::zeros(n);
            for (r, &i) in live.iter().enumerate() {
                v[i] = se.eigenvectors[(r, j)];
            }
            pairs.push((se.eigenvalues[j], v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| pairs[j].1[i]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &DMatrix<Complex64>, policy: &TolerancePolicy) -> Result<f64> {
    let (values, _) = eigh(h, policy)?;
    Ok(values.first().copied().unwrap_or(0.0))
}

/// Singular values in non-increasing order.
pub fn singular_values(b: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    check_finite(b)?;
    if b.nrows() == 0 || b.ncols() == 0 {
        return Ok(Vec::new());
    }
    let svd = SVD::new(b.clone(), false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}

/// Trace norm ‖B‖₁ = Σ singular values.
pub fn trace_norm(b: &DMatrix<Complex64>) -> Result<f64> {
    Ok(singular_values(b)?.iter().sum())
}

/// Verify `a` is PSD up to a scale-aware floor: min eigenvalue must not drop
/// below `-psd_floor * max(1, |trace|)`.
pub fn check_psd(a: &DMatrix<Complex64>, policy: &TolerancePolicy) -> Result<()> {
    let scale = a.trace().re.abs().max(1.0);
    let floor = -policy.psd_floor * scale;
    let min = min_eigenvalue(a, policy)?;
    if min < floor {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
            floor,
        });
    }
    Ok(())
}
