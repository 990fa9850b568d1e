//! Power-iteration eigenvalue estimates for symmetric positive semidefinite maps.

use super::dense::DenseMatrix;
use super::vector::{dot, norm};
use crate::error::{Error, Result};

/// Iteration cap shared by every spectral estimate.
pub const POWER_MAX_ITER: usize = 100_000;

/// Default relative residual used when spectral summaries are cached.
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-11;

/// Largest eigenvalue of the symmetric PSD map `apply` on `R^n`.
///
/// Starts from the normalized all-ones vector (first basis vector if that
/// lies in the null space) and stops once `‖Bv − μv‖ ≤ tol·μ`.
pub fn power_iteration<F>(n: usize, mut apply: F, tol: f64) -> Result<f64>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    apply(&v, &mut w);
    if norm(&w) == 0.0 {
        v.iter_mut().for_each(|x| *x = 0.0);
        v[0] = 1.0;
        apply(&v, &mut w);
        if norm(&w) == 0.0 {
            // Both probes annihilated; treat the map as zero on this start.
            return Ok(0.0);
        }
    }
    let mut mu = 0.0;
    for _ in 0..POWER_MAX_ITER {
        mu = dot(&v, &w);
        let wn = norm(&w);
        if wn == 0.0 {
            return Ok(0.0);
        }
        let res = w.iter().zip(&v).map(|(wi, vi)| (wi - mu * vi).powi(2)).sum::<f64>().sqrt();
        if res <= tol * mu.abs() {
            return Ok(mu);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        apply(&v, &mut w);
    }
    Err(Error::EstimationFailure { iterations: POWER_MAX_ITER, best: mu })
}

/// `λmax` of a symmetric PSD dense matrix.
pub fn lambda_max_psd(g: &DenseMatrix, tol: f64) -> Result<f64> {
    power_iteration(g.rows(), |x, out| g.matvec_into(x, out), tol)
}

/// `λmin` of a symmetric PSD dense matrix via the shifted map `λ̄I − G`,
/// `λ̄ = λmax·(1 + 10⁻⁶)`.
pub fn lambda_min_psd(g: &DenseMatrix, tol: f64) -> Result<f64> {
    let lmax = lambda_max_psd(g, tol)?;
    if lmax == 0.0 {
        return Ok(0.0);
    }
    let shift = lmax * (1.0 + 1e-6);
    let mu = power_iteration(
        g.rows(),
        |x, out| {
            g.matvec_into(x, out);
            for (o, xi) in out.iter_mut().zip(x) {
                *o = shift * xi - *o;
            }
        },
        tol,
    )?;
    Ok((shift - mu).max(0.0))
}

/// Extreme eigenvalues `(λmin, λmax)` of a symmetric (possibly indefinite)
/// dense matrix, computed on the PSD shift `Q + ρI` with `ρ` a Gershgorin bound.
pub fn symmetric_extremes(q: &DenseMatrix, tol: f64) -> Result<(f64, f64)> {
    let rho = q.gershgorin_radius();
    if rho == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut shifted = q.clone();
    shifted.add_diagonal(rho);
    let top = lambda_max_psd(&shifted, tol)? - rho;
    let mut flipped = q.scaled(-1.0);
    flipped.add_diagonal(rho);
    let bottom = rho - lambda_max_psd(&flipped, tol)?;
    Ok((bottom, top))
}
