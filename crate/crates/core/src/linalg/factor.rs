//! Dense Cholesky and symmetric tridiagonal factorizations.

use super::dense::DenseMatrix;
use crate::error::{check_dim, Error, Result};

/// Lower-triangular Cholesky factor `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    // row-major lower triangle, full n×n storage
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument(format!(
                "Cholesky needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a.get(i, j);
                let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                s -= ri.iter().zip(rj).map(|(x, y)| x * y).sum::<f64>();
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_dim("cholesky rhs", self.n, rhs.len())?;
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.l[k * n + i] * x[k]).sum();
            x[i] = (x[i] - s) / self.l[i * n + i];
        }
    }
}

/// `L D Lᵀ` factor of a symmetric tridiagonal matrix (Thomas algorithm with
/// the elimination coefficients kept for repeated solves).
#[derive(Debug, Clone)]
pub struct TridiagonalFactor {
    // pivots d_i
    pivots: Vec<f64>,
    // multipliers l_i = e_{i-1} / d_{i-1}, l_0 unused
    multipliers: Vec<f64>,
    off: Vec<f64>,
}

impl TridiagonalFactor {
    /// `diag` has length n, `off` length n − 1 (both sub- and super-diagonal).
    pub fn factor(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty tridiagonal system".into()));
        }
        check_dim("tridiagonal off-diagonal", n - 1, off.len())?;
        let mut pivots = vec![0.0; n];
        let mut multipliers = vec![0.0; n];
        pivots[0] = diag[0];
        for i in 0..n {
            if i > 0 {
                multipliers[i] = off[i - 1] / pivots[i - 1];
                pivots[i] = diag[i] - multipliers[i] * off[i - 1];
            }
            if !(pivots[i] > 0.0) || !pivots[i].is_finite() {
                return Err(Error::NotPositiveDefinite { row: i, pivot: pivots[i] });
            }
        }
        Ok(Self { pivots, multipliers, off: off.to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_dim("tridiagonal rhs", self.dim(), rhs.len())?;
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        for i in 1..n {
            x[i] -= self.multipliers[i] * x[i - 1];
        }
        x[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.off[i] * x[i + 1]) / self.pivots[i];
        }
    }
}
