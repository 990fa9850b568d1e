use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::dense::DenseMatrix;
use super::factor::{Cholesky, TridiagonalFactor};
use super::spectral::{lambda_max_psd, lambda_min_psd, DEFAULT_SPECTRAL_TOL};
use crate::error::{check_dim, Error, Result};

/// Structure of a linear map `M : R^n → R^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    Dense {
        matrix: DenseMatrix,
    },
    Identity {
        n: usize,
    },
    /// `(Mx)_i = x_{i+1} − x_i`, mapping `R^n → R^{n−1}`.
    FirstDifference {
        n: usize,
    },
}

/// Immutable linear operator with lazily cached spectral summaries.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    kind: OperatorKind,
    sigma: OnceLock<f64>,
    lambda_max: OnceLock<f64>,
}

/// `2(1 + cos(π − π/n))`: the smallest eigenvalue of `DD*` for the
/// first-difference map on `R^n`.
pub fn first_difference_sigma(n: usize) -> f64 {
    2.0 * (1.0 + (PI - PI / n as f64).cos())
}

/// `2(1 + cos(π/n))`: the largest eigenvalue of `DD*`.
pub fn first_difference_lambda_max(n: usize) -> f64 {
    2.0 * (1.0 + (PI / n as f64).cos())
}

impl LinearOperator {
    pub fn new(kind: OperatorKind) -> Result<Self> {
        match &kind {
            OperatorKind::Identity { n } if *n == 0 => {
                return Err(Error::InvalidArgument("identity dimension must be positive".into()))
            }
            OperatorKind::FirstDifference { n } if *n < 2 => {
                return Err(Error::InvalidArgument("first difference needs at least 2 columns".into()))
            }
            _ => {}
        }
        Ok(Self { kind, sigma: OnceLock::new(), lambda_max: OnceLock::new() })
    }

    pub fn dense(matrix: DenseMatrix) -> Self {
        Self::new(OperatorKind::Dense { matrix }).expect("dense matrices are validated on construction")
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(OperatorKind::Identity { n })
    }

    pub fn first_difference(n: usize) -> Result<Self> {
        Self::new(OperatorKind::FirstDifference { n })
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn rows(&self) -> usize {
        match &self.kind {
            OperatorKind::Dense { matrix } => matrix.rows(),
            OperatorKind::Identity { n } => *n,
            OperatorKind::FirstDifference { n } => n - 1,
        }
    }

    pub fn cols(&self) -> usize {
        match &self.kind {
            OperatorKind::Dense { matrix } => matrix.cols(),
            OperatorKind::Identity { n } | OperatorKind::FirstDifference { n } => *n,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, OperatorKind::Identity { .. })
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("operator apply", self.cols(), x.len())?;
        let mut out = vec![0.0; self.rows()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    pub fn adjoint_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim("operator adjoint", self.rows(), y.len())?;
        let mut out = vec![0.0; self.cols()];
        self.adjoint_into(y, &mut out);
        Ok(out)
    }

    /// Unchecked `out = Mx`.
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.kind {
            OperatorKind::Dense { matrix } => matrix.matvec_into(x, out),
            OperatorKind::Identity { .. } => out.copy_from_slice(x),
            OperatorKind::FirstDifference { .. } => {
                for (o, w) in out.iter_mut().zip(x.windows(2)) {
                    *o = w[1] - w[0];
                }
            }
        }
    }

    /// Unchecked `out = M*y`.
    pub(crate) fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        match &self.kind {
            OperatorKind::Dense { matrix } => matrix.matvec_t_into(y, out),
            OperatorKind::Identity { .. } => out.copy_from_slice(y),
            OperatorKind::FirstDifference { n } => {
                let n = *n;
                out[0] = -y[0];
                for i in 1..n - 1 {
                    out[i] = y[i - 1] - y[i];
                }
                out[n - 1] = y[n - 2];
            }
        }
    }

    /// Explicit `M*M` (n × n).
    pub fn gram_inner(&self) -> DenseMatrix {
        match &self.kind {
            OperatorKind::Dense { matrix } => matrix.gram_inner(),
            OperatorKind::Identity { n } => DenseMatrix::identity(*n),
            OperatorKind::FirstDifference { n } => {
                let (d, e) = first_difference_inner_bands(*n);
                tridiagonal_dense(&d, &e)
            }
        }
    }

    /// Explicit `MM*` (m × m).
    pub fn gram_outer(&self) -> DenseMatrix {
        match &self.kind {
            OperatorKind::Dense { matrix } => matrix.gram_outer(),
            OperatorKind::Identity { n } => DenseMatrix::identity(*n),
            OperatorKind::FirstDifference { n } => {
                let m = n - 1;
                tridiagonal_dense(&vec![2.0; m], &vec![-1.0; m.saturating_sub(1)])
            }
        }
    }

    /// The smaller of the two Gram matrices; both share their nonzero spectrum.
    fn small_gram(&self) -> DenseMatrix {
        if self.rows() <= self.cols() {
            self.gram_outer()
        } else {
            self.gram_inner()
        }
    }

    /// `λmax(M*M)` by power iteration (closed form for identity and first difference).
    pub fn lambda_max_gram(&self, tol: f64) -> Result<f64> {
        if tol <= 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        match &self.kind {
            OperatorKind::Identity { .. } => Ok(1.0),
            OperatorKind::FirstDifference { n } => Ok(first_difference_lambda_max(*n)),
            OperatorKind::Dense { .. } => lambda_max_psd(&self.small_gram(), tol),
        }
    }

    /// `λmin(MM*)` by power iteration on the shifted Gram matrix.
    pub fn lambda_min_gram_out(&self, tol: f64) -> Result<f64> {
        if tol <= 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        match &self.kind {
            OperatorKind::Identity { .. } => Ok(1.0),
            OperatorKind::FirstDifference { n } => Ok(first_difference_sigma(*n)),
            OperatorKind::Dense { matrix } => {
                if matrix.rows() > matrix.cols() {
                    Ok(0.0)
                } else {
                    lambda_min_psd(&matrix.gram_outer(), tol)
                }
            }
        }
    }

    /// `λmin(M*M)`; zero whenever `M` has more columns than rows.
    pub fn lambda_min_gram_in(&self, tol: f64) -> Result<f64> {
        if self.rows() < self.cols() {
            return Ok(0.0);
        }
        match &self.kind {
            OperatorKind::Dense { matrix } if !matrix.is_square() => lambda_min_psd(&matrix.gram_inner(), tol),
            // square: M*M and MM* are similar
            _ => self.lambda_min_gram_out(tol),
        }
    }

    /// Cached `σ = λmin(MM*)`.
    pub fn sigma(&self) -> Result<f64> {
        if let Some(s) = self.sigma.get() {
            return Ok(*s);
        }
        let s = self.lambda_min_gram_out(DEFAULT_SPECTRAL_TOL)?;
        Ok(*self.sigma.get_or_init(|| s))
    }

    /// Cached `λmax(M*M) = ‖M‖²`.
    pub fn lambda_max(&self) -> Result<f64> {
        if let Some(s) = self.lambda_max.get() {
            return Ok(*s);
        }
        let s = self.lambda_max_gram(DEFAULT_SPECTRAL_TOL)?;
        Ok(*self.lambda_max.get_or_init(|| s))
    }

    pub fn opnorm(&self) -> Result<f64> {
        Ok(self.lambda_max()?.sqrt())
    }

    /// Solves `MM* z = rhs`.
    pub fn solve_outer_gram(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_dim("outer gram rhs", self.rows(), rhs.len())?;
        let not_surjective = |_| Error::NotSurjective { sigma: self.sigma().unwrap_or(0.0) };
        match &self.kind {
            OperatorKind::Identity { .. } => Ok(rhs.to_vec()),
            OperatorKind::FirstDifference { n } => {
                let m = n - 1;
                TridiagonalFactor::factor(&vec![2.0; m], &vec![-1.0; m - 1]).map_err(not_surjective)?.solve(rhs)
            }
            OperatorKind::Dense { matrix } => {
                Cholesky::factor(&matrix.gram_outer()).map_err(not_surjective)?.solve(rhs)
            }
        }
    }
}

/// Diagonal and off-diagonal of `D*D` for the first-difference map on `R^n`.
pub(crate) fn first_difference_inner_bands(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![2.0; n];
    d[0] = 1.0;
    d[n - 1] = 1.0;
    (d, vec![-1.0; n - 1])
}

fn tridiagonal_dense(d: &[f64], e: &[f64]) -> DenseMatrix {
    let n = d.len();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, d[i]);
        if i + 1 < n {
            m.set(i, i + 1, e[i]);
            m.set(i + 1, i, e[i]);
        }
    }
    m
}
