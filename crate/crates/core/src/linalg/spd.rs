//! Factorizations of `H + β M*M`, the system behind every ADMM x-update.
//!
//! Fast paths:
//! * `cI + βI` is a scalar,
//! * `cI + βD*D` with `D` the first-difference map is tridiagonal,
//! * `cI + βM*M` with a wide dense `M` goes through the push-through identity
//!   `(cI + βM*M)⁻¹ = c⁻¹(I − βM*(cI + βMM*)⁻¹M)`, factoring only an m × m matrix.
//!
//! Anything else is assembled densely and Cholesky-factored.

use super::dense::DenseMatrix;
use super::factor::{Cholesky, TridiagonalFactor};
use super::operator::{first_difference_inner_bands, LinearOperator, OperatorKind};
use crate::error::{check_dim, Error, Result};

/// Constant Hessian of a quadratic term.
#[derive(Debug, Clone, PartialEq)]
pub enum Curvature {
    /// `c·I`
    Scalar(f64),
    /// Explicit symmetric matrix.
    Dense(DenseMatrix),
}

impl Curvature {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Curvature::Scalar(c) => x.iter().map(|v| c * v).collect(),
            Curvature::Dense(h) => h.matvec(x),
        }
    }
}

/// Description of the SPD operator `H + β M*M`.
#[derive(Debug, Clone, Copy)]
pub struct SpdSystem<'a> {
    pub curvature: &'a Curvature,
    pub beta: f64,
    pub op: &'a LinearOperator,
}

impl<'a> SpdSystem<'a> {
    pub fn new(curvature: &'a Curvature, beta: f64, op: &'a LinearOperator) -> Self {
        Self { curvature, beta, op }
    }

    /// Dense assembly of `H + β M*M`.
    pub fn assemble(&self) -> DenseMatrix {
        let mut a = self.op.gram_inner().scaled(self.beta);
        match self.curvature {
            Curvature::Scalar(c) => a.add_diagonal(*c),
            Curvature::Dense(h) => a.add_scaled(1.0, h),
        }
        a
    }

    /// Applies `H + β M*M` without assembling it.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.curvature.apply(x);
        let mx = self.op.apply(x).expect("dimension checked by caller");
        let mtmx = self.op.adjoint_apply(&mx).expect("dimension checked by caller");
        for (o, v) in out.iter_mut().zip(mtmx) {
            *o += self.beta * v;
        }
        out
    }
}

#[derive(Debug, Clone)]
enum FactorKind {
    Scalar(f64),
    Tridiagonal(TridiagonalFactor),
    PushThrough { c: f64, beta: f64, matrix: DenseMatrix, inner: Cholesky },
    Dense(Cholesky),
}

/// Reusable factorization of `H + β M*M`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    n: usize,
    kind: FactorKind,
}

impl SpdFactor {
    pub fn new(system: &SpdSystem<'_>) -> Result<Self> {
        let op = system.op;
        let beta = system.beta;
        let n = op.cols();
        if beta < 0.0 || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("beta must be nonnegative, got {beta}")));
        }
        if let Curvature::Dense(h) = system.curvature {
            check_dim("curvature matrix", n, h.rows())?;
            check_dim("curvature matrix", n, h.cols())?;
        }
        let kind = match (system.curvature, op.kind()) {
            (Curvature::Scalar(c), OperatorKind::Identity { .. }) => {
                let s = c + beta;
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { row: 0, pivot: s });
                }
                FactorKind::Scalar(s)
            }
            (Curvature::Scalar(c), OperatorKind::FirstDifference { n }) => {
                let (d, e) = first_difference_inner_bands(*n);
                let diag: Vec<f64> = d.iter().map(|v| c + beta * v).collect();
                let off: Vec<f64> = e.iter().map(|v| beta * v).collect();
                FactorKind::Tridiagonal(TridiagonalFactor::factor(&diag, &off)?)
            }
            (Curvature::Scalar(c), OperatorKind::Dense { matrix }) if *c > 0.0 && matrix.rows() < matrix.cols() => {
                let mut inner = matrix.gram_outer().scaled(beta);
                inner.add_diagonal(*c);
                FactorKind::PushThrough { c: *c, beta, matrix: matrix.clone(), inner: Cholesky::factor(&inner)? }
            }
            _ => FactorKind::Dense(Cholesky::factor(&system.assemble())?),
        };
        Ok(Self { n, kind })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_dim("spd rhs", self.n, rhs.len())?;
        let mut x = rhs.to_vec();
        match &self.kind {
            FactorKind::Scalar(s) => x.iter_mut().for_each(|v| *v /= s),
            FactorKind::Tridiagonal(f) => f.solve_in_place(&mut x),
            FactorKind::Dense(f) => f.solve_in_place(&mut x),
            FactorKind::PushThrough { c, beta, matrix, inner } => {
                let mut w = matrix.matvec(rhs);
                inner.solve_in_place(&mut w);
                let back = matrix.matvec_t(&w);
                for (xi, bi) in x.iter_mut().zip(back) {
                    *xi = (*xi - beta * bi) / c;
                }
            }
        }
        Ok(x)
    }
}

/// One-shot solve of `(H + β M*M) x = rhs`.
pub fn spd_solve(system: &SpdSystem<'_>, rhs: &[f64]) -> Result<Vec<f64>> {
    SpdFactor::new(system)?.solve(rhs)
}
