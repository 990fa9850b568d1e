//! Smooth terms `h` and the scalar curvature bounds used by the parameter
//! rules of both solvers.
//!
//! Every built-in kind is quadratic, so its Hessian is constant and the
//! bounds `q2·I ⪯ ∇²h ⪯ q1·I` are extreme eigenvalues.

use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::spectral::{symmetric_extremes, DEFAULT_SPECTRAL_TOL};
use crate::linalg::vector::{dist, dot, norm_sq, sub};
use crate::linalg::{Curvature, DenseMatrix, LinearOperator};

/// Scalar Hessian bounds: `q2·I ⪯ ∇²h ⪯ q1·I`, `‖∇²h‖ ≤ lipschitz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HessianBounds {
    pub q1: f64,
    pub q2: f64,
    pub lipschitz: f64,
}

/// User-supplied smooth term. The bounds must hold for every `x`.
pub trait SmoothFunction: Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn bounds(&self) -> HessianBounds;
    fn bounded_below(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone)]
pub enum SmoothKind {
    /// `½‖Ax − b‖²`
    LeastSquares {
        a: LinearOperator,
        b: Vec<f64>,
    },
    /// `½‖x − x̂‖²`
    Proximity {
        x_hat: Vec<f64>,
    },
    /// `−½‖Ax − b‖²`
    NegatedLeastSquares {
        a: LinearOperator,
        b: Vec<f64>,
    },
    /// `½⟨x, Qx⟩ + ⟨c, x⟩`, `Q` symmetric.
    IndefiniteQuadratic {
        q: DenseMatrix,
        c: Vec<f64>,
    },
    Custom(Arc<dyn SmoothFunction>),
}

#[derive(Debug, Clone)]
pub struct SmoothModel {
    kind: SmoothKind,
    bounds: OnceLock<HessianBounds>,
    // λmin(A*A) or λmin(Q), for coercivity checks
    lambda_min: OnceLock<f64>,
}

impl SmoothModel {
    fn from_kind(kind: SmoothKind) -> Self {
        Self { kind, bounds: OnceLock::new(), lambda_min: OnceLock::new() }
    }

    pub fn least_squares(a: LinearOperator, b: Vec<f64>) -> Result<Self> {
        check_dim("least squares rhs", a.rows(), b.len())?;
        Ok(Self::from_kind(SmoothKind::LeastSquares { a, b }))
    }

    pub fn proximity(x_hat: Vec<f64>) -> Self {
        Self::from_kind(SmoothKind::Proximity { x_hat })
    }

    pub fn negated_least_squares(a: LinearOperator, b: Vec<f64>) -> Result<Self> {
        check_dim("negated least squares rhs", a.rows(), b.len())?;
        Ok(Self::from_kind(SmoothKind::NegatedLeastSquares { a, b }))
    }

    pub fn indefinite_quadratic(q: DenseMatrix, c: Vec<f64>) -> Result<Self> {
        if !q.is_symmetric(1e-12) {
            return Err(Error::InvalidArgument("quadratic form must be symmetric".into()));
        }
        check_dim("quadratic linear term", q.rows(), c.len())?;
        Ok(Self::from_kind(SmoothKind::IndefiniteQuadratic { q, c }))
    }

    pub fn custom(f: Arc<dyn SmoothFunction>) -> Self {
        Self::from_kind(SmoothKind::Custom(f))
    }

    pub fn kind(&self) -> &SmoothKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SmoothKind::LeastSquares { a, .. } | SmoothKind::NegatedLeastSquares { a, .. } => a.cols(),
            SmoothKind::Proximity { x_hat } => x_hat.len(),
            SmoothKind::IndefiniteQuadratic { q, .. } => q.cols(),
            SmoothKind::Custom(f) => f.dim(),
        }
    }

    pub fn name(&self) -> &'static str {
        match &self.kind {
            SmoothKind::LeastSquares { .. } => "least_squares",
            SmoothKind::Proximity { .. } => "proximity",
            SmoothKind::NegatedLeastSquares { .. } => "negated_least_squares",
            SmoothKind::IndefiniteQuadratic { .. } => "indefinite_quadratic",
            SmoothKind::Custom(_) => "custom",
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            SmoothKind::LeastSquares { a, b } => 0.5 * residual_sq(a, b, x),
            SmoothKind::NegatedLeastSquares { a, b } => -0.5 * residual_sq(a, b, x),
            SmoothKind::Proximity { x_hat } => 0.5 * dist(x, x_hat).powi(2),
            SmoothKind::IndefiniteQuadratic { q, c } => 0.5 * dot(x, &q.matvec(x)) + dot(c, x),
            SmoothKind::Custom(f) => f.value(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            SmoothKind::LeastSquares { a, b } => ls_gradient(a, b, x),
            SmoothKind::NegatedLeastSquares { a, b } => ls_gradient(a, b, x).into_iter().map(|g| -g).collect(),
            SmoothKind::Proximity { x_hat } => sub(x, x_hat),
            SmoothKind::IndefiniteQuadratic { q, c } => {
                let mut g = q.matvec(x);
                g.iter_mut().zip(c).for_each(|(gi, ci)| *gi += ci);
                g
            }
            SmoothKind::Custom(f) => f.gradient(x),
        }
    }

    /// `(q1, q2, L)`, cached after the first call.
    pub fn hessian_bounds(&self) -> Result<HessianBounds> {
        if let Some(b) = self.bounds.get() {
            return Ok(*b);
        }
        let b = match &self.kind {
            SmoothKind::LeastSquares { a, .. } => {
                let l = a.lambda_max()?;
                HessianBounds { q1: l, q2: 0.0, lipschitz: l }
            }
            SmoothKind::NegatedLeastSquares { a, .. } => {
                let l = a.lambda_max()?;
                HessianBounds { q1: 0.0, q2: -l, lipschitz: l }
            }
            SmoothKind::Proximity { .. } => HessianBounds { q1: 1.0, q2: 1.0, lipschitz: 1.0 },
            SmoothKind::IndefiniteQuadratic { q, .. } => {
                let (lo, hi) = symmetric_extremes(q, DEFAULT_SPECTRAL_TOL)?;
                HessianBounds { q1: hi, q2: lo, lipschitz: hi.abs().max(lo.abs()) }
            }
            SmoothKind::Custom(f) => f.bounds(),
        };
        Ok(*self.bounds.get_or_init(|| b))
    }

    /// Constant Hessian, when the kind has one.
    pub fn curvature(&self) -> Option<Curvature> {
        match &self.kind {
            SmoothKind::LeastSquares { a, .. } if a.is_identity() => Some(Curvature::Scalar(1.0)),
            SmoothKind::LeastSquares { a, .. } => Some(Curvature::Dense(a.gram_inner())),
            SmoothKind::NegatedLeastSquares { a, .. } if a.is_identity() => Some(Curvature::Scalar(-1.0)),
            SmoothKind::NegatedLeastSquares { a, .. } => Some(Curvature::Dense(a.gram_inner().scaled(-1.0))),
            SmoothKind::Proximity { .. } => Some(Curvature::Scalar(1.0)),
            SmoothKind::IndefiniteQuadratic { q, .. } => Some(Curvature::Dense(q.clone())),
            SmoothKind::Custom(_) => None,
        }
    }

    fn lambda_min(&self) -> Result<f64> {
        if let Some(v) = self.lambda_min.get() {
            return Ok(*v);
        }
        let v = match &self.kind {
            SmoothKind::LeastSquares { a, .. } | SmoothKind::NegatedLeastSquares { a, .. } => {
                a.lambda_min_gram_in(DEFAULT_SPECTRAL_TOL)?
            }
            SmoothKind::Proximity { .. } => 1.0,
            SmoothKind::IndefiniteQuadratic { .. } => self.hessian_bounds()?.q2,
            SmoothKind::Custom(f) => f.bounds().q2,
        };
        Ok(*self.lambda_min.get_or_init(|| v))
    }

    /// `inf h > −∞`, decided from the structure of the kind.
    pub fn is_bounded_below(&self) -> Result<bool> {
        Ok(match &self.kind {
            SmoothKind::LeastSquares { .. } | SmoothKind::Proximity { .. } => true,
            SmoothKind::NegatedLeastSquares { a, .. } => a.lambda_max()? == 0.0,
            // bounded below for a positive definite Q; semidefinite needs a range check
            SmoothKind::IndefiniteQuadratic { .. } => self.lambda_min()? > 0.0,
            SmoothKind::Custom(f) => f.bounded_below(),
        })
    }

    /// `h(x) → ∞` as `‖x‖ → ∞`.
    pub fn is_coercive(&self) -> Result<bool> {
        Ok(match &self.kind {
            SmoothKind::Proximity { .. } => true,
            SmoothKind::LeastSquares { .. } | SmoothKind::IndefiniteQuadratic { .. } => self.lambda_min()? > 1e-12,
            SmoothKind::NegatedLeastSquares { .. } | SmoothKind::Custom(_) => false,
        })
    }
}

fn residual_sq(a: &LinearOperator, b: &[f64], x: &[f64]) -> f64 {
    let ax = a.apply(x).expect("dimension checked by caller");
    dist(&ax, b).powi(2)
}

fn ls_gradient(a: &LinearOperator, b: &[f64], x: &[f64]) -> Vec<f64> {
    let r = sub(&a.apply(x).expect("dimension checked by caller"), b);
    a.adjoint_apply(&r).expect("dimension checked by caller")
}

/// Choice of the proximal term `φ` added to the x-subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PhiMode {
    /// `φ = 0`
    Zero,
    /// `φ = (L/2)‖x‖² − h`, which linearizes `h` in the x-update.
    LSmoothing { l: f64 },
}

/// Proximal term together with its bounds `T1 = t1·I`, `T2 = t2·I` and
/// `Q3 = q3·I ⪰ [∇²h + ∇²φ]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProximalTermSpec {
    pub mode: PhiMode,
    pub t1: f64,
    pub t2: f64,
    pub q3: f64,
}

impl ProximalTermSpec {
    pub fn zero(h: &SmoothModel) -> Result<Self> {
        let b = h.hessian_bounds()?;
        Ok(Self { mode: PhiMode::Zero, t1: 0.0, t2: 0.0, q3: (b.q1 * b.q1).max(b.q2 * b.q2) })
    }

    /// `φ = (L/2)‖x‖² − h`; `L` must dominate the Lipschitz modulus of `∇h`.
    pub fn l_smoothing(h: &SmoothModel, l: f64) -> Result<Self> {
        let lip = h.hessian_bounds()?.lipschitz;
        if !(l > 0.0) || l < lip * (1.0 - 1e-12) {
            return Err(Error::InvalidArgument(format!("smoothing constant {l} is below the Lipschitz bound {lip}")));
        }
        Ok(Self { mode: PhiMode::LSmoothing { l }, t1: 2.0 * l, t2: 0.0, q3: l * l })
    }

    /// Scalar bounds `(q1, q2)` on `∇²h` as seen by the parameter rules.
    ///
    /// With `φ = (L/2)‖x‖² − h` only `L` is trusted, giving `(L, −L)`.
    pub fn curvature_bounds(&self, h: &SmoothModel) -> Result<(f64, f64)> {
        match self.mode {
            PhiMode::Zero => {
                let b = h.hessian_bounds()?;
                Ok((b.q1, b.q2))
            }
            PhiMode::LSmoothing { l } => Ok((l, -l)),
        }
    }

    /// `∇φ(x)`
    pub fn phi_gradient(&self, h: &SmoothModel, x: &[f64]) -> Vec<f64> {
        match self.mode {
            PhiMode::Zero => vec![0.0; x.len()],
            PhiMode::LSmoothing { l } => {
                let g = h.gradient(x);
                x.iter().zip(g).map(|(xi, gi)| l * xi - gi).collect()
            }
        }
    }
}

/// `D_φ(x1, x2)`; errors when the value is negative beyond rounding, which
/// means `L` does not dominate the curvature of `h`.
pub fn bregman_value(spec: &ProximalTermSpec, h: &SmoothModel, x1: &[f64], x2: &[f64]) -> Result<f64> {
    check_dim("bregman x1", h.dim(), x1.len())?;
    check_dim("bregman x2", h.dim(), x2.len())?;
    match spec.mode {
        PhiMode::Zero => Ok(0.0),
        PhiMode::LSmoothing { l } => {
            let d = sub(x1, x2);
            let (h1, h2) = (h.value(x1), h.value(x2));
            let v = 0.5 * l * norm_sq(&d) - h1 + h2 + dot(&h.gradient(x2), &d);
            let scale = 1.0 + h1.abs() + h2.abs() + 0.5 * l * norm_sq(&d);
            if v < -1e-10 * scale {
                Err(Error::InvariantViolation(format!("negative Bregman distance {v}; L = {l} is too small")))
            } else {
                Ok(v.max(0.0))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_and_gradient_examples() {
        let h = SmoothModel::proximity(vec![1.0, 2.0]);
        assert_eq!(h.value(&[1.0, 2.0]), 0.0);
        assert_eq!(h.gradient(&[1.0, 2.0]), vec![0.0, 0.0]);

        let ls = SmoothModel::least_squares(LinearOperator::identity(2).unwrap(), vec![0.0, 0.0]).unwrap();
        assert_eq!(ls.value(&[3.0, 4.0]), 12.5);
        assert_eq!(ls.gradient(&[3.0, 4.0]), vec![3.0, 4.0]);
    }

    #[test]
    fn bounds_examples() {
        let h = SmoothModel::proximity(vec![0.0; 3]);
        assert_eq!(h.hessian_bounds().unwrap(), HessianBounds { q1: 1.0, q2: 1.0, lipschitz: 1.0 });

        let a = LinearOperator::dense(DenseMatrix::from_diag(&[3.0, -1.0]));
        let ls = SmoothModel::least_squares(a.clone(), vec![0.0, 0.0]).unwrap();
        let b = ls.hessian_bounds().unwrap();
        assert!((b.q1 - 9.0).abs() < 1e-8 && b.q2 == 0.0 && (b.lipschitz - 9.0).abs() < 1e-8);

        let neg = SmoothModel::negated_least_squares(a, vec![0.0, 0.0]).unwrap();
        let b = neg.hessian_bounds().unwrap();
        assert!(b.q1 == 0.0 && (b.q2 + 9.0).abs() < 1e-8);

        let q = SmoothModel::indefinite_quadratic(DenseMatrix::from_diag(&[2.0, -3.0]), vec![0.0, 0.0]).unwrap();
        let b = q.hessian_bounds().unwrap();
        assert!((b.q1 - 2.0).abs() < 1e-8 && (b.q2 + 3.0).abs() < 1e-8 && (b.lipschitz - 3.0).abs() < 1e-8);
    }

    #[test]
    fn proximal_term_invariants() {
        let h = SmoothModel::indefinite_quadratic(DenseMatrix::from_diag(&[2.0, -3.0]), vec![1.0, 1.0]).unwrap();
        let z = ProximalTermSpec::zero(&h).unwrap();
        assert_eq!((z.t1, z.t2), (0.0, 0.0));
        assert!((z.q3 - 9.0).abs() < 1e-7);
        let s = ProximalTermSpec::l_smoothing(&h, 3.0).unwrap();
        assert_eq!((s.t1, s.t2, s.q3), (6.0, 0.0, 9.0));
        assert!(ProximalTermSpec::l_smoothing(&h, 2.0).is_err());
    }

    #[test]
    fn bregman_examples() {
        let h = SmoothModel::indefinite_quadratic(DenseMatrix::from_diag(&[2.0, -3.0]), vec![1.0, 1.0]).unwrap();
        let zero = ProximalTermSpec::zero(&h).unwrap();
        assert_eq!(bregman_value(&zero, &h, &[1.0, 2.0], &[5.0, 5.0]).unwrap(), 0.0);
        let s = ProximalTermSpec::l_smoothing(&h, 3.0).unwrap();
        assert_eq!(bregman_value(&s, &h, &[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        // an L below the true curvature shows up as a negative distance
        let bad = ProximalTermSpec { mode: PhiMode::LSmoothing { l: 0.5 }, t1: 1.0, t2: 0.0, q3: 0.25 };
        assert!(bregman_value(&bad, &h, &[1.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn structure_flags() {
        let a = LinearOperator::dense(DenseMatrix::from_rows(&[vec![1.0, 0.0, 1.0]]).unwrap());
        let wide = SmoothModel::least_squares(a.clone(), vec![1.0]).unwrap();
        assert!(wide.is_bounded_below().unwrap());
        assert!(!wide.is_coercive().unwrap());
        let neg = SmoothModel::negated_least_squares(a, vec![1.0]).unwrap();
        assert!(!neg.is_bounded_below().unwrap());
        assert!(SmoothModel::proximity(vec![0.0]).is_coercive().unwrap());
        assert!(SmoothModel::indefinite_quadratic(DenseMatrix::from_diag(&[1.0, 1.0]), vec![0.0]).is_err());
    }
}
