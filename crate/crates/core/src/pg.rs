//! Proximal gradient (forward-backward) iteration for `min h(x) + P(x)`.
//!
//! The step size rule is the relaxed one: write `h = q + (h − q)` with `q`
//! convex and `∇²(h − q) ⪯ ℓI`; then any `β ∈ (0, 1/ℓ)` gives
//! `F(x⁺) ≤ F(x) − (1/(2β) − ℓ/2)‖x⁺ − x‖²`. For a concave quadratic `h`
//! all curvature goes into `q`, so `ℓ` may be any positive number.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::symmetric_extremes;
use crate::linalg::vector::{all_finite, dist, norm};
use crate::linalg::DEFAULT_SPECTRAL_TOL;
use crate::prox::ProxOperator;
use crate::smooth::{SmoothKind, SmoothModel};

/// `ℓ` used for concave terms when the caller does not pick one.
pub const DEFAULT_CONCAVE_ELL: f64 = 1e-12;
/// Capacity of the history ring buffer.
pub const PG_HISTORY_CAPACITY: usize = 10_000;

/// A certified `ℓ` with a note on the convex part `q` it assumes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllEstimate {
    pub ell: f64,
    pub q_description: String,
}

/// Smallest `ℓ` certified by the built-in splitting of `h`.
///
/// `requested` is honoured only where any positive `ℓ` is valid (concave
/// quadratics); it must be positive.
pub fn estimate_ell(h: &SmoothModel, requested: Option<f64>) -> Result<EllEstimate> {
    if let Some(r) = requested {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("requested ell must be positive, got {r}")));
        }
    }
    let concave = |what: &str| EllEstimate {
        ell: requested.unwrap_or(DEFAULT_CONCAVE_ELL),
        q_description: format!("q = {what}; h − q is concave"),
    };
    let est = match h.kind() {
        SmoothKind::NegatedLeastSquares { .. } => concave("½‖Ax‖²"),
        SmoothKind::IndefiniteQuadratic { q, .. } => {
            let (lo, hi) = symmetric_extremes(q, DEFAULT_SPECTRAL_TOL)?;
            let (l1, l2) = (hi, -lo);
            if l1 <= 0.0 {
                concave("−½xᵀQx")
            } else if l2 <= 0.0 {
                EllEstimate { ell: l1, q_description: "q = 0".into() }
            } else if l1 < l2 {
                EllEstimate { ell: 0.5 * (l1 + l2), q_description: format!("q = {}‖x‖²", 0.25 * (l2 - l1)) }
            } else {
                EllEstimate { ell: l1, q_description: "q = −½xᵀQ₋x, Q₋ the nonpositive part of Q".into() }
            }
        }
        _ => EllEstimate { ell: h.hessian_bounds()?.q1, q_description: "q = 0".into() },
    };
    if !(est.ell > 0.0) {
        // a zero Hessian admits any positive ℓ
        return Ok(EllEstimate { ell: requested.unwrap_or(DEFAULT_CONCAVE_ELL), q_description: est.q_description });
    }
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PgConfig {
    pub beta: f64,
    pub ell: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub record_history: bool,
}

impl PgConfig {
    pub fn new(beta: f64, ell: f64) -> Result<Self> {
        let cfg = Self { beta, ell, tol: 1e-8, max_iter: 100_000, record_history: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_history(mut self, on: bool) -> Self {
        self.record_history = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.ell > 0.0) || !self.beta.is_finite() || !self.ell.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "beta and ell must be positive, got beta={} ell={}",
                self.beta, self.ell
            )));
        }
        if self.beta * self.ell >= 1.0 - 1e-15 {
            return Err(Error::InvalidArgument(format!(
                "step size {} is not below 1/ell = {}",
                self.beta,
                1.0 / self.ell
            )));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidArgument("tol and max_iter must be positive".into()));
        }
        Ok(())
    }

    /// `1/(2β) − ℓ/2`
    pub fn descent_constant(&self) -> f64 {
        0.5 / self.beta - 0.5 * self.ell
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PgTermination {
    Converged,
    MaxIter,
    DescentViolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PgHistoryEntry {
    pub objective: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PgReport {
    pub termination: PgTermination,
    pub iters: usize,
    pub x: Vec<f64>,
    pub objective: f64,
    /// `F(x0)`; infinite when `x0` is outside the domain of `P`.
    pub initial_objective: f64,
    /// `‖x − prox_{βP}(x − β∇h(x))‖`
    pub residual: f64,
    /// `Σ‖x^{t+1} − x^t‖²` over steps taken from feasible iterates.
    pub sum_step_sq: f64,
    pub first_finite_objective: f64,
    /// Largest `(F⁺ − F + c‖Δ‖²)/(1 + |F|)` with `c` the descent constant.
    pub max_descent_excess: f64,
    pub descent_checks: usize,
    /// Iterates after the first all lay in the domain of `P`.
    pub stayed_feasible: bool,
    pub ell: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<PgHistoryEntry>,
}

impl PgReport {
    /// Whether `Σ‖Δ‖² ≤ (F_first − F_final)/c + 1e-6` holds, with `F_first`
    /// the first finite objective along the run.
    pub fn summed_descent_ok(&self, config: &PgConfig) -> bool {
        self.sum_step_sq <= (self.first_finite_objective - self.objective) / config.descent_constant() + 1e-6
    }
}

/// Runs `x⁺ = prox_{βP}(x − β∇h(x))` from `x0`.
pub fn pg_solve(h: &SmoothModel, p: &ProxOperator, config: &PgConfig, x0: &[f64]) -> Result<PgReport> {
    config.validate()?;
    p.validate()?;
    check_dim("pg start", h.dim(), x0.len())?;
    let beta = config.beta;
    let c = config.descent_constant();

    let mut x = x0.to_vec();
    let initial_objective = h.value(&x) + p.eval(&x);
    let mut f = initial_objective;
    let mut first_finite = initial_objective;
    let mut sum_step_sq = 0.0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut checks = 0;
    let mut stayed_feasible = true;
    let mut history = VecDeque::new();
    let mut termination = PgTermination::MaxIter;
    let mut iters = 0;

    for t in 0..config.max_iter {
        let g = h.gradient(&x);
        let u: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - beta * gi).collect();
        let x_new = p.prox_with_previous(&u, beta, Some(&x))?;
        if !all_finite(&x_new) {
            return Err(Error::Divergence { iteration: t + 1 });
        }
        let f_new = h.value(&x_new) + p.eval(&x_new);
        if !f_new.is_finite() {
            stayed_feasible = false;
        }
        let step_sq = dist(&x_new, &x).powi(2);

        let mut violated = false;
        if f.is_finite() {
            checks += 1;
            let excess = (f_new - f + c * step_sq) / (1.0 + f.abs());
            max_excess = max_excess.max(excess);
            violated = excess > 1e-8;
        }
        if f.is_finite() {
            sum_step_sq += step_sq;
        } else if f_new.is_finite() {
            first_finite = f_new;
        }
        let rel = step_sq.sqrt() / (norm(&x_new) + 1.0);

        if config.record_history {
            if history.len() == PG_HISTORY_CAPACITY {
                history.pop_front();
            }
            history.push_back(PgHistoryEntry { objective: f_new, step: step_sq.sqrt() });
        }
        x = x_new;
        f = f_new;
        iters = t + 1;
        if violated {
            termination = PgTermination::DescentViolation;
            break;
        }
        if rel < config.tol {
            termination = PgTermination::Converged;
            break;
        }
    }

    let g = h.gradient(&x);
    let u: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - beta * gi).collect();
    let residual = dist(&x, &p.prox_with_previous(&u, beta, Some(&x))?);
    Ok(PgReport {
        termination,
        iters,
        x,
        objective: f,
        initial_objective,
        residual,
        sum_step_sq,
        first_finite_objective: first_finite,
        max_descent_excess: if checks == 0 { 0.0 } else { max_excess },
        descent_checks: checks,
        stayed_feasible,
        ell: config.ell,
        history: history.into(),
    })
}
