//! Proximal ADMM for `min h(x) + P(Mx)` with a surjective `M`.
//!
//! Each iteration runs, in order,
//!
//! 1. `y⁺ = prox_{P/β}(Mx − z/β)`,
//! 2. `x⁺ = argmin_x L_β(x, y⁺, z) + D_φ(x, x)`, one SPD solve with
//!    `∇²h + βM*M` (`φ = 0`) or `L·I + βM*M` (`φ = (L/2)‖x‖² − h`),
//! 3. `z⁺ = z − β(Mx⁺ − y⁺)`,
//!
//! and stops when the summed successive change, relative to the iterate size,
//! falls below `tol`.
//!
//! The parameter checks implement the surjectivity-based sufficient
//! condition: with `σ = λmin(MM*)` and `δ = q2 + t2 + β·λmin(M*M)`, the run is
//! certified when
//! `δ + t2 − (2/(σβ))·(q3/γ + t1²/(1−γ)) > 0` for some `γ ∈ (0,1)`.
//! Under that certificate the merit
//! `L_β(x⁺,y⁺,z⁺) + (t1²/(σβ(1−γ)))·‖x⁺ − x‖²` is nonincreasing, and the
//! engine tracks every step against it.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::vector::{all_finite, dist, dot, norm, norm_sq, sub};
use crate::linalg::{Curvature, LinearOperator, SpdFactor, SpdSystem};
use crate::prox::ProxOperator;
use crate::smooth::{PhiMode, ProximalTermSpec, SmoothKind, SmoothModel};

/// Below this `λmin(MM*)` the map is treated as not surjective.
pub const SURJECTIVITY_TOL: f64 = 1e-12;
/// Margins within this relative band of zero are reported as exactly zero.
pub const MARGIN_BAND: f64 = 1e-12;
/// Relative slack on merit increases.
pub const MERIT_SLACK: f64 = 1e-8;
/// Ring-buffer capacity of the per-iteration history.
pub const HISTORY_CAPACITY: usize = 10_000;

/// Which parameter rule produced a suggested `β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaRule {
    /// `M = I`, `φ = (L/2)‖x‖² − h`: `β > 5L`, `γ = ½`.
    IdentityLinearized,
    /// `M = I`, least-squares `h`, `φ = 0`: `β > √2·L`.
    IdentityLeastSquares,
    /// Surjective `M`, `h = ½‖x − x̂‖²`, `φ = 0`: `β > 2/σ`.
    SurjectiveStronglyConvex,
    /// Doubling search on `β`.
    GenericSearch,
}

pub fn classify(h: &SmoothModel, m: &LinearOperator, phi: &ProximalTermSpec) -> BetaRule {
    match (phi.mode, h.kind()) {
        (PhiMode::LSmoothing { .. }, _) if m.is_identity() => BetaRule::IdentityLinearized,
        (PhiMode::Zero, SmoothKind::LeastSquares { .. }) if m.is_identity() => BetaRule::IdentityLeastSquares,
        (PhiMode::Zero, SmoothKind::Proximity { .. }) => BetaRule::SurjectiveStronglyConvex,
        _ => BetaRule::GenericSearch,
    }
}

/// Outcome of the parameter check for one `(β, γ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub sigma: f64,
    pub delta: f64,
    pub gamma_used: f64,
    pub margin: f64,
    pub assumption_ok: bool,
    pub suggested_beta: f64,
    pub suggested_gamma: f64,
    pub rule: BetaRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundedness: Option<BoundednessVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessVerdict {
    pub bounded_ok: bool,
    pub reason: String,
}

impl BoundednessVerdict {
    fn new(bounded_ok: bool, reason: impl Into<String>) -> Self {
        Self { bounded_ok, reason: reason.into() }
    }
}

#[derive(Debug, Clone, Copy)]
struct AssumptionCore {
    sigma: f64,
    delta: f64,
    gamma: f64,
    margin: f64,
    ok: bool,
}

fn validate_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("gamma must lie in (0,1), got {gamma}")))
    }
}

/// Midpoint of `{γ ∈ (0,1) : a/γ + c/(1−γ) < k}`, or the minimizer of the
/// left side when that set is empty.
fn feasible_gamma_midpoint(a: f64, c: f64, k: f64) -> f64 {
    let clamp = |g: f64| g.clamp(1e-9, 1.0 - 1e-9);
    if a == 0.0 && c == 0.0 {
        return 0.5;
    }
    let fallback = clamp(a.sqrt() / (a.sqrt() + c.sqrt()));
    if !(k > 0.0) {
        return fallback;
    }
    let disc = (k + a - c).powi(2) - 4.0 * k * a;
    if disc <= 0.0 {
        return fallback;
    }
    // roots of kγ² + (c − a − k)γ + a = 0 bracket the feasible interval
    clamp((k + a - c) / (2.0 * k))
}

fn assumption_core(
    h: &SmoothModel,
    m: &LinearOperator,
    phi: &ProximalTermSpec,
    beta: f64,
    gamma: Option<f64>,
) -> Result<AssumptionCore> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    if let Some(g) = gamma {
        validate_gamma(g)?;
    }
    check_dim("operator columns vs smooth dimension", h.dim(), m.cols())?;
    let sigma = m.sigma()?;
    if sigma <= SURJECTIVITY_TOL {
        return Err(Error::NotSurjective { sigma });
    }
    let (_, q2) = phi.curvature_bounds(h)?;
    let lambda_min_inner = if m.rows() < m.cols() {
        0.0
    } else if m.is_identity() {
        1.0
    } else {
        sigma
    };
    let delta = q2 + phi.t2 + beta * lambda_min_inner;
    let a = 2.0 * phi.q3 / (sigma * beta);
    let c = 2.0 * phi.t1 * phi.t1 / (sigma * beta);
    let k = delta + phi.t2;
    let gamma = match gamma {
        Some(g) => g,
        None if classify(h, m, phi) == BetaRule::IdentityLinearized => 0.5,
        None => feasible_gamma_midpoint(a, c, k),
    };
    let penalty = a / gamma + c / (1.0 - gamma);
    let raw = k - penalty;
    let margin = if raw.abs() <= MARGIN_BAND * (k.abs() + penalty) { 0.0 } else { raw };
    Ok(AssumptionCore { sigma, delta, gamma, margin, ok: sigma > 0.0 && delta > 0.0 && margin > 0.0 })
}

/// Evaluates the surjectivity-based parameter condition at `β`.
///
/// `γ` defaults to the midpoint of its feasible interval (`½` for the
/// linearized identity pattern).
pub fn check_assumption(
    h: &SmoothModel,
    m: &LinearOperator,
    phi: &ProximalTermSpec,
    beta: f64,
    gamma: Option<f64>,
) -> Result<AssumptionReport> {
    let core = assumption_core(h, m, phi, beta, gamma)?;
    let suggestion = suggest_beta(h, m, phi)?;
    Ok(AssumptionReport {
        sigma: core.sigma,
        delta: core.delta,
        gamma_used: core.gamma,
        margin: core.margin,
        assumption_ok: core.ok,
        suggested_beta: suggestion.beta,
        suggested_gamma: suggestion.gamma,
        rule: suggestion.rule,
        boundedness: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaSuggestion {
    pub beta: f64,
    pub gamma: f64,
    pub rule: BetaRule,
}

const RULE_FACTOR: f64 = 1.01;
const GENERIC_BETA_CAP: f64 = 1_152_921_504_606_846_976.0; // 2^60

/// Penalty parameter from the closed-form rules, falling back to a doubling
/// search that stops at the first `β` passing [`check_assumption`].
pub fn suggest_beta(h: &SmoothModel, m: &LinearOperator, phi: &ProximalTermSpec) -> Result<BetaSuggestion> {
    let rule = classify(h, m, phi);
    let closed = match (rule, phi.mode) {
        (BetaRule::IdentityLinearized, PhiMode::LSmoothing { l }) => Some((RULE_FACTOR * 5.0 * l, 0.5)),
        (BetaRule::IdentityLeastSquares, _) => {
            let l = h.hessian_bounds()?.q1;
            (l > 0.0).then(|| {
                let beta = RULE_FACTOR * 2f64.sqrt() * l;
                (beta, 0.5 * (2f64.sqrt() * l / beta + 1.0))
            })
        }
        (BetaRule::SurjectiveStronglyConvex, _) => {
            let sigma = m.sigma()?;
            if sigma <= SURJECTIVITY_TOL {
                return Err(Error::NotSurjective { sigma });
            }
            let beta = RULE_FACTOR * 2.0 / sigma;
            Some((beta, 0.5 * (2.0 / (sigma * beta) + 1.0)))
        }
        _ => None,
    };
    if let Some((beta, gamma)) = closed {
        return Ok(BetaSuggestion { beta, gamma, rule });
    }
    let mut beta = h.hessian_bounds()?.lipschitz.max(1.0);
    while beta <= GENERIC_BETA_CAP {
        let core = assumption_core(h, m, phi, beta, None)?;
        if core.ok {
            return Ok(BetaSuggestion { beta, gamma: core.gamma, rule: BetaRule::GenericSearch });
        }
        beta *= 2.0;
    }
    Err(Error::NoValidBeta { last_beta: beta / 2.0 })
}

/// Sufficient conditions for bounded iterates.
///
/// Needs `inf h − ‖∇h‖²/(σζ) > −∞` for some `ζ < 2βγ`, plus either an
/// invertible `M` with coercive `P`, or a coercive `h` with `P` bounded below.
/// `ζ` is known in closed form for least-squares (`2√2·L/σ`) and proximity
/// (`4/σ`) terms; other kinds return `false` with reason `unknown`.
pub fn check_boundedness(
    h: &SmoothModel,
    p: &ProxOperator,
    m: &LinearOperator,
    beta: f64,
    gamma: f64,
) -> Result<BoundednessVerdict> {
    validate_gamma(gamma)?;
    if !h.is_bounded_below()? {
        return Ok(BoundednessVerdict::new(false, "h_not_bounded_below"));
    }
    let sigma = m.sigma()?;
    if sigma <= SURJECTIVITY_TOL {
        return Ok(BoundednessVerdict::new(false, "not_surjective"));
    }
    let zeta = match h.kind() {
        SmoothKind::LeastSquares { .. } => 2.0 * 2f64.sqrt() * h.hessian_bounds()?.lipschitz / sigma,
        SmoothKind::Proximity { .. } => 4.0 / sigma,
        _ => return Ok(BoundednessVerdict::new(false, "unknown")),
    };
    if !(zeta < 2.0 * beta * gamma) {
        return Ok(BoundednessVerdict::new(false, "zeta_condition_failed"));
    }
    if m.is_square() && p.is_coercive() {
        return Ok(BoundednessVerdict::new(true, "invertible_M_coercive_P"));
    }
    if h.is_coercive()? && p.is_bounded_below() {
        return Ok(BoundednessVerdict::new(true, "coercive_h_bounded_P"));
    }
    Ok(BoundednessVerdict::new(false, "no_sufficient_condition"))
}

/// `L_β(x, y, z) = h(x) + P(y) − ⟨z, Mx − y⟩ + (β/2)‖Mx − y‖²`.
pub fn augmented_lagrangian(
    h: &SmoothModel,
    p: &ProxOperator,
    m: &LinearOperator,
    beta: f64,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> Result<f64> {
    check_dim("lagrangian y", m.rows(), y.len())?;
    check_dim("lagrangian z", m.rows(), z.len())?;
    let r = sub(&m.apply(x)?, y);
    Ok(lagrangian_parts(h.value(x), p.eval(y), &r, z, beta))
}

#[inline]
fn lagrangian_parts(hv: f64, pv: f64, r: &[f64], z: &[f64], beta: f64) -> f64 {
    if pv == f64::INFINITY {
        return f64::INFINITY;
    }
    hv + pv - dot(z, r) + 0.5 * beta * norm_sq(r)
}

/// Optimality residuals of a primal-dual triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `‖∇h(x) − M*z‖`
    pub r_grad: f64,
    /// `‖Mx − y‖`
    pub r_feas: f64,
    /// `‖y − prox_{P/β}(y − z/β)‖`, a surrogate for `−z ∈ ∂P(y)`.
    pub r_prox_fixed_point: f64,
}

pub fn stationarity_residuals(
    h: &SmoothModel,
    p: &ProxOperator,
    m: &LinearOperator,
    beta: f64,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> Result<Residuals> {
    check_dim("residual y", m.rows(), y.len())?;
    check_dim("residual z", m.rows(), z.len())?;
    let r_grad = dist(&h.gradient(x), &m.adjoint_apply(z)?);
    let r_feas = dist(&m.apply(x)?, y);
    let u: Vec<f64> = y.iter().zip(z).map(|(yi, zi)| yi - zi / beta).collect();
    let fixed = p.prox_with_previous(&u, 1.0 / beta, Some(y))?;
    Ok(Residuals { r_grad, r_feas, r_prox_fixed_point: dist(y, &fixed) })
}

/// Starting triple for [`admm_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmInit {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl AdmmInit {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self { x: vec![0.0; n], y: vec![0.0; m], z: vec![0.0; m] }
    }
}

/// Initialization from a stationary point `x̃` of a convex relaxation:
/// `x0 = x̃`, `y0 = Mx0`, and `z0` solving `MM*z0 = M∇h(x0)`, so that
/// `M*z0 = ∇h(x0)` for surjective `M`.
///
/// When `Mx0` lies a rounding error outside the domain of `P`, `y0` is
/// snapped onto it with one prox step.
pub fn warm_start_from_l1(
    h: &SmoothModel,
    p: &ProxOperator,
    m: &LinearOperator,
    x_relaxed: &[f64],
) -> Result<AdmmInit> {
    check_dim("warm start point", h.dim(), x_relaxed.len())?;
    let x = x_relaxed.to_vec();
    let mut y = m.apply(&x)?;
    if p.eval(&y) == f64::INFINITY {
        y = p.prox(&y, 1.0)?;
    }
    let rhs = m.apply(&h.gradient(&x))?;
    let z = m.solve_outer_gram(&rhs).map_err(|e| match e {
        Error::NotSurjective { .. } => e,
        _ => Error::NotSurjective { sigma: m.sigma().unwrap_or(0.0) },
    })?;
    Ok(AdmmInit { x, y, z })
}

/// `β` growth schedule for maps with tiny `σ`: start at `beta0`, and whenever
/// `β < 2/σ` while the iterates blow up (`‖x‖ > blowup_norm`) or move too much
/// (`‖Δx‖ > step_slack/t`), set `β ← min(cap_factor·2/σ, growth·β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaHeuristic {
    pub beta0: f64,
    pub growth: f64,
    pub cap_factor: f64,
    pub blowup_norm: f64,
    pub step_slack: f64,
}

impl BetaHeuristic {
    pub fn new(beta0: f64) -> Self {
        Self { beta0, growth: 2.0, cap_factor: 1.0001, blowup_norm: 1e10, step_slack: 1000.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmConfig {
    pub beta: f64,
    pub gamma: f64,
    pub phi: ProximalTermSpec,
    pub tol: f64,
    pub max_iter: usize,
    /// When set, the run starts from `beta0` instead of `beta`.
    pub beta_heuristic: Option<BetaHeuristic>,
    pub record_history: bool,
}

impl AdmmConfig {
    pub fn new(beta: f64, gamma: f64, phi: ProximalTermSpec) -> Self {
        Self { beta, gamma, phi, tol: 1e-8, max_iter: 200_000, beta_heuristic: None, record_history: false }
    }

    /// Uses the closed-form rule (or search) for `β` and `γ`.
    pub fn suggested(h: &SmoothModel, m: &LinearOperator, phi: ProximalTermSpec) -> Result<Self> {
        let s = suggest_beta(h, m, &phi)?;
        Ok(Self::new(s.beta, s.gamma, phi))
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_heuristic(mut self, heuristic: BetaHeuristic) -> Self {
        self.beta_heuristic = Some(heuristic);
        self
    }

    pub fn with_history(mut self, on: bool) -> Self {
        self.record_history = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let initial = self.beta_heuristic.map_or(self.beta, |h| h.beta0);
        if !(initial > 0.0) || !initial.is_finite() {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {initial}")));
        }
        validate_gamma(self.gamma)?;
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        if let Some(hc) = self.beta_heuristic {
            if !(hc.growth > 1.0 && hc.cap_factor >= 1.0 && hc.blowup_norm > 0.0 && hc.step_slack > 0.0) {
                return Err(Error::InvalidArgument(format!("invalid beta heuristic {hc:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIter,
    MeritViolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmmHistoryEntry {
    pub t: usize,
    pub beta: f64,
    pub merit: f64,
    pub lagrangian: f64,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub rel_change: f64,
}

/// Per-iteration invariant tallies, kept for every run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AdmmDiagnostics {
    /// Merit comparisons made (fixed `β`, certified parameters, `t ≥ 1`).
    pub merit_checks: usize,
    pub merit_violations: usize,
    /// Largest `(merit⁺ − merit)/(1 + |merit|)` seen in a comparison.
    pub max_merit_increase: f64,
    /// Dual-step bound `σ‖Δz‖² ≤ (q3/γ)‖Δx⁺‖² + (t1²/(1−γ))‖Δx‖²` checks.
    pub dual_bound_checks: usize,
    pub dual_bound_violations: usize,
    /// Largest `(lhs − rhs)/(1 + ‖z‖²)`.
    pub max_dual_bound_excess: f64,
    /// Largest `|L(x⁺,y⁺,z⁺) − L(x⁺,y⁺,z) − ‖Δz‖²/β| / (1 + |L|)`.
    pub max_lagrangian_identity_gap: f64,
    /// Largest `‖z⁺ − z + β(Mx⁺ − y⁺)‖ / (β(1 + ‖Mx⁺‖ + ‖y⁺‖))`.
    pub max_z_update_gap: f64,
    /// y-updates whose prox objective exceeded the one at the previous `y`.
    pub y_update_violations: usize,
    pub beta_changes: usize,
    pub last_beta_change: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmmReport {
    pub termination: Termination,
    pub iters: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub residuals: Residuals,
    /// `h(x) + P(y)`; `y` carries exact feasibility and `‖Mx − y‖` is
    /// reported in `residuals.r_feas`.
    pub objective: f64,
    pub final_beta: f64,
    /// Parameter certificate at `final_beta`.
    pub assumption_ok: bool,
    pub final_merit: f64,
    pub diagnostics: AdmmDiagnostics,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<AdmmHistoryEntry>,
}

enum XUpdate {
    /// `φ = 0`: rhs = `M*(z + βy) − ∇h(0)`
    Exact { grad_at_zero: Vec<f64>, curvature: Curvature },
    /// `φ = (L/2)‖x‖² − h`: rhs = `Lx − ∇h(x) + M*(z + βy)`
    Linearized { l: f64, curvature: Curvature },
}

impl XUpdate {
    fn new(h: &SmoothModel, phi: &ProximalTermSpec) -> Result<Self> {
        match phi.mode {
            PhiMode::Zero => {
                let curvature = h.curvature().ok_or_else(|| {
                    Error::Unsupported(format!(
                        "exact x-update needs a quadratic smooth term, got {}; use l_smoothing mode",
                        h.name()
                    ))
                })?;
                Ok(Self::Exact { grad_at_zero: h.gradient(&vec![0.0; h.dim()]), curvature })
            }
            PhiMode::LSmoothing { l } => Ok(Self::Linearized { l, curvature: Curvature::Scalar(l) }),
        }
    }

    fn curvature(&self) -> &Curvature {
        match self {
            Self::Exact { curvature, .. } | Self::Linearized { curvature, .. } => curvature,
        }
    }

    fn rhs(&self, h: &SmoothModel, x: &[f64], adj: Vec<f64>) -> Vec<f64> {
        match self {
            Self::Exact { grad_at_zero, .. } => adj.into_iter().zip(grad_at_zero).map(|(a, g)| a - g).collect(),
            Self::Linearized { l, .. } => {
                let g = h.gradient(x);
                adj.into_iter().zip(x.iter().zip(g)).map(|(a, (xi, gi))| a + l * xi - gi).collect()
            }
        }
    }
}

/// Runs the proximal ADMM from `init`.
pub fn admm_solve(
    h: &SmoothModel,
    p: &ProxOperator,
    m: &LinearOperator,
    config: &AdmmConfig,
    init: AdmmInit,
) -> Result<AdmmReport> {
    config.validate()?;
    p.validate()?;
    let n = h.dim();
    check_dim("operator columns vs smooth dimension", n, m.cols())?;
    check_dim("init x", n, init.x.len())?;
    check_dim("init y", m.rows(), init.y.len())?;
    check_dim("init z", m.rows(), init.z.len())?;
    if !(all_finite(&init.x) && all_finite(&init.y) && all_finite(&init.z)) {
        return Err(Error::InvalidArgument("initial point must be finite".into()));
    }

    let phi = config.phi;
    let gamma = config.gamma;
    let xupdate = XUpdate::new(h, &phi)?;
    let sigma = m.sigma()?;
    let surjective = sigma > SURJECTIVITY_TOL;
    let certified =
        |beta: f64| surjective && assumption_core(h, m, &phi, beta, Some(gamma)).map(|c| c.ok).unwrap_or(false);

    let mut beta = config.beta_heuristic.map_or(config.beta, |hc| hc.beta0);
    let mut factor = SpdFactor::new(&SpdSystem::new(xupdate.curvature(), beta, m))?;
    let mut assumption_ok = certified(beta);

    let AdmmInit { mut x, mut y, mut z } = init;
    let mut mx = m.apply(&x)?;
    let mut dx_prev_sq = 0.0;
    let mut prev_merit: Option<(f64, f64)> = None;
    let mut merit = f64::INFINITY;
    let mut diag = AdmmDiagnostics::default();
    let mut history = VecDeque::new();
    let mut termination = Termination::MaxIter;
    let mut iters = 0;

    for t in 0..config.max_iter {
        let tau = 1.0 / beta;
        let u: Vec<f64> = mx.iter().zip(&z).map(|(a, b)| a - b * tau).collect();
        let y_new = p.prox_with_previous(&u, tau, Some(&y))?;

        let p_old = p.eval(&y);
        let p_new = p.eval(&y_new);
        if p_old.is_finite() {
            let lhs = tau * p_new + 0.5 * dist(&y_new, &u).powi(2);
            let rhs = tau * p_old + 0.5 * dist(&y, &u).powi(2);
            if lhs > rhs + 1e-10 * (1.0 + rhs.abs()) {
                diag.y_update_violations += 1;
            }
        }

        let w: Vec<f64> = z.iter().zip(&y_new).map(|(zi, yi)| zi + beta * yi).collect();
        let adj = m.adjoint_apply(&w)?;
        let x_new = factor.solve(&xupdate.rhs(h, &x, adj))?;
        let mx_new = m.apply(&x_new)?;
        let r = sub(&mx_new, &y_new);
        let z_new: Vec<f64> = z.iter().zip(&r).map(|(zi, ri)| zi - beta * ri).collect();
        if !(all_finite(&x_new) && all_finite(&y_new) && all_finite(&z_new)) {
            return Err(Error::Divergence { iteration: t + 1 });
        }

        let dx_sq = dist(&x_new, &x).powi(2);
        let dy = dist(&y_new, &y);
        let dz_sq = dist(&z_new, &z).powi(2);

        let z_gap = z_new.iter().zip(&z).zip(&r).map(|((a, b), ri)| (a - b + beta * ri).powi(2)).sum::<f64>().sqrt()
            / (beta * (1.0 + norm(&mx_new) + norm(&y_new)));
        diag.max_z_update_gap = diag.max_z_update_gap.max(z_gap);

        let hv = h.value(&x_new);
        let l_new = lagrangian_parts(hv, p_new, &r, &z_new, beta);
        let l_mid = lagrangian_parts(hv, p_new, &r, &z, beta);
        if l_new.is_finite() && l_mid.is_finite() {
            let gap = ((l_new - l_mid) - dz_sq / beta).abs() / (1.0 + l_new.abs().max(l_mid.abs()));
            diag.max_lagrangian_identity_gap = diag.max_lagrangian_identity_gap.max(gap);
        }

        if surjective && t >= 1 {
            let lhs = sigma * dz_sq;
            let rhs = phi.q3 / gamma * dx_sq + phi.t1 * phi.t1 / (1.0 - gamma) * dx_prev_sq;
            let excess = (lhs - rhs) / (1.0 + norm_sq(&z_new));
            diag.dual_bound_checks += 1;
            diag.max_dual_bound_excess = diag.max_dual_bound_excess.max(excess);
            if excess > 1e-8 {
                diag.dual_bound_violations += 1;
            }
        }

        let correction =
            if surjective && phi.t1 > 0.0 { phi.t1 * phi.t1 * dx_sq / (sigma * beta * (1.0 - gamma)) } else { 0.0 };
        merit = l_new + correction;

        let mut violated = false;
        if let Some((mp, bp)) = prev_merit {
            if bp == beta && assumption_ok && mp.is_finite() {
                diag.merit_checks += 1;
                let inc = (merit - mp) / (1.0 + mp.abs());
                diag.max_merit_increase = diag.max_merit_increase.max(inc);
                if inc > MERIT_SLACK {
                    diag.merit_violations += 1;
                    violated = true;
                }
            }
        }

        let denom = norm(&x_new) + norm(&y_new) + norm(&z_new) + 1.0;
        let rel_change = (dx_sq.sqrt() + dy + dz_sq.sqrt()) / denom;

        if config.record_history {
            if history.len() == HISTORY_CAPACITY {
                history.pop_front();
            }
            history.push_back(AdmmHistoryEntry {
                t: t + 1,
                beta,
                merit,
                lagrangian: l_new,
                dx: dx_sq.sqrt(),
                dy,
                dz: dz_sq.sqrt(),
                rel_change,
            });
        }

        x = x_new;
        y = y_new;
        z = z_new;
        mx = mx_new;
        dx_prev_sq = dx_sq;
        prev_merit = Some((merit, beta));
        iters = t + 1;

        if violated {
            termination = Termination::MeritViolation;
            break;
        }
        if rel_change < config.tol {
            termination = Termination::Converged;
            break;
        }

        if let Some(hc) = config.beta_heuristic {
            let cap = 2.0 / sigma;
            if surjective && beta < cap && (norm(&x) > hc.blowup_norm || dx_sq.sqrt() > hc.step_slack / (t + 1) as f64)
            {
                beta = (hc.cap_factor * cap).min(hc.growth * beta);
                factor = SpdFactor::new(&SpdSystem::new(xupdate.curvature(), beta, m))?;
                assumption_ok = certified(beta);
                diag.beta_changes += 1;
                diag.last_beta_change = Some(iters);
            }
        }
    }

    let residuals = stationarity_residuals(h, p, m, beta, &x, &y, &z)?;
    let objective = h.value(&x) + p.eval(&y);
    Ok(AdmmReport {
        termination,
        iters,
        residuals,
        objective,
        final_beta: beta,
        assumption_ok,
        final_merit: merit,
        diagnostics: diag,
        history: history.into(),
        x,
        y,
        z,
    })
}
