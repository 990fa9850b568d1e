//! Proximal maps for the nonsmooth terms.
//!
//! Every `prox` call returns one global minimizer of
//! `τ·P(w) + ½‖w − u‖²`. When that set has several elements the choice is
//! deterministic:
//!
//! * equal magnitudes competing for a support slot go to the lowest index;
//! * equidistant points of a finite set go to the one closest to the
//!   caller-supplied previous iterate, then to the lowest index.
//!
//! The previous-iterate rule is the one used for the two-block counterexample;
//! it is applied to every set-valued kind here.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::vector::{dist, norm1};

/// Relative slack on `‖y‖₁ ≤ ρ`; the sort-and-threshold projection can land a
/// few ulps outside the ball.
const L1_BALL_FEASIBILITY_SLACK: f64 = 1e-12;

/// Nonsmooth term `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProxOperator {
    /// Indicator of `{y : ‖y − b‖₀ ≤ r}`.
    IndicatorL0Ball { center: Vec<f64>, budget: usize },
    /// Indicator of `{y : ‖y‖₀ ≤ s}`.
    IndicatorCard { budget: usize },
    /// `λ‖y‖₀`
    L0Penalty { weight: f64 },
    /// `λ‖y‖₁`
    L1Penalty { weight: f64 },
    /// `λ Σ |y_i|^{1/2}`
    LHalfPenalty { weight: f64 },
    /// Indicator of `{y : ‖y‖₁ ≤ ρ}`.
    IndicatorL1Ball { radius: f64 },
    /// Indicator of `{y : ‖y‖∞ ≤ ρ}`.
    IndicatorLinfBall { radius: f64 },
    /// Indicator of a finite point set.
    IndicatorFiniteSet { points: Vec<Vec<f64>> },
}

impl ProxOperator {
    /// Checks the parameters of the term.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self {
            Self::L0Penalty { weight } | Self::L1Penalty { weight } | Self::LHalfPenalty { weight }
                if !(*weight >= 0.0 && weight.is_finite()) =>
            {
                bad(format!("penalty weight must be nonnegative, got {weight}"))
            }
            Self::IndicatorL1Ball { radius } | Self::IndicatorLinfBall { radius }
                if !(*radius >= 0.0 && radius.is_finite()) =>
            {
                bad(format!("ball radius must be nonnegative, got {radius}"))
            }
            Self::IndicatorFiniteSet { points } if points.is_empty() => {
                bad("finite set must contain at least one point".into())
            }
            Self::IndicatorFiniteSet { points } => {
                let d = points[0].len();
                for p in points {
                    check_dim("finite set point", d, p.len())?;
                }
                Ok(())
            }
            Self::IndicatorL0Ball { center, .. } if !center.iter().all(|v| v.is_finite()) => {
                bad("l0 ball center must be finite".into())
            }
            _ => Ok(()),
        }
    }

    /// `P(y)`, `+∞` outside the domain of indicator kinds.
    pub fn eval(&self, y: &[f64]) -> f64 {
        let indicator = |feasible: bool| if feasible { 0.0 } else { f64::INFINITY };
        match self {
            Self::IndicatorL0Ball { center, budget } => {
                if center.len() != y.len() {
                    return f64::INFINITY;
                }
                let nnz = y.iter().zip(center).filter(|(a, b)| a != b).count();
                indicator(nnz <= *budget)
            }
            Self::IndicatorCard { budget } => indicator(y.iter().filter(|v| **v != 0.0).count() <= *budget),
            Self::L0Penalty { weight } => weight * y.iter().filter(|v| **v != 0.0).count() as f64,
            Self::L1Penalty { weight } => weight * norm1(y),
            Self::LHalfPenalty { weight } => weight * y.iter().map(|v| v.abs().sqrt()).sum::<f64>(),
            Self::IndicatorL1Ball { radius } => indicator(norm1(y) <= radius * (1.0 + L1_BALL_FEASIBILITY_SLACK)),
            Self::IndicatorLinfBall { radius } => indicator(y.iter().all(|v| v.abs() <= *radius)),
            Self::IndicatorFiniteSet { points } => indicator(points.iter().any(|p| p == y)),
        }
    }

    /// One minimizer of `τ·P(w) + ½‖w − u‖²`.
    pub fn prox(&self, u: &[f64], tau: f64) -> Result<Vec<f64>> {
        self.prox_with_previous(u, tau, None)
    }

    /// As [`prox`](Self::prox), breaking finite-set ties toward `previous`.
    pub fn prox_with_previous(&self, u: &[f64], tau: f64, previous: Option<&[f64]>) -> Result<Vec<f64>> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidArgument(format!("prox step must be positive, got {tau}")));
        }
        self.validate()?;
        let out = match self {
            Self::IndicatorL0Ball { center, budget } => {
                check_dim("l0 ball prox", center.len(), u.len())?;
                let shifted: Vec<f64> = u.iter().zip(center).map(|(a, b)| a - b).collect();
                let keep = top_magnitudes(&shifted, *budget);
                let mut w = center.clone();
                for i in keep {
                    w[i] = u[i];
                }
                w
            }
            Self::IndicatorCard { budget } => {
                let mut w = vec![0.0; u.len()];
                for i in top_magnitudes(u, *budget) {
                    w[i] = u[i];
                }
                w
            }
            Self::L0Penalty { weight } => {
                let thresh = (2.0 * tau * weight).sqrt();
                u.iter().map(|&v| if v.abs() > thresh { v } else { 0.0 }).collect()
            }
            Self::L1Penalty { weight } => {
                let t = tau * weight;
                u.iter().map(|&v| soft_threshold(v, t)).collect()
            }
            Self::LHalfPenalty { weight } => u.iter().map(|&v| half_threshold(v, tau * weight)).collect(),
            Self::IndicatorL1Ball { radius } => project_l1_ball(u, *radius),
            Self::IndicatorLinfBall { radius } => u.iter().map(|v| v.clamp(-radius, *radius)).collect(),
            Self::IndicatorFiniteSet { points } => {
                check_dim("finite set prox", points[0].len(), u.len())?;
                nearest_point(points, u, previous).clone()
            }
        };
        Ok(out)
    }

    /// `P` is convex (prox is single-valued and firmly nonexpansive).
    pub fn is_convex(&self) -> bool {
        matches!(self, Self::L1Penalty { .. } | Self::IndicatorL1Ball { .. } | Self::IndicatorLinfBall { .. })
    }

    /// `liminf_{‖y‖→∞} P(y) = ∞`.
    ///
    /// `λ‖y‖₀` is bounded by `λ·dim`, so the ℓ0 penalty is not coercive.
    pub fn is_coercive(&self) -> bool {
        match self {
            Self::L1Penalty { weight } | Self::LHalfPenalty { weight } => *weight > 0.0,
            Self::IndicatorL1Ball { .. } | Self::IndicatorLinfBall { .. } | Self::IndicatorFiniteSet { .. } => true,
            Self::IndicatorL0Ball { .. } | Self::IndicatorCard { .. } | Self::L0Penalty { .. } => false,
        }
    }

    /// `inf P > −∞`; every built-in kind is nonnegative.
    pub fn is_bounded_below(&self) -> bool {
        true
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::IndicatorL0Ball { .. } => "indicator_l0_ball",
            Self::IndicatorCard { .. } => "indicator_card",
            Self::L0Penalty { .. } => "l0_penalty",
            Self::L1Penalty { .. } => "l1_penalty",
            Self::LHalfPenalty { .. } => "l_half_penalty",
            Self::IndicatorL1Ball { .. } => "indicator_l1_ball",
            Self::IndicatorLinfBall { .. } => "indicator_linf_ball",
            Self::IndicatorFiniteSet { .. } => "indicator_finite_set",
        }
    }
}

#[inline]
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Scalar prox of `μ|x|^{1/2}`: `argmin_x ½(x − v)² + μ√|x|`.
///
/// The nonzero stationary point is given by the trigonometric root of the
/// cubic (half-thresholding); it is only accepted when it beats `x = 0`.
pub fn half_threshold(v: f64, mu: f64) -> f64 {
    if mu == 0.0 {
        return v;
    }
    let a = v.abs();
    // the cubic has a nonzero root iff |v| ≥ (3/4)(2μ)^{2/3}
    let lam = 2.0 * mu;
    if a < 0.75 * lam.powf(2.0 / 3.0) {
        return 0.0;
    }
    let phi = ((lam / 8.0) * (a / 3.0).powf(-1.5)).min(1.0).acos();
    let root = (2.0 / 3.0) * a * (1.0 + (2.0 * std::f64::consts::PI / 3.0 - 2.0 * phi / 3.0).cos());
    let obj_root = 0.5 * (root - a).powi(2) + mu * root.sqrt();
    let obj_zero = 0.5 * a * a;
    if obj_root < obj_zero {
        root.copysign(v)
    } else {
        0.0
    }
}

/// Indices of the `k` largest `|v_i|`, ties to the lowest index.
fn top_magnitudes(v: &[f64], k: usize) -> Vec<usize> {
    if k >= v.len() {
        return (0..v.len()).collect();
    }
    let mut idx: Vec<usize> = (0..v.len()).collect();
    // stable sort keeps lower indices first among equal magnitudes
    idx.sort_by(|&i, &j| v[j].abs().partial_cmp(&v[i].abs()).unwrap_or(Ordering::Equal));
    idx.truncate(k);
    idx
}

/// Euclidean projection onto `{‖y‖₁ ≤ ρ}` by sorting magnitudes.
pub fn project_l1_ball(u: &[f64], radius: f64) -> Vec<f64> {
    if norm1(u) <= radius {
        return u.to_vec();
    }
    if radius == 0.0 {
        return vec![0.0; u.len()];
    }
    let mut mags: Vec<f64> = u.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - radius) / (k + 1) as f64;
        if *m > t {
            theta = t;
        } else {
            break;
        }
    }
    u.iter().map(|&v| soft_threshold(v, theta)).collect()
}

fn nearest_point<'a>(points: &'a [Vec<f64>], u: &[f64], previous: Option<&[f64]>) -> &'a Vec<f64> {
    let dists: Vec<f64> = points.iter().map(|p| dist(p, u)).collect();
    let best = dists.iter().cloned().fold(f64::INFINITY, f64::min);
    let tie_band = 1e-12 * (1.0 + best);
    let tied = (0..points.len()).filter(|&i| dists[i] - best <= tie_band);
    let chosen = match previous {
        Some(prev) if prev.len() == u.len() => tied
            .map(|i| (i, dist(&points[i], prev)))
            .fold(None, |acc: Option<(usize, f64)>, (i, d)| match acc {
                Some((_, bd)) if bd <= d => acc,
                _ => Some((i, d)),
            })
            .map(|(i, _)| i),
        _ => tied.into_iter().next(),
    };
    &points[chosen.expect("finite set is non-empty")]
}
