//! Instance generators, metrics and drivers for the three numerical studies
//! (constraint violation budget, piecewise-constant fitting, concave
//! minimization over a ball) and the period-8 divergence replay.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::admm::{
    admm_solve, check_assumption, stationarity_residuals, warm_start_from_l1, AdmmConfig, AdmmInit, AdmmReport,
    BetaHeuristic,
};
use crate::error::{check_dim, Error, Result};
use crate::linalg::vector::{dist, norm};
use crate::linalg::{first_difference_sigma, Cholesky, DenseMatrix, LinearOperator, OperatorKind, RngStream};
use crate::pg::{estimate_ell, pg_solve, PgConfig, PgReport};
use crate::prox::ProxOperator;
use crate::smooth::{ProximalTermSpec, SmoothModel};
use crate::sweep::map_parallel;

/// Entries above this magnitude count as nonzero or violated.
pub const METRIC_THRESHOLD: f64 = 1e-4;
/// Penalty weights tried, in order, by the ℓ1 baseline.
pub const L1_LAMBDA_GRID: [f64; 5] = [0.1, 0.3, 1.0, 3.0, 10.0];
/// Step multipliers over `1/λmax(A*A)` for the concave study.
pub const CONCAVE_MULTIPLIERS: [f64; 4] = [1.0, 2.0, 10.0, 50.0];

/// Solver knobs shared by the drivers; `None` keeps the engine default.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub tol: f64,
    pub max_iter: Option<usize>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    /// β schedule for piecewise-constant fitting.
    pub heuristic: bool,
    pub record_history: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: None, beta: None, gamma: None, heuristic: true, record_history: false }
    }
}

impl RunOptions {
    fn admm_config(&self, h: &SmoothModel, m: &LinearOperator) -> Result<AdmmConfig> {
        let phi = ProximalTermSpec::zero(h)?;
        let mut cfg = AdmmConfig::suggested(h, m, phi)?;
        if let Some(beta) = self.beta {
            cfg.beta = beta;
            cfg.gamma = check_assumption(h, m, &phi, beta, None)?.gamma_used;
        }
        if let Some(gamma) = self.gamma {
            cfg.gamma = gamma;
        }
        cfg.tol = self.tol;
        if let Some(mi) = self.max_iter {
            cfg.max_iter = mi;
        }
        cfg.record_history = self.record_history;
        Ok(cfg)
    }
}

// ---------------------------------------------------------------- metrics

/// `#{i : |(Mx − b)_i| > 1e-4}`
pub fn metric_vio(m: &LinearOperator, b: &[f64], x: &[f64]) -> Result<usize> {
    check_dim("vio rhs", m.rows(), b.len())?;
    let mx = m.apply(x)?;
    Ok(mx.iter().zip(b).filter(|(a, c)| (*a - *c).abs() > METRIC_THRESHOLD).count())
}

/// `#{i : |v_i| > 1e-4}`
pub fn metric_card(v: &[f64]) -> usize {
    v.iter().filter(|a| a.abs() > METRIC_THRESHOLD).count()
}

/// `‖x − x_orig‖ / ‖x_orig‖` (plain distance when `x_orig = 0`).
pub fn metric_err(x: &[f64], x_orig: &[f64]) -> Result<f64> {
    check_dim("err reference", x_orig.len(), x.len())?;
    let scale = norm(x_orig);
    let d = dist(x, x_orig);
    Ok(if scale > 0.0 { d / scale } else { d })
}

fn dense_matrix(op: &LinearOperator) -> Option<&DenseMatrix> {
    match op.kind() {
        OperatorKind::Dense { matrix } => Some(matrix),
        _ => None,
    }
}

fn randn_matrix(rng: &mut RngStream, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::new(rows, cols, rng.randn_vector(rows * cols)).expect("sizes match")
}

// ------------------------------------------------- constraint violations

/// `min ½‖x − x̂‖²` subject to at most `r` of the equations `Mx = b` failing.
#[derive(Debug, Clone)]
pub struct CpvInstance {
    pub m: LinearOperator,
    pub b: Vec<f64>,
    pub x_hat: Vec<f64>,
    pub x_orig: Vec<f64>,
    pub r: usize,
    /// Indices of `b` drawn as free noise, ascending.
    pub free: Vec<usize>,
    pub seed: u64,
}

impl CpvInstance {
    pub fn rows(&self) -> usize {
        self.m.rows()
    }

    pub fn cols(&self) -> usize {
        self.m.cols()
    }

    pub fn smooth(&self) -> SmoothModel {
        SmoothModel::proximity(self.x_hat.clone())
    }

    pub fn l0_term(&self) -> ProxOperator {
        ProxOperator::IndicatorL0Ball { center: self.b.clone(), budget: self.r }
    }
}

/// Gaussian `M`, `x_orig` and `b`; `m − r` random entries of `b` are then
/// overwritten with `(M x_orig)_i`, and `x̂` is drawn last.
pub fn gen_cpv(m: usize, n: usize, r: usize, seed: u64) -> Result<CpvInstance> {
    if !(n >= m && m >= r && m >= 1) {
        return Err(Error::InvalidArgument(format!("need n ≥ m ≥ r and m ≥ 1, got m={m} n={n} r={r}")));
    }
    let mut rng = RngStream::new(seed);
    let matrix = randn_matrix(&mut rng, m, n);
    let x_orig = rng.randn_vector(n);
    let perm = rng.randperm(m);
    let mut b = rng.randn_vector(m);
    for &i in &perm[..m - r] {
        b[i] = crate::linalg::vector::dot(matrix.row(i), &x_orig);
    }
    let x_hat = rng.randn_vector(n);
    let mut free = perm[m - r..].to_vec();
    free.sort_unstable();

    let residual = matrix.matvec(&x_orig);
    let differing = residual.iter().zip(&b).filter(|(a, c)| a != c).count();
    assert_eq!(differing, r, "generator must leave exactly r free equations");

    Ok(CpvInstance { m: LinearOperator::dense(matrix), b, x_hat, x_orig, r, free, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpvMode {
    L0Cold,
    L1Baseline,
    L0Warm,
}

impl CpvMode {
    pub const ALL: [CpvMode; 3] = [CpvMode::L0Cold, CpvMode::L1Baseline, CpvMode::L0Warm];

    pub fn as_str(self) -> &'static str {
        match self {
            CpvMode::L0Cold => "l0_cold",
            CpvMode::L1Baseline => "l1_baseline",
            CpvMode::L0Warm => "l0_warm",
        }
    }
}

impl fmt::Display for CpvMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CpvMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CpvMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown cpv mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpvRow {
    pub mode: CpvMode,
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub seed: u64,
    pub iter: usize,
    pub cpu_s: f64,
    pub vio: usize,
    pub dist: f64,
    /// `½‖x − x̂‖²` at the reported point.
    pub objective: f64,
    /// Penalty weight picked by the ℓ1 baseline (also for warm starts).
    pub lambda: Option<f64>,
    /// Warm start only: objective and prox fixed-point residual at `x0`.
    pub initial_objective: Option<f64>,
    pub initial_prox_residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CpvRun {
    pub row: CpvRow,
    /// Final iterate in the original coordinates.
    pub x: Vec<f64>,
    pub report: AdmmReport,
}

struct L1Solution {
    x: Vec<f64>,
    report: AdmmReport,
    lambda: f64,
    iters: usize,
}

/// `min ½‖x − x̂‖² + λ‖Mx − b‖₁`, solved with the same engine after the shift
/// `x = x' + M*(MM*)⁻¹b`, which turns the penalty into `λ‖Mx'‖₁`. The
/// smallest `λ` on the grid whose solution violates at most `r` equations is
/// kept; failing that, the one with the fewest violations.
fn l1_baseline(inst: &CpvInstance, opts: &RunOptions) -> Result<L1Solution> {
    let x_p = inst.m.adjoint_apply(&inst.m.solve_outer_gram(&inst.b)?)?;
    let shifted: Vec<f64> = inst.x_hat.iter().zip(&x_p).map(|(a, b)| a - b).collect();
    let h = SmoothModel::proximity(shifted);
    let cfg = opts.admm_config(&h, &inst.m)?;
    let mut best: Option<(usize, L1Solution)> = None;
    let mut iters = 0;
    for &lambda in &L1_LAMBDA_GRID {
        let p = ProxOperator::L1Penalty { weight: lambda };
        let report = admm_solve(&h, &p, &inst.m, &cfg, AdmmInit::zeros(inst.cols(), inst.rows()))?;
        iters += report.iters;
        let x: Vec<f64> = report.x.iter().zip(&x_p).map(|(a, b)| a + b).collect();
        let vio = metric_vio(&inst.m, &inst.b, &x)?;
        let better = best.as_ref().is_none_or(|(v, _)| vio < *v);
        if better {
            best = Some((vio, L1Solution { x, report, lambda, iters: 0 }));
        }
        if vio <= inst.r {
            break;
        }
    }
    let (_, mut sol) = best.expect("grid is non-empty");
    sol.iters = iters;
    Ok(sol)
}

/// Moves `x` onto `{x : (Mx)_S = b_S}`, `S` the `m − r` equations with the
/// smallest residuals, by the least-norm correction.
fn polish_onto_equations(inst: &CpvInstance, x: &[f64]) -> Result<Vec<f64>> {
    let matrix = dense_matrix(&inst.m).ok_or_else(|| Error::Unsupported("polish needs a dense map".into()))?;
    let res: Vec<f64> = inst.m.apply(x)?.iter().zip(&inst.b).map(|(a, b)| a - b).collect();
    let mut order: Vec<usize> = (0..res.len()).collect();
    order.sort_by(|&i, &j| res[i].abs().total_cmp(&res[j].abs()).then(i.cmp(&j)));
    let mut keep = order[..inst.rows() - inst.r].to_vec();
    keep.sort_unstable();
    if keep.is_empty() {
        return Ok(x.to_vec());
    }
    let ms = matrix.select_rows(&keep);
    let mut w: Vec<f64> = keep.iter().map(|&i| res[i]).collect();
    Cholesky::factor(&ms.gram_outer())?.solve_in_place(&mut w);
    let corr = ms.matvec_t(&w);
    Ok(x.iter().zip(corr).map(|(a, c)| a - c).collect())
}

fn cpv_row(inst: &CpvInstance, mode: CpvMode, x: &[f64], iter: usize, cpu_s: f64) -> Result<CpvRow> {
    let d = dist(x, &inst.x_hat);
    Ok(CpvRow {
        mode,
        m: inst.rows(),
        r: inst.r,
        n: inst.cols(),
        seed: inst.seed,
        iter,
        cpu_s,
        vio: metric_vio(&inst.m, &inst.b, x)?,
        dist: d,
        objective: 0.5 * d * d,
        lambda: None,
        initial_objective: None,
        initial_prox_residual: None,
    })
}

/// Runs the requested modes on one instance, sharing the ℓ1 solve between
/// the baseline and the warm start.
pub fn run_cpv_modes(inst: &CpvInstance, modes: &[CpvMode], opts: &RunOptions) -> Result<Vec<CpvRun>> {
    let h = inst.smooth();
    let p = inst.l0_term();
    let cfg = opts.admm_config(&h, &inst.m)?;
    let mut l1: Option<(L1Solution, f64)> = None;
    let mut out = Vec::with_capacity(modes.len());
    for &mode in modes {
        let start = Instant::now();
        let run = match mode {
            CpvMode::L0Cold => {
                let report = admm_solve(&h, &p, &inst.m, &cfg, AdmmInit::zeros(inst.cols(), inst.rows()))?;
                let row = cpv_row(inst, mode, &report.x, report.iters, start.elapsed().as_secs_f64())?;
                CpvRun { row, x: report.x.clone(), report }
            }
            CpvMode::L1Baseline | CpvMode::L0Warm => {
                if l1.is_none() {
                    let sol = l1_baseline(inst, opts)?;
                    l1 = Some((sol, start.elapsed().as_secs_f64()));
                }
                let (sol, l1_cpu) = l1.as_ref().expect("computed above");
                if mode == CpvMode::L1Baseline {
                    let mut row = cpv_row(inst, mode, &sol.x, sol.iters, *l1_cpu)?;
                    row.lambda = Some(sol.lambda);
                    CpvRun { row, x: sol.x.clone(), report: sol.report.clone() }
                } else {
                    let x0 = polish_onto_equations(inst, &sol.x)?;
                    let init = warm_start_from_l1(&h, &p, &inst.m, &x0)?;
                    let start_res = stationarity_residuals(&h, &p, &inst.m, cfg.beta, &init.x, &init.y, &init.z)?;
                    let initial_objective = h.value(&init.x) + p.eval(&init.y);
                    let report = admm_solve(&h, &p, &inst.m, &cfg, init)?;
                    let mut row = cpv_row(inst, mode, &report.x, report.iters, start.elapsed().as_secs_f64())?;
                    row.lambda = Some(sol.lambda);
                    row.objective = report.objective;
                    row.initial_objective = Some(initial_objective);
                    row.initial_prox_residual = Some(start_res.r_prox_fixed_point);
                    CpvRun { row, x: report.x.clone(), report }
                }
            }
        };
        out.push(run);
    }
    Ok(out)
}

/// One mode on one instance.
pub fn run_cpv(inst: &CpvInstance, mode: CpvMode, opts: &RunOptions) -> Result<CpvRun> {
    Ok(run_cpv_modes(inst, &[mode], opts)?.remove(0))
}

// ------------------------------------------------ piecewise-constant fit

/// `min ½‖x − x̂‖²` subject to `‖Dx‖₀ ≤ r − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PcfInstance {
    pub n: usize,
    pub r: usize,
    pub tau: f64,
    pub x_orig: Vec<f64>,
    pub x_hat: Vec<f64>,
    /// Start index of pieces 2..=r, ascending.
    pub breakpoints: Vec<usize>,
    pub seed: u64,
}

/// A signal with `r` Gaussian levels split at sorted random breakpoints, plus
/// `τ`-scaled Gaussian noise.
pub fn gen_pcf(n: usize, r: usize, tau: f64, seed: u64) -> Result<PcfInstance> {
    if !(r >= 2 && n >= 3 && r < n) {
        return Err(Error::InvalidArgument(format!("need 2 ≤ r ≤ n − 1, got n={n} r={r}")));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidArgument(format!("noise level must be nonnegative, got {tau}")));
    }
    let mut rng = RngStream::new(seed);
    let perm: Vec<usize> = rng.randperm(n - 2).into_iter().map(|j| j + 1).collect();
    let mut breakpoints = perm[..r - 1].to_vec();
    breakpoints.sort_unstable();

    let mut x_orig = vec![0.0; n];
    let mut starts = vec![0];
    starts.extend_from_slice(&breakpoints);
    starts.push(n);
    for w in starts.windows(2) {
        let level = rng.normal();
        x_orig[w[0]..w[1]].iter_mut().for_each(|v| *v = level);
    }
    let noise = rng.randn_vector(n);
    let x_hat: Vec<f64> = x_orig.iter().zip(noise).map(|(a, e)| a + tau * e).collect();

    let jumps = x_orig.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(jumps, r - 1, "generator must produce exactly r pieces");

    Ok(PcfInstance { n, r, tau, x_orig, x_hat, breakpoints, seed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcfRow {
    pub tau: f64,
    pub r: usize,
    pub n: usize,
    pub seed: u64,
    pub iter: usize,
    pub cpu_s: f64,
    pub card: usize,
    pub err: f64,
    /// `err(x̂, x_orig)`, the error before fitting.
    pub err_hat: f64,
}

#[derive(Debug, Clone)]
pub struct PcfRun {
    pub row: PcfRow,
    pub x: Vec<f64>,
    pub report: AdmmReport,
}

/// ADMM from the origin with `M = D`, `P` the indicator of `‖·‖₀ ≤ r − 1`,
/// and (by default) the β schedule starting at `1/(5nσ)`.
pub fn run_pcf(inst: &PcfInstance, opts: &RunOptions) -> Result<PcfRun> {
    let start = Instant::now();
    let h = SmoothModel::proximity(inst.x_hat.clone());
    let m = LinearOperator::first_difference(inst.n)?;
    let p = ProxOperator::IndicatorCard { budget: inst.r - 1 };
    let mut cfg = opts.admm_config(&h, &m)?;
    if opts.heuristic && opts.beta.is_none() {
        let sigma = first_difference_sigma(inst.n);
        let cap = 1.0001 * 2.0 / sigma;
        cfg.beta = cap;
        cfg.gamma = opts.gamma.unwrap_or(0.5 * (2.0 / (sigma * cap) + 1.0));
        cfg.beta_heuristic = Some(BetaHeuristic::new(1.0 / (5.0 * inst.n as f64 * sigma)));
    }
    let report = admm_solve(&h, &p, &m, &cfg, AdmmInit::zeros(inst.n, inst.n - 1))?;
    let dx = m.apply(&report.x)?;
    let row = PcfRow {
        tau: inst.tau,
        r: inst.r,
        n: inst.n,
        seed: inst.seed,
        iter: report.iters,
        cpu_s: start.elapsed().as_secs_f64(),
        card: metric_card(&dx),
        err: metric_err(&report.x, &inst.x_orig)?,
        err_hat: metric_err(&inst.x_hat, &inst.x_orig)?,
    };
    Ok(PcfRun { row, x: report.x.clone(), report })
}

// ------------------------------------------------------ concave over ball

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ball {
    L1,
    Linf,
}

impl Ball {
    pub fn as_str(self) -> &'static str {
        match self {
            Ball::L1 => "l1",
            Ball::Linf => "linf",
        }
    }

    /// Indicator of the unit ball.
    pub fn prox(self) -> ProxOperator {
        match self {
            Ball::L1 => ProxOperator::IndicatorL1Ball { radius: 1.0 },
            Ball::Linf => ProxOperator::IndicatorLinfBall { radius: 1.0 },
        }
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ball {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Ball::L1),
            "linf" => Ok(Ball::Linf),
            _ => Err(Error::InvalidArgument(format!("unknown ball {s:?}"))),
        }
    }
}

/// `min −½‖Ax − b‖²` over a unit ball.
#[derive(Debug, Clone)]
pub struct ConcaveInstance {
    pub a: LinearOperator,
    pub b: Vec<f64>,
    pub ball: Ball,
    pub seed: u64,
}

impl ConcaveInstance {
    pub fn smooth(&self) -> Result<SmoothModel> {
        SmoothModel::negated_least_squares(self.a.clone(), self.b.clone())
    }
}

pub fn gen_concave(m: usize, n: usize, seed: u64, ball: Ball) -> Result<ConcaveInstance> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("dimensions must be positive, got m={m} n={n}")));
    }
    let mut rng = RngStream::new(seed);
    let a = randn_matrix(&mut rng, m, n);
    let b = rng.randn_vector(m);
    Ok(ConcaveInstance { a: LinearOperator::dense(a), b, ball, seed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcaveRow {
    pub m: usize,
    pub n: usize,
    pub lambda_max: f64,
    pub beta_mult: f64,
    pub iter: usize,
    pub fval: f64,
    pub ball: Ball,
    pub seed: u64,
    pub cpu_s: f64,
    pub in_ball: bool,
}

#[derive(Debug, Clone)]
pub struct ConcaveRun {
    pub row: ConcaveRow,
    pub config: PgConfig,
    pub report: PgReport,
}

/// Proximal gradient from the origin with `β = k/λmax(A*A)` for each
/// multiplier `k`. The concave `h` certifies any `ℓ`; `ℓ = 1e-6/β` is used.
pub fn run_concave(inst: &ConcaveInstance, multipliers: &[f64], opts: &RunOptions) -> Result<Vec<ConcaveRun>> {
    let h = inst.smooth()?;
    let p = inst.ball.prox();
    let lambda_max = inst.a.lambda_max()?;
    let n = inst.a.cols();
    multipliers
        .iter()
        .map(|&k| {
            if !(k > 0.0) {
                return Err(Error::InvalidArgument(format!("step multiplier must be positive, got {k}")));
            }
            let start = Instant::now();
            let beta = k / lambda_max;
            let ell = estimate_ell(&h, Some(1e-6 / beta))?.ell;
            let mut config = PgConfig::new(beta, ell)?.with_tol(opts.tol).with_history(opts.record_history);
            if let Some(mi) = opts.max_iter {
                config = config.with_max_iter(mi);
            }
            let report = pg_solve(&h, &p, &config, &vec![0.0; n])?;
            let row = ConcaveRow {
                m: inst.a.rows(),
                n,
                lambda_max,
                beta_mult: k,
                iter: report.iters,
                fval: report.objective,
                ball: inst.ball,
                seed: inst.seed,
                cpu_s: start.elapsed().as_secs_f64(),
                in_ball: p.eval(&report.x) == 0.0,
            };
            Ok(ConcaveRun { row, config, report })
        })
        .collect()
}

// ------------------------------------------------------------------ sweeps

/// Seeds `base, base + 1, …`.
pub fn seed_range(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}

pub fn cpv_sweep(
    m: usize,
    n: usize,
    r: usize,
    seeds: &[u64],
    modes: &[CpvMode],
    opts: &RunOptions,
    jobs: usize,
) -> Result<Vec<CpvRun>> {
    let nested = map_parallel(seeds, jobs, |&seed| run_cpv_modes(&gen_cpv(m, n, r, seed)?, modes, opts));
    Ok(nested.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

pub fn pcf_sweep(n: usize, r: usize, tau: f64, seeds: &[u64], opts: &RunOptions, jobs: usize) -> Result<Vec<PcfRun>> {
    map_parallel(seeds, jobs, |&seed| run_pcf(&gen_pcf(n, r, tau, seed)?, opts)).into_iter().collect()
}

pub fn concave_sweep(
    m: usize,
    n: usize,
    seeds: &[u64],
    ball: Ball,
    multipliers: &[f64],
    opts: &RunOptions,
    jobs: usize,
) -> Result<Vec<ConcaveRun>> {
    let nested = map_parallel(seeds, jobs, |&seed| run_concave(&gen_concave(m, n, seed, ball)?, multipliers, opts));
    Ok(nested.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

// ------------------------------------------------------ period-8 replay

/// `(y₁, y₂, x, z₁, z₂)` after one sweep of the two-block scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleState {
    pub y1: [f64; 2],
    pub y2: [f64; 2],
    pub x: [f64; 2],
    pub z1: [f64; 2],
    pub z2: [f64; 2],
}

impl CycleState {
    fn max_abs_diff(&self, other: &CycleState) -> f64 {
        let a = [self.y1, self.y2, self.x, self.z1, self.z2];
        let b = [other.y1, other.y2, other.x, other.z1, other.z2];
        a.iter().zip(&b).flat_map(|(u, v)| u.iter().zip(v).map(|(p, q)| (p - q).abs())).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleTrace {
    pub eta: f64,
    pub beta: f64,
    /// States for `t = 1, …, steps`.
    pub iterates: Vec<CycleState>,
}

/// ADMM with `Mx = (x, x)`, `h = 0`, `P(y) = δ_C(y₁) + δ_D(y₂)`, where `C` is
/// the first coordinate axis and `D = {(0,0), (2,η), (2,−η)}`. Ties in the
/// `D`-projection go to the point nearest the previous `y₂`.
pub fn cycle_run(eta: f64, beta: f64, steps: usize) -> Result<CycleTrace> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0,1], got {eta}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let d = ProxOperator::IndicatorFiniteSet { points: vec![vec![0.0, 0.0], vec![2.0, eta], vec![2.0, -eta]] };
    let mut x = [2.0, 0.0];
    let mut z1 = [0.0, -beta * eta];
    let mut z2 = [0.0, beta * eta];
    let mut y2_prev: Option<Vec<f64>> = None;
    let mut iterates = Vec::with_capacity(steps);
    for _ in 0..steps {
        let y1 = [x[0] - z1[0] / beta, 0.0];
        let u2 = [x[0] - z2[0] / beta, x[1] - z2[1] / beta];
        let y2v = d.prox_with_previous(&u2, 1.0, y2_prev.as_deref())?;
        let y2 = [y2v[0], y2v[1]];
        let xn =
            [0.5 * (y1[0] + z1[0] / beta + y2[0] + z2[0] / beta), 0.5 * (y1[1] + z1[1] / beta + y2[1] + z2[1] / beta)];
        for k in 0..2 {
            z1[k] -= beta * (xn[k] - y1[k]);
            z2[k] -= beta * (xn[k] - y2[k]);
        }
        x = xn;
        y2_prev = Some(y2v);
        iterates.push(CycleState { y1, y2, x, z1, z2 });
    }
    Ok(CycleTrace { eta, beta, iterates })
}

/// The closed-form orbit for `1 ≤ t ≤ 8`.
pub fn cycle_closed_form(eta: f64, beta: f64, t: usize) -> CycleState {
    assert!((1..=8).contains(&t), "closed form covers one period");
    let first_half = t <= 4;
    let s = if first_half { -1.0 } else { 1.0 };
    let z = (2.0 - (t as f64 - 4.0).abs()) * beta * eta / 2.0;
    CycleState { y1: [2.0, 0.0], y2: [2.0, s * eta], x: [2.0, s * eta / 2.0], z1: [0.0, z], z2: [0.0, -z] }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleVerdict {
    /// Smallest `p` with `state(t + p) = state(t)` for every recorded `t`.
    pub period: Option<usize>,
    /// Largest deviation from the closed form over `t = 1..8`.
    pub table_error: f64,
    pub pass: bool,
}

pub const CYCLE_TOL: f64 = 1e-12;

pub fn cycle_check(trace: &CycleTrace) -> CycleVerdict {
    let s = &trace.iterates;
    let period = (1..=s.len() / 2).find(|&p| (0..s.len() - p).all(|t| s[t].max_abs_diff(&s[t + p]) <= CYCLE_TOL));
    let table_error = if s.len() >= 8 {
        (1..=8).map(|t| s[t - 1].max_abs_diff(&cycle_closed_form(trace.eta, trace.beta, t))).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    CycleVerdict { period, table_error, pass: period == Some(8) && table_error <= CYCLE_TOL }
}
