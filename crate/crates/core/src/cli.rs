//! Command-line front end.
//!
//! Table commands (`cpv`, `pcf`, `concave`) emit one row per run; `cycle`
//! prints its verdict and can dump the trace; `check` and `solve` read a JSON
//! problem file. Exit status is 0 on success, 1 on solver failure and 2 on
//! configuration errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::admm::{admm_solve, check_assumption, check_boundedness, AdmmConfig, AdmmInit, BetaHeuristic};
use crate::error::Error;
use crate::experiments::{
    concave_sweep, cpv_sweep, cycle_check, cycle_run, pcf_sweep, seed_range, Ball, CpvMode, RunOptions,
    CONCAVE_MULTIPLIERS,
};
use crate::linalg::{DenseMatrix, LinearOperator, OperatorKind};
use crate::pg::{estimate_ell, pg_solve, PgConfig};
use crate::prox::ProxOperator;
use crate::smooth::{ProximalTermSpec, SmoothModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ncsplit", version, about = "Proximal ADMM and proximal gradient experiments")]
pub struct Cli {
    /// Base seed; runs use consecutive seeds starting here.
    #[arg(long, global = true, env = "NCSPLIT_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Output format (tables default to csv, check/solve to json).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent seeds (0 = one per core).
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Include wall-clock seconds (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Override the suggested penalty parameter.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least-squares projection with a budget of violated equations.
    Cpv {
        #[arg(long, default_value_t = 50)]
        m: usize,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        r: usize,
        /// Number of consecutive seeds.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_values_t = ["l0_cold".to_string(), "l1_baseline".to_string(), "l0_warm".to_string()])]
        modes: Vec<String>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Piecewise-constant fit under a jump budget.
    Pcf {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        r: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.05])]
        tau: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Keep β fixed instead of growing it from 1/(5nσ).
        #[arg(long)]
        no_heuristic: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Concave least squares over a unit ball by proximal gradient.
    Concave {
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = ["l1".to_string(), "linf".to_string()])]
        ball: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values_t = CONCAVE_MULTIPLIERS.to_vec())]
        mults: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Replay of the period-8 orbit for an injective map.
    Cycle {
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 80)]
        steps: usize,
    },
    /// Parameter and boundedness report for a problem file.
    Check {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// One ADMM or proximal gradient run on a problem file.
    Solve {
        #[arg(long)]
        problem: PathBuf,
    },
}

// ------------------------------------------------------------ problem file

/// Smooth term as written in a problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothSpec {
    LeastSquares { a: OperatorKind, b: Vec<f64> },
    Proximity { x_hat: Vec<f64> },
    NegatedLeastSquares { a: OperatorKind, b: Vec<f64> },
    IndefiniteQuadratic { q: DenseMatrix, c: Vec<f64> },
}

impl SmoothSpec {
    pub fn build(&self) -> crate::Result<SmoothModel> {
        match self {
            SmoothSpec::LeastSquares { a, b } => SmoothModel::least_squares(LinearOperator::new(a.clone())?, b.clone()),
            SmoothSpec::Proximity { x_hat } => Ok(SmoothModel::proximity(x_hat.clone())),
            SmoothSpec::NegatedLeastSquares { a, b } => {
                SmoothModel::negated_least_squares(LinearOperator::new(a.clone())?, b.clone())
            }
            SmoothSpec::IndefiniteQuadratic { q, c } => SmoothModel::indefinite_quadratic(q.clone(), c.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Admm,
    Pg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiChoice {
    #[default]
    Zero,
    LSmoothing,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub method: Method,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    #[serde(default)]
    pub phi: PhiChoice,
    /// Smoothing constant for `l_smoothing` (defaults to the Lipschitz bound).
    pub l: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    /// Start of the β growth schedule, if any.
    pub heuristic_beta0: Option<f64>,
    /// Proximal gradient `ℓ` (defaults to [`estimate_ell`]).
    pub ell: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    pub z: Option<Vec<f64>>,
}

/// JSON problem file for `check` and `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub smooth: SmoothSpec,
    pub prox: ProxOperator,
    /// Defaults to the identity on the smooth term's dimension.
    pub operator: Option<OperatorKind>,
    #[serde(default)]
    pub solver: SolverSpec,
    pub init: Option<InitSpec>,
}

struct Problem {
    h: SmoothModel,
    p: ProxOperator,
    m: LinearOperator,
    spec: ProblemFile,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    fn build(self) -> crate::Result<Problem> {
        let h = self.smooth.build()?;
        let m = match &self.operator {
            Some(kind) => LinearOperator::new(kind.clone())?,
            None => LinearOperator::identity(h.dim())?,
        };
        self.prox.validate()?;
        Ok(Problem { h, p: self.prox.clone(), m, spec: self })
    }
}

impl Problem {
    fn phi(&self) -> crate::Result<ProximalTermSpec> {
        match self.spec.solver.phi {
            PhiChoice::Zero => ProximalTermSpec::zero(&self.h),
            PhiChoice::LSmoothing => {
                let l = match self.spec.solver.l {
                    Some(l) => l,
                    None => self.h.hessian_bounds()?.lipschitz,
                };
                ProximalTermSpec::l_smoothing(&self.h, l)
            }
        }
    }
}

// ------------------------------------------------------------------ errors

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(Error),
    Io(io::Error),
    /// A run finished but its verdict failed.
    Verdict(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) | CliError::Io(_) | CliError::Verdict(_) => EXIT_SOLVER,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Verdict(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => CliError::Config(e.to_string()),
            other => CliError::Solver(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

// ------------------------------------------------------------------ output

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header plus string records, ready for CSV or JSON emission.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.into_inner().map_err(|e| CliError::Io(io::Error::other(e.to_string())))
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.header.iter().cloned().zip(row.iter().map(Cell::json)).collect()))
            .collect();
        let mut out = serde_json::to_vec_pretty(&rows)?;
        out.push(b'\n');
        Ok(out)
    }

    fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// One-row table from a flat JSON object (keys in sorted order).
fn flat_table(value: &Value) -> Table {
    let mut t = Table::default();
    let mut row = Vec::new();
    if let Value::Object(map) = value {
        for (k, v) in map {
            t.header.push(k.clone());
            row.push(match v {
                Value::Number(n) if n.is_u64() => Cell::Int(n.as_u64().unwrap_or_default()),
                Value::Number(n) => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
                Value::String(s) => Cell::Text(s.clone()),
                Value::Null => Cell::Text(String::new()),
                other => Cell::Text(other.to_string()),
            });
        }
    }
    t.rows.push(row);
    t
}

// ---------------------------------------------------------------- commands

fn validate_solver(s: &SolverArgs) -> Result<RunOptions, CliError> {
    if !(s.tol > 0.0) {
        return Err(CliError::Config(format!("--tol must be positive, got {}", s.tol)));
    }
    if s.max_iter == Some(0) {
        return Err(CliError::Config("--max-iter must be positive".into()));
    }
    if let Some(b) = s.beta {
        if !(b > 0.0) || !b.is_finite() {
            return Err(CliError::Config(format!("--beta must be positive, got {b}")));
        }
    }
    if let Some(g) = s.gamma {
        if !(g > 0.0 && g < 1.0) {
            return Err(CliError::Config(format!("--gamma must lie in (0,1), got {g}")));
        }
    }
    Ok(RunOptions { tol: s.tol, max_iter: s.max_iter, beta: s.beta, gamma: s.gamma, ..RunOptions::default() })
}

fn check_count(count: usize) -> Result<(), CliError> {
    if count == 0 {
        Err(CliError::Config("--count must be positive".into()))
    } else {
        Ok(())
    }
}

fn with_timing(mut header: Vec<&'static str>, timing: bool) -> Vec<&'static str> {
    if timing {
        header.push("cpu_s");
    }
    header
}

/// Runs a parsed command line and returns the bytes written.
pub fn run(cli: &Cli) -> Result<Vec<u8>, CliError> {
    let seed = cli.seed;
    let timing = cli.timing;
    let table_format = cli.format.unwrap_or(Format::Csv);
    let report_format = cli.format.unwrap_or(Format::Json);
    let bytes = match &cli.command {
        Command::Cpv { m, n, r, count, modes, solver } => {
            check_count(*count)?;
            if !(*n >= *m && *m >= *r && *m >= 1) {
                return Err(CliError::Config(format!("need n ≥ m ≥ r ≥ 0 and m ≥ 1, got m={m} n={n} r={r}")));
            }
            let modes = modes.iter().map(|s| s.parse::<CpvMode>()).collect::<crate::Result<Vec<_>>>()?;
            let opts = validate_solver(solver)?;
            let runs = cpv_sweep(*m, *n, *r, &seed_range(seed, *count), &modes, &opts, cli.jobs)?;
            let mut t = Table::new(&with_timing(vec!["r", "n", "iter", "vio", "dist", "mode", "seed"], timing));
            for run in runs {
                let row = run.row;
                let mut cells = vec![
                    Cell::Int(row.r as u64),
                    Cell::Int(row.n as u64),
                    Cell::Int(row.iter as u64),
                    Cell::Int(row.vio as u64),
                    Cell::Float(row.dist),
                    Cell::Text(row.mode.to_string()),
                    Cell::Int(row.seed),
                ];
                if timing {
                    cells.push(Cell::Float(row.cpu_s));
                }
                t.rows.push(cells);
            }
            t.render(table_format)?
        }
        Command::Pcf { n, r, tau, count, no_heuristic, solver } => {
            check_count(*count)?;
            if !(*r >= 2 && *n >= 3 && *r < *n) {
                return Err(CliError::Config(format!("need 2 ≤ r ≤ n − 1, got n={n} r={r}")));
            }
            if let Some(bad) = tau.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
                return Err(CliError::Config(format!("--tau must be nonnegative, got {bad}")));
            }
            let mut opts = validate_solver(solver)?;
            opts.heuristic = !no_heuristic;
            let seeds = seed_range(seed, *count);
            let mut t = Table::new(&with_timing(vec!["tau", "r", "n", "iter", "card", "err", "seed"], timing));
            for &noise in tau {
                for run in pcf_sweep(*n, *r, noise, &seeds, &opts, cli.jobs)? {
                    let row = run.row;
                    let mut cells = vec![
                        Cell::Float(row.tau),
                        Cell::Int(row.r as u64),
                        Cell::Int(row.n as u64),
                        Cell::Int(row.iter as u64),
                        Cell::Int(row.card as u64),
                        Cell::Float(row.err),
                        Cell::Int(row.seed),
                    ];
                    if timing {
                        cells.push(Cell::Float(row.cpu_s));
                    }
                    t.rows.push(cells);
                }
            }
            t.render(table_format)?
        }
        Command::Concave { m, n, ball, mults, count, tol, max_iter } => {
            check_count(*count)?;
            if *m == 0 || *n == 0 {
                return Err(CliError::Config("--m and --n must be positive".into()));
            }
            if !(*tol > 0.0) || *max_iter == Some(0) {
                return Err(CliError::Config("--tol and --max-iter must be positive".into()));
            }
            if let Some(bad) = mults.iter().find(|k| !(**k > 0.0) || !k.is_finite()) {
                return Err(CliError::Config(format!("--mults must be positive, got {bad}")));
            }
            let balls = ball.iter().map(|s| s.parse::<Ball>()).collect::<crate::Result<Vec<_>>>()?;
            let opts = RunOptions { tol: *tol, max_iter: *max_iter, ..RunOptions::default() };
            let seeds = seed_range(seed, *count);
            let mut t =
                Table::new(&with_timing(vec!["n", "lambda_max", "beta_mult", "iter", "fval", "ball", "seed"], timing));
            for b in balls {
                for run in concave_sweep(*m, *n, &seeds, b, mults, &opts, cli.jobs)? {
                    let row = run.row;
                    let mut cells = vec![
                        Cell::Int(row.n as u64),
                        Cell::Float(row.lambda_max),
                        Cell::Float(row.beta_mult),
                        Cell::Int(row.iter as u64),
                        Cell::Float(row.fval),
                        Cell::Text(row.ball.to_string()),
                        Cell::Int(row.seed),
                    ];
                    if timing {
                        cells.push(Cell::Float(row.cpu_s));
                    }
                    t.rows.push(cells);
                }
            }
            t.render(table_format)?
        }
        Command::Cycle { eta, beta, steps } => {
            if !(*eta > 0.0 && *eta <= 1.0) || !(*beta > 0.0) || !beta.is_finite() {
                return Err(CliError::Config(format!("need 0 < eta ≤ 1 and beta > 0, got eta={eta} beta={beta}")));
            }
            let trace = cycle_run(*eta, *beta, *steps)?;
            let verdict = cycle_check(&trace);
            if let Some(path) = &cli.out {
                let mut t =
                    Table::new(&["t", "y1_1", "y1_2", "y2_1", "y2_2", "x_1", "x_2", "z1_1", "z1_2", "z2_1", "z2_2"]);
                for (i, s) in trace.iterates.iter().enumerate() {
                    let mut cells = vec![Cell::Int(i as u64 + 1)];
                    for v in [s.y1, s.y2, s.x, s.z1, s.z2] {
                        cells.extend(v.iter().map(|c| Cell::Float(*c)));
                    }
                    t.rows.push(cells);
                }
                emit(&t.render(table_format)?, Some(path))?;
            }
            let period = verdict.period.map_or("none".to_string(), |p| p.to_string());
            let line = format!("period={period} verdict={}\n", if verdict.pass { "PASS" } else { "FAIL" });
            io::stdout().lock().write_all(line.as_bytes())?;
            if !verdict.pass {
                return Err(CliError::Verdict(format!(
                    "cycle check failed: period {period}, table error {}",
                    verdict.table_error
                )));
            }
            return Ok(line.into_bytes());
        }
        Command::Check { problem, beta, gamma } => {
            let problem = ProblemFile::load(problem)?.build()?;
            let phi = problem.phi()?;
            let beta = match beta.or(problem.spec.solver.beta) {
                Some(b) => b,
                None => crate::admm::suggest_beta(&problem.h, &problem.m, &phi)?.beta,
            };
            let gamma = gamma.or(problem.spec.solver.gamma);
            let mut report = check_assumption(&problem.h, &problem.m, &phi, beta, gamma)?;
            report.boundedness = Some(check_boundedness(&problem.h, &problem.p, &problem.m, beta, report.gamma_used)?);
            let mut value = serde_json::to_value(&report)?;
            if let Value::Object(map) = &mut value {
                map.insert("beta".into(), Value::from(beta));
            }
            match report_format {
                Format::Json => json_bytes(&value)?,
                Format::Csv => {
                    if let Value::Object(map) = &mut value {
                        if let Some(Value::Object(b)) = map.remove("boundedness") {
                            map.insert("bounded_ok".into(), b["bounded_ok"].clone());
                            map.insert("bounded_reason".into(), b["reason"].clone());
                        }
                    }
                    flat_table(&value).to_csv()?
                }
            }
        }
        Command::Solve { problem } => {
            let problem = ProblemFile::load(problem)?.build()?;
            let value = solve_problem(&problem)?;
            match report_format {
                Format::Json => json_bytes(&value)?,
                Format::Csv => {
                    let mut summary = serde_json::Map::new();
                    if let Value::Object(map) = &value {
                        for key in ["termination", "iters", "objective", "final_beta", "residual"] {
                            if let Some(v) = map.get(key) {
                                summary.insert(key.into(), v.clone());
                            }
                        }
                        if let Some(Value::Object(res)) = map.get("residuals") {
                            for (k, v) in res {
                                summary.insert(k.clone(), v.clone());
                            }
                        }
                    }
                    flat_table(&Value::Object(summary)).to_csv()?
                }
            }
        }
    };
    emit(&bytes, cli.out.as_deref())?;
    Ok(bytes)
}

fn solve_problem(problem: &Problem) -> Result<Value, CliError> {
    let s = &problem.spec.solver;
    let (h, p, m) = (&problem.h, &problem.p, &problem.m);
    match s.method {
        Method::Admm => {
            let phi = problem.phi()?;
            let mut cfg = AdmmConfig::suggested(h, m, phi)?;
            if let Some(b) = s.beta {
                cfg.beta = b;
                cfg.gamma = check_assumption(h, m, &phi, b, None)?.gamma_used;
            }
            if let Some(g) = s.gamma {
                cfg.gamma = g;
            }
            if let Some(t) = s.tol {
                cfg.tol = t;
            }
            if let Some(mi) = s.max_iter {
                cfg.max_iter = mi;
            }
            if let Some(b0) = s.heuristic_beta0 {
                cfg.beta_heuristic = Some(BetaHeuristic::new(b0));
            }
            let init = match &problem.spec.init {
                None => AdmmInit::zeros(h.dim(), m.rows()),
                Some(i) => {
                    let y = match &i.y {
                        Some(y) => y.clone(),
                        None => m.apply(&i.x)?,
                    };
                    AdmmInit { x: i.x.clone(), y, z: i.z.clone().unwrap_or_else(|| vec![0.0; m.rows()]) }
                }
            };
            let report = admm_solve(h, p, m, &cfg, init)?;
            Ok(serde_json::to_value(&report)?)
        }
        Method::Pg => {
            if !m.is_identity() {
                return Err(CliError::Config("proximal gradient needs the identity operator".into()));
            }
            let beta = s.beta.ok_or_else(|| CliError::Config("proximal gradient needs solver.beta".into()))?;
            let ell = match s.ell {
                Some(l) => l,
                None => estimate_ell(h, Some(1e-6 / beta))?.ell,
            };
            let mut cfg = PgConfig::new(beta, ell)?;
            if let Some(t) = s.tol {
                cfg = cfg.with_tol(t);
            }
            if let Some(mi) = s.max_iter {
                cfg = cfg.with_max_iter(mi);
            }
            let x0 = problem.spec.init.as_ref().map_or_else(|| vec![0.0; h.dim()], |i| i.x.clone());
            let report = pg_solve(h, p, &cfg, &x0)?;
            Ok(serde_json::to_value(&report)?)
        }
    }
}

/// Parses `args` and runs them, printing errors to stderr; returns the exit
/// status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("ncsplit: {e}");
            e.exit_code()
        }
    }
}
