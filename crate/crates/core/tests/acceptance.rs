//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its runtime; the process exits non-zero if any criterion fails.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use ncsplit::admm::{check_assumption, suggest_beta, BetaRule, Termination};
use ncsplit::experiments::{
    cycle_run, gen_concave, gen_cpv, gen_pcf, metric_vio, run_concave, run_cpv, run_pcf, Ball, CpvMode, RunOptions,
    CONCAVE_MULTIPLIERS,
};
use ncsplit::linalg::{first_difference_sigma, spd_solve, Curvature, LinearOperator, RngStream, SpdSystem};
use ncsplit::pg::PgTermination;
use ncsplit::prox::ProxOperator;
use ncsplit::smooth::{ProximalTermSpec, SmoothModel};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 ------------------------------------------------------------------------
fn cycle_exactness() -> Outcome {
    let mut worst = 0.0f64;
    for eta in [0.25, 0.5, 1.0] {
        for beta in [0.5, 1.0, 3.0] {
            let trace = cycle_run(eta, beta, 80).map_err(|e| e.to_string())?;
            let s = &trace.iterates;
            ensure(s.len() == 80, || format!("trace length {}", s.len()))?;
            for t in 1..=8 {
                let want = cycle_table(eta, beta, t);
                let got = [s[t - 1].y1, s[t - 1].y2, s[t - 1].x, s[t - 1].z1, s[t - 1].z2];
                for (g, w) in got.iter().zip(&want) {
                    for k in 0..2 {
                        worst = worst.max((g[k] - w[k]).abs());
                    }
                }
            }
            ensure(worst <= 1e-12, || format!("eta={eta} beta={beta}: table error {worst:e}"))?;
            for t in 0..s.len() - 8 {
                let a = [s[t].y1, s[t].y2, s[t].x, s[t].z1, s[t].z2];
                let b = [s[t + 8].y1, s[t + 8].y2, s[t + 8].x, s[t + 8].z1, s[t + 8].z2];
                let d =
                    a.iter().zip(&b).flat_map(|(p, q)| (0..2).map(move |k| (p[k] - q[k]).abs())).fold(0.0, f64::max);
                ensure(d <= 1e-12, || format!("eta={eta} beta={beta}: not 8-periodic at t={}", t + 1))?;
            }
            for p in 1..8 {
                let periodic = (0..s.len() - p).all(|t| s[t].x == s[t + p].x && s[t].z1 == s[t + p].z1);
                ensure(!periodic, || format!("eta={eta} beta={beta}: shorter period {p}"))?;
            }
        }
    }
    Ok(format!("9 grid points, max table error {worst:.1e}"))
}

// 2 ------------------------------------------------------------------------
fn prox_oracles() -> Outcome {
    let mut rng = RngStream::new(202_402);
    let mut worst_comb = 0.0f64;
    for case in 0..500 {
        let dim = 1 + rng.next_below(12);
        let budget = rng.next_below(5).min(dim);
        let u: Vec<f64> = rng.randn_vector(dim).iter().map(|v| 3.0 * v).collect();
        let (p, center) = if case % 2 == 0 {
            (ProxOperator::IndicatorCard { budget }, vec![0.0; dim])
        } else {
            let c = rng.randn_vector(dim);
            (ProxOperator::IndicatorL0Ball { center: c.clone(), budget }, c)
        };
        let w = p.prox(&u, 1.0).map_err(|e| e.to_string())?;
        ensure(p.eval(&w) == 0.0, || format!("case {case}: prox output infeasible"))?;
        let got = 0.5 * dist(&w, &u).powi(2);
        let want = l0_ball_oracle(&u, &center, budget);
        worst_comb = worst_comb.max((got - want).abs());
        ensure((got - want).abs() <= 1e-10, || format!("case {case}: gap {}", got - want))?;
    }

    let mut worst_1d = 0.0f64;
    for case in 0..1000 {
        let u = 4.0 * rng.normal();
        let tau = 0.1 + 2.0 * rng.next_open_unit();
        let lambda = 0.1 + 2.0 * rng.next_open_unit();
        let (p, pen): (ProxOperator, fn(f64) -> f64) = match case % 3 {
            0 => (ProxOperator::L0Penalty { weight: lambda }, |y| if y != 0.0 { 1.0 } else { 0.0 }),
            1 => (ProxOperator::L1Penalty { weight: lambda }, f64::abs),
            _ => (ProxOperator::LHalfPenalty { weight: lambda }, |y: f64| y.abs().sqrt()),
        };
        let obj = |y: f64| tau * lambda * pen(y) + 0.5 * (y - u).powi(2);
        let y = p.prox(&[u], tau).map_err(|e| e.to_string())?[0];
        let want = grid_min(obj, u.min(0.0) - 1e-3, u.max(0.0) + 1e-3);
        let gap = obj(y) - want;
        worst_1d = worst_1d.max(gap.abs());
        ensure(gap.abs() <= 1e-5, || format!("1-D case {case} ({}): u={u} gap {gap:e}", p.name()))?;
    }

    let mut worst_proj = 0.0f64;
    for case in 0..1000 {
        let dim = 1 + rng.next_below(20);
        let radius = 0.2 + 2.0 * rng.next_open_unit();
        let p = if case % 2 == 0 {
            ProxOperator::IndicatorL1Ball { radius }
        } else {
            ProxOperator::IndicatorLinfBall { radius }
        };
        let u: Vec<f64> = rng.randn_vector(dim).iter().map(|v| 2.0 * v).collect();
        let v: Vec<f64> = rng.randn_vector(dim).iter().map(|v| 2.0 * v).collect();
        let pu = p.prox(&u, 1.0).map_err(|e| e.to_string())?;
        let pv = p.prox(&v, 1.0).map_err(|e| e.to_string())?;
        let ppu = p.prox(&pu, 1.0).map_err(|e| e.to_string())?;
        let idem = dist(&ppu, &pu);
        let expand = dist(&pu, &pv) - dist(&u, &v);
        worst_proj = worst_proj.max(idem).max(expand);
        ensure(idem <= 1e-10, || format!("projection case {case}: not idempotent ({idem:e})"))?;
        ensure(expand <= 1e-10, || format!("projection case {case}: expansive ({expand:e})"))?;
        ensure(p.eval(&pu) == 0.0, || format!("projection case {case}: infeasible"))?;
    }
    Ok(format!(
        "500 combinatorial (gap {worst_comb:.1e}), 1000 scalar (gap {worst_1d:.1e}), 1000 projections (slack {worst_proj:.1e})"
    ))
}

// 3 ------------------------------------------------------------------------
fn parameter_rules() -> Outcome {
    let mut rng = RngStream::new(303);
    let fail = |e: ncsplit::Error| e.to_string();
    for case in 0..100 {
        let d = 2 + rng.next_below(8);
        let k = 1 + rng.next_below(10);
        let a = LinearOperator::dense(random_matrix(&mut rng, k, d));
        let h = SmoothModel::least_squares(a, rng.randn_vector(k)).map_err(fail)?;
        let id = LinearOperator::identity(d).map_err(fail)?;
        let l = h.hessian_bounds().map_err(fail)?.lipschitz;

        let lin = ProximalTermSpec::l_smoothing(&h, l).map_err(fail)?;
        let s = suggest_beta(&h, &id, &lin).map_err(fail)?;
        ensure(s.rule == BetaRule::IdentityLinearized && s.gamma == 0.5, || format!("case {case}: {s:?}"))?;
        ensure((s.beta - 1.01 * 5.0 * l).abs() <= 1e-12 * s.beta, || format!("case {case}: beta {}", s.beta))?;
        let ok = check_assumption(&h, &id, &lin, s.beta, Some(s.gamma)).map_err(fail)?;
        ensure(ok.assumption_ok, || format!("case {case}: linearized suggestion rejected {ok:?}"))?;
        let edge = check_assumption(&h, &id, &lin, 5.0 * l, Some(0.5)).map_err(fail)?;
        ensure(!edge.assumption_ok && edge.margin <= 0.0, || format!("case {case}: 5L accepted {edge:?}"))?;

        let zero = ProximalTermSpec::zero(&h).map_err(fail)?;
        let s = suggest_beta(&h, &id, &zero).map_err(fail)?;
        ensure(s.rule == BetaRule::IdentityLeastSquares, || format!("case {case}: {s:?}"))?;
        let ok = check_assumption(&h, &id, &zero, s.beta, Some(s.gamma)).map_err(fail)?;
        ensure(ok.assumption_ok, || format!("case {case}: least-squares suggestion rejected {ok:?}"))?;
        let edge = check_assumption(&h, &id, &zero, 2f64.sqrt() * l, None).map_err(fail)?;
        ensure(!edge.assumption_ok && edge.margin <= 0.0, || format!("case {case}: √2L accepted {edge:?}"))?;

        let m = 1 + rng.next_below(6);
        let n = m + 1 + rng.next_below(6);
        let op = LinearOperator::dense(random_matrix(&mut rng, m, n));
        let hp = SmoothModel::proximity(rng.randn_vector(n));
        let zero = ProximalTermSpec::zero(&hp).map_err(fail)?;
        let s = suggest_beta(&hp, &op, &zero).map_err(fail)?;
        let sigma = op.sigma().map_err(fail)?;
        ensure(s.rule == BetaRule::SurjectiveStronglyConvex, || format!("case {case}: {s:?}"))?;
        let ok = check_assumption(&hp, &op, &zero, s.beta, Some(s.gamma)).map_err(fail)?;
        ensure(ok.assumption_ok && ok.delta == 1.0, || format!("case {case}: surjective suggestion rejected {ok:?}"))?;
        let edge = check_assumption(&hp, &op, &zero, 2.0 / sigma, None).map_err(fail)?;
        ensure(!edge.assumption_ok && edge.margin <= 0.0, || format!("case {case}: 2/σ accepted {edge:?}"))?;
    }
    Ok("100 instances × 3 patterns; suggestions pass, boundaries fail".into())
}

// 4 ------------------------------------------------------------------------
fn merit_and_dual_bound() -> Outcome {
    let opts = RunOptions { max_iter: Some(20_000), ..RunOptions::default() };
    let (mut max_iters, mut checks, mut worst_merit, mut worst_dual) = (0, 0, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for seed in 1..=50 {
        let inst = gen_cpv(50, 200, 10, seed).map_err(|e| e.to_string())?;
        let run = run_cpv(&inst, CpvMode::L0Cold, &opts).map_err(|e| e.to_string())?;
        let rep = &run.report;
        let d = &rep.diagnostics;
        ensure(rep.termination == Termination::Converged, || {
            format!("seed {seed}: {:?} after {}", rep.termination, rep.iters)
        })?;
        ensure(rep.assumption_ok, || format!("seed {seed}: parameters not certified"))?;
        ensure(d.merit_violations == 0 && d.merit_checks + 1 == rep.iters, || {
            format!("seed {seed}: merit {} violations over {} checks", d.merit_violations, d.merit_checks)
        })?;
        ensure(d.dual_bound_violations == 0 && d.dual_bound_checks + 1 == rep.iters, || {
            format!("seed {seed}: dual bound excess {:e}", d.max_dual_bound_excess)
        })?;
        ensure(d.max_lagrangian_identity_gap <= 1e-8, || {
            format!("seed {seed}: AL identity gap {:e}", d.max_lagrangian_identity_gap)
        })?;
        ensure(d.max_z_update_gap <= 1e-12, || format!("seed {seed}: z identity gap {:e}", d.max_z_update_gap))?;
        ensure(d.y_update_violations == 0, || format!("seed {seed}: y-update not optimal"))?;
        ensure(run.row.vio <= 10, || format!("seed {seed}: vio {}", run.row.vio))?;
        let scale = 1e-6 * (1.0 + norm(&rep.z));
        let r = rep.residuals;
        ensure(r.r_grad <= scale && r.r_feas <= scale && r.r_prox_fixed_point <= scale, || {
            format!("seed {seed}: residuals {r:?}")
        })?;
        let vio = metric_vio(&inst.m, &inst.b, &run.x).map_err(|e| e.to_string())?;
        ensure(vio == run.row.vio, || format!("seed {seed}: row not recomputable"))?;
        max_iters = max_iters.max(rep.iters);
        checks += d.merit_checks;
        worst_merit = worst_merit.max(d.max_merit_increase);
        worst_dual = worst_dual.max(d.max_dual_bound_excess);
    }
    Ok(format!(
        "50 runs, {checks} merit checks, max rel. merit increase {worst_merit:.1e}, max dual excess {worst_dual:.1e}, max iters {max_iters}"
    ))
}

// 5 ------------------------------------------------------------------------
fn strict_improvement() -> Outcome {
    let opts = RunOptions::default();
    let mut nonstationary = 0;
    let mut smallest_gain = f64::INFINITY;
    for seed in 101..=120 {
        let inst = gen_cpv(50, 200, 10, seed).map_err(|e| e.to_string())?;
        let run = run_cpv(&inst, CpvMode::L0Warm, &opts).map_err(|e| e.to_string())?;
        let start_res = run.row.initial_prox_residual.expect("warm rows carry it");
        let start_obj = run.row.initial_objective.expect("warm rows carry it");
        if start_res > 1e-6 {
            nonstationary += 1;
            let gain = start_obj - run.report.objective;
            smallest_gain = smallest_gain.min(gain);
            ensure(gain > 1e-12, || {
                format!("seed {seed}: objective {} not below start {start_obj}", run.report.objective)
            })?;
        }
    }
    ensure(nonstationary > 0, || "no non-stationary warm start encountered".into())?;
    Ok(format!("{nonstationary}/20 non-stationary starts, smallest decrease {smallest_gain:.3e}"))
}

// 6 ------------------------------------------------------------------------
fn pcf_recovery() -> Outcome {
    let opts = RunOptions::default();
    let (mut card_ok, mut exact, mut denoised) = (0, 0, 0);
    for seed in 1..=20 {
        let inst = gen_pcf(1000, 20, 0.0, seed).map_err(|e| e.to_string())?;
        let run = run_pcf(&inst, &opts).map_err(|e| e.to_string())?;
        card_ok += usize::from(run.row.card <= 19);
        exact += usize::from(run.row.err <= 1e-4);

        let noisy = gen_pcf(1000, 20, 0.05, seed).map_err(|e| e.to_string())?;
        let run = run_pcf(&noisy, &opts).map_err(|e| e.to_string())?;
        ensure(run.row.card <= 19, || format!("noisy seed {seed}: card {}", run.row.card))?;
        denoised += usize::from(run.row.err < run.row.err_hat);
    }
    ensure(card_ok == 20, || format!("card ≤ 19 in only {card_ok}/20"))?;
    ensure(exact >= 16, || format!("err ≤ 1e-4 in only {exact}/20"))?;
    ensure(denoised >= 18, || format!("denoising helped in only {denoised}/20"))?;
    Ok(format!("card ok 20/20, exact {exact}/20, denoised {denoised}/20"))
}

// 7 ------------------------------------------------------------------------
fn pg_descent_and_trend() -> Outcome {
    let opts = RunOptions::default();
    let mut agree = 0;
    let mut total_runs = 0;
    for ball in [Ball::L1, Ball::Linf] {
        for seed in 1..=4 {
            let inst = gen_concave(100, 300, seed, ball).map_err(|e| e.to_string())?;
            let runs = run_concave(&inst, &CONCAVE_MULTIPLIERS, &opts).map_err(|e| e.to_string())?;
            for r in &runs {
                total_runs += 1;
                ensure(r.report.termination == PgTermination::Converged, || {
                    format!("{ball} seed {seed} k={}: {:?}", r.row.beta_mult, r.report.termination)
                })?;
                ensure(r.report.max_descent_excess <= 1e-8, || {
                    format!(
                        "{ball} seed {seed} k={}: descent excess {:e}",
                        r.row.beta_mult, r.report.max_descent_excess
                    )
                })?;
                ensure(r.report.summed_descent_ok(&r.config), || format!("{ball} seed {seed}: summed bound fails"))?;
                ensure(r.row.in_ball && r.report.stayed_feasible, || format!("{ball} seed {seed}: left the ball"))?;
            }
            if ball == Ball::L1 {
                let first = &runs[0].row;
                let last = &runs[runs.len() - 1].row;
                ensure(last.iter <= first.iter, || {
                    format!("seed {seed}: iters {} at 50 vs {} at 1", last.iter, first.iter)
                })?;
                let f0 = first.fval;
                if runs.iter().all(|r| (r.row.fval - f0).abs() <= 1e-6 * f0.abs()) {
                    agree += 1;
                }
            }
        }
    }
    ensure(agree >= 3, || format!("ℓ1 fval agreement on only {agree}/4"))?;
    Ok(format!("{total_runs} runs descend; ℓ1 fval agree on {agree}/4"))
}

// 8 ------------------------------------------------------------------------
fn numerics_bedrock() -> Outcome {
    let mut rng = RngStream::new(808);
    let fail = |e: ncsplit::Error| e.to_string();
    let mut worst_adj = 0.0f64;
    let mut worst_spec = 0.0f64;
    let mut worst_spd = 0.0f64;
    let mut worst_grad = 0.0f64;
    for case in 0..60 {
        let m = 1 + rng.next_below(30);
        let n = m + rng.next_below(20);
        let dense = random_matrix(&mut rng, m, n);
        let ops = [
            LinearOperator::dense(dense.clone()),
            LinearOperator::identity(n).map_err(fail)?,
            LinearOperator::first_difference(n.max(2)).map_err(fail)?,
        ];
        for op in &ops {
            let x = rng.randn_vector(op.cols());
            let y = rng.randn_vector(op.rows());
            let lhs = dot(&op.apply(&x).map_err(fail)?, &y);
            let rhs = dot(&x, &op.adjoint_apply(&y).map_err(fail)?);
            let gap = (lhs - rhs).abs() / (1.0 + norm(&x) * norm(&y));
            worst_adj = worst_adj.max(gap);
            ensure(gap <= 1e-10, || format!("case {case}: adjoint gap {gap:e}"))?;
        }

        // spectral summaries against Jacobi
        let rows = to_rows(&dense);
        let outer = jacobi_eigenvalues(&outer_gram(&rows));
        let op = &ops[0];
        let sigma = op.sigma().map_err(fail)?;
        let lmax = op.lambda_max().map_err(fail)?;
        let rel_s = (sigma - outer[0]).abs() / outer[0];
        let rel_l = (lmax - outer[m - 1]).abs() / outer[m - 1];
        worst_spec = worst_spec.max(rel_s).max(rel_l);
        ensure(rel_s <= 1e-6 && rel_l <= 1e-6, || format!("case {case}: σ rel {rel_s:e}, λmax rel {rel_l:e}"))?;
        let nd = 2 + case % 49;
        let d = LinearOperator::first_difference(nd).map_err(fail)?;
        let dd: Vec<Vec<f64>> = (0..nd - 1)
            .map(|i| {
                (0..nd - 1)
                    .map(|j| {
                        if i == j {
                            2.0
                        } else if i.abs_diff(j) == 1 {
                            -1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let ev = jacobi_eigenvalues(&dd);
        let rel = (first_difference_sigma(nd) - ev[0]).abs() / ev[0];
        let rel2 = (d.lambda_max().map_err(fail)? - ev[nd - 2]).abs() / ev[nd - 2];
        worst_spec = worst_spec.max(rel).max(rel2);
        ensure(rel <= 1e-6 && rel2 <= 1e-6, || format!("first difference n={nd}: rel {rel:e} {rel2:e}"))?;

        // SPD solves on every path
        let c = 0.1 + rng.next_open_unit();
        let beta = 0.1 + 5.0 * rng.next_open_unit();
        let scalar = Curvature::Scalar(c);
        let dense_curv = Curvature::Dense(random_spd(&mut rng, n));
        for (curv, op) in [(&scalar, &ops[0]), (&scalar, &ops[1]), (&scalar, &ops[2]), (&dense_curv, &ops[0])] {
            let sys = SpdSystem::new(curv, beta, op);
            let rhs = rng.randn_vector(op.cols());
            let x = spd_solve(&sys, &rhs).map_err(fail)?;
            let res = dist(&sys.apply(&x), &rhs) / (1.0 + norm(&rhs));
            worst_spd = worst_spd.max(res);
            ensure(res <= 1e-10, || format!("case {case}: spd residual {res:e}"))?;
            if op.cols() <= 40 {
                let oracle = gauss_solve(&to_rows(&sys.assemble()), &rhs);
                ensure(dist(&x, &oracle) <= 1e-8 * (1.0 + norm(&oracle)), || format!("case {case}: spd mismatch"))?;
            }
        }

        // gradients against finite differences
        let k = 1 + rng.next_below(10);
        let a = LinearOperator::dense(random_matrix(&mut rng, k, n));
        let b = rng.randn_vector(k);
        let sym = {
            let mut q = random_matrix(&mut rng, n, n);
            let t = q.clone();
            for i in 0..n {
                for j in 0..n {
                    q.set(i, j, 0.5 * (t.get(i, j) + t.get(j, i)));
                }
            }
            q
        };
        let models = [
            SmoothModel::least_squares(a.clone(), b.clone()).map_err(fail)?,
            SmoothModel::negated_least_squares(a, b).map_err(fail)?,
            SmoothModel::proximity(rng.randn_vector(n)),
            SmoothModel::indefinite_quadratic(sym, rng.randn_vector(n)).map_err(fail)?,
        ];
        for h in &models {
            let x = rng.randn_vector(n);
            let g = h.gradient(&x);
            let fd = fd_gradient(|v| h.value(v), &x, 1e-5);
            let rel = dist(&g, &fd) / (1.0 + norm(&g));
            worst_grad = worst_grad.max(rel);
            ensure(rel <= 1e-5, || format!("case {case}: {} gradient rel {rel:e}", h.name()))?;
        }
    }
    Ok(format!("adjoint {worst_adj:.1e}, spectral {worst_spec:.1e}, spd {worst_spd:.1e}, gradient {worst_grad:.1e}"))
}

// 9 ------------------------------------------------------------------------
fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_ncsplit");
    let dir = std::env::temp_dir().join(format!("ncsplit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let suite: [&[&str]; 5] = [
        &["cpv", "--count", "5"],
        &["pcf", "--count", "3"],
        &["concave", "--count", "4"],
        &["cycle", "--eta", "0.5", "--beta", "3"],
        &["cpv", "--count", "2", "--format", "json"],
    ];
    let run_suite = |tag: &str, jobs: &str| -> Result<Vec<(PathBuf, Vec<u8>)>, String> {
        suite
            .iter()
            .enumerate()
            .map(|(i, args)| {
                let path = dir.join(format!("{tag}-{i}.out"));
                let status = Command::new(exe)
                    .args(*args)
                    .args(["--seed", "7", "--jobs", jobs, "--out"])
                    .arg(&path)
                    .output()
                    .map_err(|e| e.to_string())?;
                ensure(status.status.success(), || {
                    format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr))
                })?;
                let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
                Ok((path, bytes))
            })
            .collect()
    };
    let first = run_suite("a", "1")?;
    let second = run_suite("b", "1")?;
    let threaded = run_suite("c", "4")?;
    let mut total = 0;
    for ((a, b), c) in first.iter().zip(&second).zip(&threaded) {
        ensure(!a.1.is_empty(), || format!("{} is empty", a.0.display()))?;
        ensure(a.1 == b.1, || format!("{} and {} differ", a.0.display(), b.0.display()))?;
        ensure(a.1 == c.1, || format!("{} differs under --jobs 4", c.0.display()))?;
        total += a.1.len();
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} outputs, {total} bytes, identical across runs and thread counts", first.len()))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "period-8 replay", limit: Some(Duration::from_secs(1)), run: cycle_exactness },
        Criterion { id: 2, name: "prox oracle suite", limit: Some(Duration::from_secs(30)), run: prox_oracles },
        Criterion { id: 3, name: "parameter rules", limit: Some(Duration::from_secs(10)), run: parameter_rules },
        Criterion {
            id: 4,
            name: "merit monotonicity and dual-step bound",
            limit: Some(Duration::from_secs(60)),
            run: merit_and_dual_bound,
        },
        Criterion {
            id: 5,
            name: "strict improvement from warm start",
            limit: Some(Duration::from_secs(30)),
            run: strict_improvement,
        },
        Criterion {
            id: 6,
            name: "piecewise-constant recovery",
            limit: Some(Duration::from_secs(120)),
            run: pcf_recovery,
        },
        Criterion {
            id: 7,
            name: "proximal gradient descent and step trend",
            limit: Some(Duration::from_secs(30)),
            run: pg_descent_and_trend,
        },
        Criterion { id: 8, name: "numerics bedrock", limit: Some(Duration::from_secs(20)), run: numerics_bedrock },
        Criterion { id: 9, name: "determinism", limit: None, run: determinism },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let over = c.limit.is_some_and(|l| elapsed > l);
        let limit = c.limit.map_or("none".to_string(), |l| format!("{}s", l.as_secs()));
        let (verdict, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time limit; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!("criterion {}: {verdict} [{:.2}s / limit {limit}] {}: {detail}", c.id, elapsed.as_secs_f64(), c.name);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
