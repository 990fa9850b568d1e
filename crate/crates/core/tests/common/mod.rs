//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the solver code paths being checked.
#![allow(dead_code, clippy::needless_range_loop)]

use ncsplit::linalg::{DenseMatrix, RngStream};

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let frob: f64 = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn to_rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// `A Aᵀ` computed entry by entry.
pub fn outer_gram(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter().map(|ri| a.iter().map(|rj| ri.iter().zip(rj).map(|(x, y)| x * y).sum()).collect()).collect()
}

pub fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, piv);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for k in col..=n {
                m[i][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// Every subset of `0..n` with at most `k` elements.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            return;
        }
        for i in start..n {
            cur.push(i);
            out.push(cur.clone());
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `min ½‖w − u‖²` over `‖w − c‖₀ ≤ k` by enumerating supports of `w − c`.
pub fn l0_ball_oracle(u: &[f64], center: &[f64], k: usize) -> f64 {
    subsets_up_to(u.len(), k)
        .iter()
        .map(|s| (0..u.len()).filter(|i| !s.contains(i)).map(|i| 0.5 * (u[i] - center[i]).powi(2)).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Minimum of a scalar function by a coarse scan of `[lo, hi]` (step 1e-3)
/// refined with a 1e-6 scan around the best coarse point; `0` and the end
/// points are always included.
pub fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let mut best_x = 0.0;
    let mut best = f(0.0);
    let consider = |x: f64, best: &mut f64, best_x: &mut f64| {
        let v = f(x);
        if v < *best {
            *best = v;
            *best_x = x;
        }
    };
    consider(lo, &mut best, &mut best_x);
    consider(hi, &mut best, &mut best_x);
    let coarse = ((hi - lo) / 1e-3).ceil() as usize;
    for i in 0..=coarse {
        consider(lo + i as f64 * 1e-3, &mut best, &mut best_x);
    }
    let centre = best_x;
    for i in 0..=4000 {
        consider(centre - 2e-3 + i as f64 * 1e-6, &mut best, &mut best_x);
    }
    best
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], step: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = xp[i];
            xp[i] = orig + step;
            let fp = f(&xp);
            xp[i] = orig - step;
            let fm = f(&xp);
            xp[i] = orig;
            (fp - fm) / (2.0 * step)
        })
        .collect()
}

pub fn random_matrix(rng: &mut RngStream, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::new(rows, cols, rng.randn_vector(rows * cols)).unwrap()
}

pub fn random_spd(rng: &mut RngStream, n: usize) -> DenseMatrix {
    let a = random_matrix(rng, n, n);
    let mut g = a.gram_inner();
    g.add_diagonal(0.5);
    g
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Expected orbit of the period-8 example for `1 ≤ t ≤ 8`, as
/// `[y1, y2, x, z1, z2]`.
pub fn cycle_table(eta: f64, beta: f64, t: usize) -> [[f64; 2]; 5] {
    let sign = if t <= 4 { -1.0 } else { 1.0 };
    let z = (2.0 - (t as f64 - 4.0).abs()) * beta * eta / 2.0;
    [[2.0, 0.0], [2.0, sign * eta], [2.0, sign * eta / 2.0], [0.0, z], [0.0, -z]]
}
