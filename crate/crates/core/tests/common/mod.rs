#![allow(dead_code)]

use nalgebra::DMatrix;
use spectral_optim::linalg::ratio_estimate;
use spectral_optim::{
    selected_eigenpair, Direction, EigenSelector, Eigenpair, LinearProgram, NonNegativeMatrix,
    PowerConfig, ProductFamily, Result, RowSet, ZERO_TOL,
};

/// Spectral radius from a general dense eigensolver.
///
/// The Schur iteration is capped because it can stall on some 0/1 matrices.
/// It then retries on the transpose and on `A + I/2`, whose spectral radius is
/// `rho(A) + 1/2` for non-negative `A`.
pub fn nalgebra_rho(a: &NonNegativeMatrix) -> f64 {
    let d = a.dim();
    let m = DMatrix::from_row_slice(d, d, a.entries());
    let rho = |m: DMatrix<f64>| {
        m.try_schur(f64::EPSILON, 10_000)
            .map(|s| s.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
    };
    rho(m.clone())
        .or_else(|| rho(m.transpose()))
        .or_else(|| rho(&m + DMatrix::identity(d, d) * 0.5).map(|r| r - 0.5))
        .expect("Schur decomposition did not converge")
}

/// Largest [`nalgebra_rho`] over the irreducible diagonal blocks, with the
/// blocks read off a Warshall transitive closure. Dense eigensolvers are only
/// accurate to `eps^(1/k)` at a Jordan block of size `k`, which reducible
/// matrices can have at their spectral radius.
pub fn blockwise_rho(a: &NonNegativeMatrix) -> f64 {
    let d = a.dim();
    let mut reach: Vec<Vec<bool>> =
        (0..d).map(|i| (0..d).map(|j| i == j || a.get(i, j) > 0.0).collect()).collect();
    for k in 0..d {
        for i in 0..d {
            if reach[i][k] {
                for j in 0..d {
                    reach[i][j] |= reach[k][j];
                }
            }
        }
    }
    let mut done = vec![false; d];
    let mut rho = 0.0f64;
    for i in 0..d {
        if done[i] {
            continue;
        }
        let block: Vec<usize> = (0..d).filter(|&j| reach[i][j] && reach[j][i]).collect();
        block.iter().for_each(|&j| done[j] = true);
        let sub: Vec<Vec<f64>> = block.iter().map(|&p| block.iter().map(|&q| a.get(p, q)).collect()).collect();
        rho = rho.max(nalgebra_rho(&NonNegativeMatrix::from_rows(sub).unwrap()));
    }
    rho
}

pub fn matrix(rows: &[&[f64]]) -> NonNegativeMatrix {
    NonNegativeMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

pub fn cycling_family() -> ProductFamily {
    ProductFamily::new(vec![
        RowSet::finite(vec![
            vec![1.0, 1.0, 1.0],
            vec![0.0, 5.0, 10.0],
            vec![0.0, 10.0, 5.0],
            vec![12.0, 0.0, 0.0],
        ]),
        RowSet::finite(vec![vec![1.0, 1.0, 1.0], vec![0.0, 10.0, 0.0]]),
        RowSet::finite(vec![vec![1.0, 1.0, 3.0], vec![0.0, 0.0, 10.0]]),
    ])
    .unwrap()
}

pub fn cycling_a1() -> NonNegativeMatrix {
    matrix(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0], &[1.0, 1.0, 3.0]])
}

pub fn cycling_a2() -> NonNegativeMatrix {
    matrix(&[&[0.0, 5.0, 10.0], &[0.0, 10.0, 0.0], &[0.0, 0.0, 10.0]])
}

pub fn cycling_a3() -> NonNegativeMatrix {
    matrix(&[&[0.0, 10.0, 5.0], &[0.0, 10.0, 0.0], &[0.0, 0.0, 10.0]])
}

/// Returns the non-selected eigenvectors (2,2,1) for A2 and (2,1,2) for A3,
/// which make the plain greedy method alternate between them.
pub struct Adversary;

impl EigenSelector for Adversary {
    fn eigenpair(&self, a: &NonNegativeMatrix, cfg: &PowerConfig) -> Result<Eigenpair> {
        let scripted = if *a == cycling_a2() {
            Some([2.0, 2.0, 1.0])
        } else if *a == cycling_a3() {
            Some([2.0, 1.0, 2.0])
        } else {
            None
        };
        match scripted {
            Some(v) => {
                let v: Vec<f64> = v.iter().map(|x| x / 3.0).collect();
                Ok(Eigenpair { rho: ratio_estimate(a, &v, ZERO_TOL), v, u: None, power_iters: 0 })
            }
            None => selected_eigenpair(a, cfg),
        }
    }
}

/// Solves a square system by Gaussian elimination with partial pivoting.
pub fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-9 {
            return None;
        }
        m.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    Some(x)
}

/// All constraints of an LP (including box bounds) as `(a, b)` meaning
/// `(a, x) <= b`.
pub fn lp_rows(lp: &LinearProgram) -> Vec<(Vec<f64>, f64)> {
    let n = lp.objective.len();
    let mut rows: Vec<(Vec<f64>, f64)> =
        lp.constraints.iter().map(|c| (c.normal.clone(), c.rhs)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        rows.push((e.clone(), -lp.lower[j]));
        if lp.upper[j].is_finite() {
            e[j] = 1.0;
            rows.push((e, lp.upper[j]));
        }
    }
    rows
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Optimum over every basic feasible point: each choice of `n` constraints
/// held at equality. Returns `None` when no vertex is feasible.
pub fn vertex_enumeration(lp: &LinearProgram) -> Option<(Vec<f64>, f64)> {
    let n = lp.objective.len();
    let rows = lp_rows(lp);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for pick in combinations(rows.len(), n) {
        let m: Vec<Vec<f64>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&i| rows[i].1).collect();
        let Some(x) = solve(m, b) else { continue };
        let feasible = rows
            .iter()
            .all(|(a, rhs)| a.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-9);
        if !feasible {
            continue;
        }
        let val: f64 = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
        let better = match (&best, lp.sense) {
            (None, _) => true,
            (Some((_, b)), Direction::Max) => val > *b,
            (Some((_, b)), Direction::Min) => val < *b,
        };
        if better {
            best = Some((x, val));
        }
    }
    best
}
