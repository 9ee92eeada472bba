use serde::{Deserialize, Serialize};

use super::{dot, norm2, NonNegativeMatrix, ZERO_TOL};
use crate::error::{Error, Result};

/// Stopping rule of the power method.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    /// Tolerance on `||x_{k+1} - x_k||_inf` between normalized iterates.
    pub eps: f64,
    /// Iteration cap; `None` means `100 d + 10000`.
    pub max_iters: Option<usize>,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self { eps: 1e-8, max_iters: None }
    }
}

impl PowerConfig {
    pub fn with_eps(eps: f64) -> Self {
        Self { eps, ..Self::default() }
    }

    pub fn max_iters_for(&self, dim: usize) -> usize {
        self.max_iters.unwrap_or(100 * dim + 10_000)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidConfig(format!("power eps must be positive, got {}", self.eps)));
        }
        if self.max_iters == Some(0) {
            return Err(Error::InvalidConfig("power max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Leading eigenvalue estimate together with a non-negative unit eigenvector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub rho: f64,
    /// Right leading eigenvector, Euclidean norm 1.
    pub v: Vec<f64>,
    /// Left leading eigenvector, when it was requested.
    pub u: Option<Vec<f64>>,
    pub power_iters: usize,
}

/// Selected leading eigenpair: the limit of the power method started from the
/// vector of ones.
///
/// The iteration runs on `A + cI` with `c = min(1, ||A||_inf)`, whose only
/// eigenvalue of maximal modulus is `rho(A) + c`, so imprimitive matrices
/// converge as well. Every `c > 0` has the same limit; shrinking `c` for
/// small matrices keeps the contraction `(c + |lambda_2|) / (c + rho)` away
/// from 1. Nilpotent matrices
/// are detected from the support graph and handled exactly: the power method
/// then converges only like `1/k`, but its limit direction is `A^m e` for the
/// largest `m` with `A^m e != 0`.
pub fn selected_eigenpair(a: &NonNegativeMatrix, cfg: &PowerConfig) -> Result<Eigenpair> {
    power_eigenpair_from(a, &vec![1.0; a.dim()], cfg)
}

/// Power method on `A + cI` from an arbitrary non-negative start vector.
///
/// With a start other than the vector of ones the limit is *some* leading
/// eigenvector, not necessarily the selected one.
pub fn power_eigenpair_from(
    a: &NonNegativeMatrix,
    start: &[f64],
    cfg: &PowerConfig,
) -> Result<Eigenpair> {
    cfg.validate()?;
    let d = a.dim();
    if start.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: start.len() });
    }
    let n0 = norm2(start);
    if !(n0 > 0.0) || start.iter().any(|x| *x < 0.0) {
        return Err(Error::InvalidConfig("power method start must be non-negative and nonzero".into()));
    }
    let mut x: Vec<f64> = start.iter().map(|s| s / n0).collect();

    if a.is_nilpotent() {
        return Ok(nilpotent_limit(a, x));
    }

    let shift = a.inf_norm().min(1.0);
    let max_iters = cfg.max_iters_for(d);
    let mut y = vec![0.0; d];
    for k in 1..=max_iters {
        a.mul_vec_into(&x, &mut y);
        // `y` holds `Ax` here; the residual of `x` costs nothing extra.
        if k > 1 && residual_ok(&x, &y, cfg.eps) {
            return Ok(finish(a, x, k - 1));
        }
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += shift * xi;
        }
        let n = norm2(&y);
        let mut diff = 0.0f64;
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi /= n;
            diff = diff.max((*yi - xi).abs());
        }
        std::mem::swap(&mut x, &mut y);
        if diff > cfg.eps {
            continue;
        }
        a.mul_vec_into(&x, &mut y);
        if residual_ok(&x, &y, cfg.eps) {
            return Ok(finish(a, x, k));
        }
    }
    Err(Error::NotConverged { iters: max_iters, last: Box::new(finish(a, x, max_iters)) })
}

/// Converged once `||Ax - rho x||_inf <= 5 eps max(1, rho)` with `rho` the
/// ratio estimate of `x`. The step test alone does not bound this when some
/// components of `x` are small.
fn residual_ok(x: &[f64], ax: &[f64], eps: f64) -> bool {
    let rho = ratio_from(x, ax, ZERO_TOL);
    let r = x.iter().zip(ax).map(|(xi, axi)| (axi - rho * xi).abs()).fold(0.0, f64::max);
    r <= 5.0 * eps * rho.max(1.0)
}

/// Selected left leading eigenvector, i.e. the selected right eigenvector of
/// the transpose.
pub fn left_eigenvector(a: &NonNegativeMatrix, cfg: &PowerConfig) -> Result<Vec<f64>> {
    selected_eigenpair(&a.transpose(), cfg).map(|p| p.v)
}

/// Collatz-Wielandt style estimate: the largest ratio `(Av)_i / v_i` over the
/// components with `v_i > zero_tol`, or `(v, Av)` when there is none.
pub fn ratio_estimate(a: &NonNegativeMatrix, v: &[f64], zero_tol: f64) -> f64 {
    ratio_from(v, &a.mul_vec(v), zero_tol)
}

fn ratio_from(v: &[f64], av: &[f64], zero_tol: f64) -> f64 {
    let best = v
        .iter()
        .zip(av)
        .filter(|(vi, _)| **vi > zero_tol)
        .map(|(vi, avi)| avi / vi)
        .fold(f64::NEG_INFINITY, f64::max);
    if best.is_finite() {
        best.max(0.0)
    } else {
        dot(v, av).max(0.0)
    }
}

/// Spectral radius as the largest value over the irreducible diagonal blocks
/// of the Frobenius normal form.
///
/// On a reducible matrix the power method can converge like `1/k` (a Jordan
/// block at `rho`); on each irreducible block the Perron root is simple and
/// the shifted iteration converges geometrically. Blocks that do not meet
/// the tolerance within the budget contribute their last estimate.
pub fn spectral_radius(a: &NonNegativeMatrix, cfg: &PowerConfig) -> Result<f64> {
    cfg.validate()?;
    let mut rho = 0.0f64;
    for block in a.strong_components() {
        let r = match block.as_slice() {
            [i] => a.get(*i, *i),
            _ => {
                let sub = NonNegativeMatrix::from_rows(
                    block.iter().map(|&i| block.iter().map(|&j| a.get(i, j)).collect()).collect(),
                )?;
                match selected_eigenpair(&sub, cfg) {
                    Ok(p) => p.rho,
                    Err(Error::NotConverged { last, .. }) => last.rho,
                    Err(e) => return Err(e),
                }
            }
        };
        rho = rho.max(r);
    }
    Ok(rho)
}

fn finish(a: &NonNegativeMatrix, v: Vec<f64>, power_iters: usize) -> Eigenpair {
    let rho = ratio_estimate(a, &v, ZERO_TOL);
    Eigenpair { rho, v, u: None, power_iters }
}

fn nilpotent_limit(a: &NonNegativeMatrix, mut x: Vec<f64>) -> Eigenpair {
    let mut steps = 0;
    loop {
        let mut y = a.mul_vec(&x);
        let n = norm2(&y);
        if n == 0.0 {
            break;
        }
        y.iter_mut().for_each(|yi| *yi /= n);
        x = y;
        steps += 1;
    }
    Eigenpair { rho: 0.0, v: x, u: None, power_iters: steps }
}
