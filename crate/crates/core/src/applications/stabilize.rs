use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, NonNegativeMatrix, PowerConfig};
use crate::optimizer::{optimize_with, OptimizationResult, OptimizerConfig, SelectedEigenvector};
use crate::rowsets::{Direction, ProductFamily, RowSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizationProblem {
    pub a: NonNegativeMatrix,
    /// Spectral radius to reach; 1 for Schur stability.
    pub target: f64,
    /// Width of the final radius bracket.
    pub r_tol: f64,
}

impl StabilizationProblem {
    pub fn new(a: NonNegativeMatrix) -> Self {
        Self { a, target: 1.0, r_tol: 1e-6 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.target > 0.0 && self.target.is_finite()) {
            return Err(Error::InvalidConfig(format!("target must be positive, got {}", self.target)));
        }
        if !(self.r_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("r_tol must be positive, got {}", self.r_tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizationOutcome {
    /// Optimal matrix at radius `r_star`.
    pub x: NonNegativeMatrix,
    /// Upper end of the final bracket; `||x - a||_inf <= r_star`.
    pub r_star: f64,
    /// Lower end of the final bracket, where the target is not reachable.
    pub r_lo: f64,
    pub rho_x: f64,
    pub rho_a: f64,
    /// Number of inner optimizations.
    pub probes: usize,
    /// Outer iterations summed over all probes.
    pub inner_iterations: usize,
}

/// Rows `{x >= 0 : ||x - a_i||_1 <= r}`: the max-norm ball of radius `r`
/// around `a` is exactly this product family.
fn ball_family(a: &NonNegativeMatrix, r: f64) -> Result<ProductFamily> {
    ProductFamily::new(a.rows().map(|row| RowSet::l1_ball(row.to_vec(), r)).collect())
}

/// Pulls each row of `x` back into the `l1` ball of radius `r` around the
/// matching row of `a`. Rows are moved toward `a`, so they stay non-negative.
fn clip_into_ball(x: &NonNegativeMatrix, a: &NonNegativeMatrix, r: f64) -> Result<NonNegativeMatrix> {
    let rows = x
        .rows()
        .zip(a.rows())
        .map(|(xr, ar)| {
            let dist: f64 = xr.iter().zip(ar).map(|(p, q)| (p - q).abs()).sum();
            let scale = if dist > r { r / dist } else { 1.0 };
            xr.iter().zip(ar).map(|(p, q)| (q + (p - q) * scale).max(0.0)).collect()
        })
        .collect();
    NonNegativeMatrix::from_rows(rows)
}

fn rho_of(a: &NonNegativeMatrix) -> Result<f64> {
    spectral_radius(a, &PowerConfig::with_eps(1e-12))
}

struct Bisection<'a> {
    a: &'a NonNegativeMatrix,
    cfg: OptimizerConfig,
    warm: NonNegativeMatrix,
    probes: usize,
    inner_iterations: usize,
}

impl Bisection<'_> {
    fn probe(&mut self, r: f64) -> Result<OptimizationResult> {
        let family = ball_family(self.a, r)?;
        let start = clip_into_ball(&self.warm, self.a, r)?;
        let res = optimize_with(&family, &self.cfg, Some(&start), &SelectedEigenvector)?;
        self.probes += 1;
        self.inner_iterations += res.iterations();
        self.warm = res.matrix.clone();
        Ok(res)
    }
}

/// Smallest max-norm perturbation `X >= 0` of `A` with `rho(X) <= target`.
///
/// For a radius `r` the minimum of `rho` over the ball around `A` is found by
/// selective greedy in min mode; that minimum is non-increasing in `r`, so
/// the smallest feasible radius is located by bisection on `[0, ||A||_inf]`
/// (the zero matrix is in the ball of radius `||A||_inf`). Each probe is
/// started from the previous optimum pulled into the new ball.
pub fn closest_stable(p: &StabilizationProblem, cfg: &OptimizerConfig) -> Result<StabilizationOutcome> {
    p.validate()?;
    let rho_a = rho_of(&p.a)?;
    if rho_a <= p.target {
        return Ok(trivial(p, rho_a));
    }
    let mut cfg = cfg.clone();
    cfg.direction = Direction::Min;
    let (mut lo, mut hi) = (0.0, p.a.inf_norm());
    let mut best = NonNegativeMatrix::zeros(p.a.dim());
    let mut rho_best = 0.0;
    let mut bis = Bisection { a: &p.a, cfg, warm: p.a.clone(), probes: 0, inner_iterations: 0 };
    while hi - lo > p.r_tol {
        let mid = 0.5 * (lo + hi);
        let res = bis.probe(mid)?;
        if res.rho <= p.target {
            hi = mid;
            best = res.matrix;
            rho_best = res.rho;
        } else {
            lo = mid;
        }
    }
    Ok(StabilizationOutcome {
        x: best,
        r_star: hi,
        r_lo: lo,
        rho_x: rho_best,
        rho_a,
        probes: bis.probes,
        inner_iterations: bis.inner_iterations,
    })
}

/// Smallest max-norm perturbation `X >= 0` of `A` with
/// `rho(X) >= target - 1e-6`, by bisection on `[0, target]` with selective
/// greedy in max mode. Adding `target` to a diagonal entry always suffices.
pub fn closest_unstable(p: &StabilizationProblem, cfg: &OptimizerConfig) -> Result<StabilizationOutcome> {
    p.validate()?;
    let rho_a = rho_of(&p.a)?;
    let goal = p.target - 1e-6;
    if rho_a >= goal {
        return Ok(trivial(p, rho_a));
    }
    let mut cfg = cfg.clone();
    cfg.direction = Direction::Max;
    let (mut lo, mut hi) = (0.0, p.target);
    let mut best = p.a.clone();
    let mut row = p.a.row(0).to_vec();
    row[0] += p.target;
    best.set_row(0, &row)?;
    let mut rho_best = rho_of(&best)?;
    let mut bis = Bisection { a: &p.a, cfg, warm: p.a.clone(), probes: 0, inner_iterations: 0 };
    while hi - lo > p.r_tol {
        let mid = 0.5 * (lo + hi);
        let res = bis.probe(mid)?;
        if res.rho >= goal {
            hi = mid;
            best = res.matrix;
            rho_best = res.rho;
        } else {
            lo = mid;
        }
    }
    Ok(StabilizationOutcome {
        x: best,
        r_star: hi,
        r_lo: lo,
        rho_x: rho_best,
        rho_a,
        probes: bis.probes,
        inner_iterations: bis.inner_iterations,
    })
}

fn trivial(p: &StabilizationProblem, rho_a: f64) -> StabilizationOutcome {
    StabilizationOutcome {
        x: p.a.clone(),
        r_star: 0.0,
        r_lo: 0.0,
        rho_x: rho_a,
        rho_a,
        probes: 0,
        inner_iterations: 0,
    }
}
