//! Outer iterations: the spectral simplex method, the greedy method and the
//! selective greedy method.
//!
//! All methods share one loop. At iterate `A_k` a leading eigenvector `v_k`
//! is computed, each set proposes its best row against `v_k`, and a rule
//! decides which improvable rows to replace. Rows are improvable only when
//! the gain in `(a_i, v_k)` exceeds `delta`. Every iteration records the
//! bounds `t(A_k) <= rho_min` and `rho_max <= s(A_k)`.

mod cycle;
mod diagnostics;
mod oracle;
mod reducibility;
mod selector;
mod step;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    left_eigenvector, power_eigenpair_from, spectral_radius, Bound, Eigenpair, NonNegativeMatrix,
    PowerConfig, ZERO_TOL,
};
use crate::linalg::row_ratio;
use crate::rowsets::{Direction, ProductFamily};

pub use cycle::{detect_cycle, IterateSignature};
pub use diagnostics::{contraction_factor, linear_rate_bound};
pub use oracle::brute_force_optimum;
pub use reducibility::{detect_and_remedy_reducibility, ReducibilityReport};
pub use selector::{EigenSelector, SelectedEigenvector, UnselectedEigenvector};
pub use step::greedy_step;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Spectral simplex, replacing the first improvable row.
    SimplexSmallestIndex,
    /// Spectral simplex, replacing the row with the extreme ratio `s_i` (max)
    /// or `t_i` (min).
    SimplexPivot,
    /// All improvable rows at once, with an arbitrary leading eigenvector.
    Greedy,
    /// All improvable rows at once, with the selected leading eigenvector.
    SelectiveGreedy,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::SimplexSmallestIndex, Method::SimplexPivot, Method::Greedy, Method::SelectiveGreedy];

    pub fn name(self) -> &'static str {
        match self {
            Method::SimplexSmallestIndex => "simplex",
            Method::SimplexPivot => "simplex-pivot",
            Method::Greedy => "greedy",
            Method::SelectiveGreedy => "selective-greedy",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplex" | "simplex-smallest-index" => Ok(Method::SimplexSmallestIndex),
            "simplex-pivot" => Ok(Method::SimplexPivot),
            "greedy" => Ok(Method::Greedy),
            "selective-greedy" => Ok(Method::SelectiveGreedy),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// No row improves; in max mode the eigenvector is also positive.
    Optimal,
    /// Stopped early because the gap between the bounds fell below `gap_tol`.
    BoundCertified,
    MaxIters,
    /// No row improves but the max-mode eigenvector has zero components.
    ReducibleDetected,
    CycleDetected,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::BoundCertified => "bound-certified",
            Status::MaxIters => "max-iters",
            Status::ReducibleDetected => "reducible-detected",
            Status::CycleDetected => "cycle-detected",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub direction: Direction,
    pub method: Method,
    pub power: PowerConfig,
    /// Minimal gain in `(a_i, v)` for a row replacement.
    pub delta: f64,
    /// Eigenvector components at or below this count as zero.
    pub zero_tol: f64,
    pub max_outer_iters: usize,
    /// Weight of the cyclic permutation added when a reducible fixed point is
    /// found in max mode.
    pub reducibility_alpha: f64,
    /// Stop as soon as `s - rho` (max) or `rho - t` (min) is at most
    /// `gap_tol * max(1, rho)`.
    pub gap_tol: Option<f64>,
    /// Keep every iterate matrix in the trace.
    pub record_iterates: bool,
    /// Attach the contraction factor to each iteration. Costs one extra
    /// left-eigenvector computation per iteration.
    pub diagnostics: bool,
}

impl OptimizerConfig {
    pub fn new(direction: Direction) -> Self {
        Self {
            direction,
            method: Method::SelectiveGreedy,
            power: PowerConfig::default(),
            delta: 1e-10,
            zero_tol: ZERO_TOL,
            max_outer_iters: 1000,
            reducibility_alpha: 1e-8,
            gap_tol: None,
            record_iterates: false,
            diagnostics: false,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.power.eps = eps;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.power.validate()?;
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.delta > 0.0) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.zero_tol >= 0.0) {
            return bad(format!("zero_tol must be non-negative, got {}", self.zero_tol));
        }
        if self.max_outer_iters == 0 {
            return bad("max_outer_iters must be at least 1".into());
        }
        if !(self.reducibility_alpha > 0.0 && self.reducibility_alpha < 1.0) {
            return bad(format!("reducibility_alpha must lie in (0, 1), got {}", self.reducibility_alpha));
        }
        if let Some(g) = self.gap_tol {
            if !(g > 0.0) {
                return bad(format!("gap_tol must be positive, got {g}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration number.
    pub iter: usize,
    pub rho: f64,
    pub s: Bound,
    pub t: Bound,
    /// 0-based indices of the rows replaced after this iteration.
    pub rows_changed: Vec<usize>,
    /// Seconds since the start of the run.
    pub time_s: f64,
    pub contraction: Option<f64>,
    pub matrix: Option<NonNegativeMatrix>,
    /// False when the power method hit its cap and its last iterate was used.
    pub power_converged: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, IterationRecord> {
        self.records.iter()
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.rho).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub matrix: NonNegativeMatrix,
    /// Spectral radius of `matrix`, computed block-wise when it is reducible.
    pub rho: f64,
    pub direction: Direction,
    pub method: Method,
    /// Lower bound `t` at the returned matrix.
    pub t: Bound,
    /// Upper bound `s` at the returned matrix.
    pub s: Bound,
    /// Leading eigenvector of the returned matrix.
    pub eigenvector: Vec<f64>,
    pub trace: IterationTrace,
    pub status: Status,
    pub reducibility: Option<ReducibilityReport>,
}

impl OptimizationResult {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    /// Width of the certificate: `s - rho` in max mode, `rho - t` in min mode.
    pub fn gap(&self) -> f64 {
        gap(self.direction, self.rho, self.s, self.t)
    }
}

fn gap(direction: Direction, rho: f64, s: Bound, t: Bound) -> f64 {
    match direction {
        Direction::Max => s.value() - rho,
        Direction::Min => rho - t.value(),
    }
}

/// Runs `cfg.method` with the eigenvector rule it calls for.
pub fn optimize(family: &ProductFamily, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    match cfg.method {
        Method::Greedy => optimize_with(family, cfg, None, &UnselectedEigenvector),
        _ => optimize_with(family, cfg, None, &SelectedEigenvector),
    }
}

pub fn selective_greedy(family: &ProductFamily, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    optimize(family, &cfg.clone().with_method(Method::SelectiveGreedy))
}

pub fn greedy(family: &ProductFamily, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    optimize(family, &cfg.clone().with_method(Method::Greedy))
}

/// Spectral simplex method. Uses the pivoting rule when `cfg.method` asks for
/// it and the smallest-index rule otherwise.
pub fn spectral_simplex(family: &ProductFamily, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    let method = match cfg.method {
        Method::SimplexPivot => Method::SimplexPivot,
        _ => Method::SimplexSmallestIndex,
    };
    optimize(family, &cfg.clone().with_method(method))
}

/// General entry point: optional start matrix and an explicit eigenvector
/// rule. Without a start, row `i` of the first iterate is the best row of
/// `F_i` against the vector of ones.
///
/// A max-mode fixed point whose eigenvector has zero components triggers
/// one retry on the perturbed family (see
/// [`detect_and_remedy_reducibility`]), after which the original family is
/// optimized again from the recovered matrix. The better of the two original
/// family results is returned with status `ReducibleDetected`.
pub fn optimize_with(
    family: &ProductFamily,
    cfg: &OptimizerConfig,
    start: Option<&NonNegativeMatrix>,
    selector: &dyn EigenSelector,
) -> Result<OptimizationResult> {
    let first = run(family, cfg, start, selector)?;
    if first.status != Status::ReducibleDetected {
        return Ok(first);
    }
    reducibility::remedy(family, cfg, selector, first)
}

struct Snapshot {
    matrix: NonNegativeMatrix,
    pair: Eigenpair,
    s: Bound,
    t: Bound,
}

fn eigenpair_or_last(
    selector: &dyn EigenSelector,
    a: &NonNegativeMatrix,
    power: &PowerConfig,
) -> Result<(Eigenpair, bool)> {
    match selector.eigenpair(a, power) {
        Ok(p) => Ok((p, true)),
        Err(Error::NotConverged { last, .. }) => Ok((*last, false)),
        Err(e) => Err(e),
    }
}

fn fold_bounds(rows: &[Vec<f64>], v: &[f64], zero_tol: f64, max: bool) -> (Vec<Bound>, Bound) {
    let ratios: Vec<Bound> = rows.iter().enumerate().map(|(i, b)| row_ratio(b, v, i, zero_tol)).collect();
    let folded = if max {
        ratios.iter().copied().fold(Bound::new(0.0), Bound::max)
    } else {
        ratios.iter().copied().fold(Bound::INFINITY, Bound::min)
    };
    (ratios, folded)
}

/// `v` without the small components whose row of `a` has ratio below `rho`.
/// In the limit those components vanish; their residue would pull `t` down
/// to the radius of their own block. Any `v >= 0` gives a valid `t`.
fn trimmed(a: &NonNegativeMatrix, v: &[f64], rho: f64, zero_tol: f64) -> Option<Vec<f64>> {
    let floor = rho * (1.0 - 1e-9);
    let small = 1e-3 * v.iter().copied().fold(0.0, f64::max);
    let keep: Vec<bool> = (0..v.len())
        .map(|i| v[i] > zero_tol && (v[i] > small || row_ratio(a.row(i), v, i, zero_tol).value() >= floor))
        .collect();
    let dropped = keep.iter().zip(v).any(|(k, x)| !k && *x > zero_tol);
    (dropped && keep.contains(&true)).then(|| v.iter().zip(&keep).map(|(x, k)| if *k { *x } else { 0.0 }).collect())
}

type Bounds = (Vec<Vec<f64>>, Vec<Vec<f64>>, Bound, Bound);

/// Rows and bounds at `pair`. In min mode `t` is the certificate, so it is
/// also taken from the trimmed vector after a power run restarted from it:
/// classes that only feed themselves stay at zero, and the rest converges at
/// the rate of the dominant block.
fn bounds_at(
    family: &ProductFamily,
    a: &NonNegativeMatrix,
    pair: &Eigenpair,
    dir: Direction,
    zero_tol: f64,
) -> Result<Bounds> {
    let v = &pair.v;
    let hi = family.best_rows(v, Direction::Max)?;
    let lo = family.best_rows(v, Direction::Min)?;
    let s = fold_bounds(&hi, v, zero_tol, true).1;
    let mut t = fold_bounds(&lo, v, zero_tol, false).1;
    if dir == Direction::Min {
        if let Some(w) = trimmed(a, v, pair.rho, zero_tol) {
            let w = match power_eigenpair_from(a, &w, &PowerConfig::with_eps(1e-12)) {
                Ok(p) => p.v,
                Err(Error::NotConverged { last, .. }) => last.v,
                Err(_) => w,
            };
            let lo_w = family.best_rows(&w, Direction::Min)?;
            t = t.max(fold_bounds(&lo_w, &w, zero_tol, false).1);
        }
    }
    Ok((hi, lo, s, t))
}

fn choose_rows(
    method: Method,
    direction: Direction,
    improvable: Vec<usize>,
    candidates: &[Vec<f64>],
    v: &[f64],
    zero_tol: f64,
) -> Vec<usize> {
    match method {
        Method::Greedy | Method::SelectiveGreedy => improvable,
        Method::SimplexSmallestIndex => improvable.into_iter().take(1).collect(),
        Method::SimplexPivot => {
            let mut pick: Option<(usize, Bound)> = None;
            for i in improvable {
                let r = row_ratio(&candidates[i], v, i, zero_tol);
                let better = match (pick, direction) {
                    (None, _) => true,
                    (Some((_, b)), Direction::Max) => r > b,
                    (Some((_, b)), Direction::Min) => r < b,
                };
                if better {
                    pick = Some((i, r));
                }
            }
            pick.map(|(i, _)| vec![i]).unwrap_or_default()
        }
    }
}

/// One run of the shared loop, without the reducibility retry.
pub(crate) fn run(
    family: &ProductFamily,
    cfg: &OptimizerConfig,
    start: Option<&NonNegativeMatrix>,
    selector: &dyn EigenSelector,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    let d = family.dim();
    let dir = cfg.direction;
    let clock = Instant::now();
    let mut a = match start {
        Some(m) if m.dim() != d => return Err(Error::DimensionMismatch { expected: d, found: m.dim() }),
        Some(m) => m.clone(),
        None => family.best_matrix(&vec![1.0; d], dir)?,
    };

    let mut records = Vec::new();
    let mut history = Vec::new();
    let mut best: Option<Snapshot> = None;
    // Confirmation and the final value get a tight tolerance and, unless the
    // caller set a cap, twenty times the default budget: they run once per
    // solve, and nearly tied blocks converge slowly.
    let polish = PowerConfig {
        eps: cfg.power.eps.min(1e-12),
        max_iters: cfg.power.max_iters.or(Some(20 * cfg.power.max_iters_for(d))),
    };
    let (status, fin) = loop {
        let (mut pair, mut converged) = eigenpair_or_last(selector, &a, &cfg.power)?;
        let (mut hi, mut lo, mut s, mut t) = bounds_at(family, &a, &pair, dir, cfg.zero_tol)?;
        let mut improvable = {
            let candidates = if dir == Direction::Max { &hi } else { &lo };
            step::improvable_rows(&a, &pair.v, candidates, dir, cfg.delta)
        };
        // A fixed point is confirmed with the tight tolerance: near-tied
        // diagonal blocks leave residue in components that should vanish,
        // and that residue can hide an improving row.
        if improvable.is_empty() && polish.eps < cfg.power.eps {
            (pair, converged) = eigenpair_or_last(selector, &a, &polish)?;
            (hi, lo, s, t) = bounds_at(family, &a, &pair, dir, cfg.zero_tol)?;
            let candidates = if dir == Direction::Max { &hi } else { &lo };
            improvable = step::improvable_rows(&a, &pair.v, candidates, dir, cfg.delta);
        }
        let candidates = match dir {
            Direction::Max => &hi,
            Direction::Min => &lo,
        };
        let changed = choose_rows(cfg.method, dir, improvable, candidates, &pair.v, cfg.zero_tol);
        let mut next = a.clone();
        for &i in &changed {
            next.set_row(i, &candidates[i])?;
        }
        let contraction = if cfg.diagnostics && !changed.is_empty() {
            left_eigenvector(&next, &cfg.power)
                .ok()
                .and_then(|u| contraction_factor(&u, &pair.v).ok())
        } else {
            None
        };
        records.push(IterationRecord {
            iter: records.len() + 1,
            rho: pair.rho,
            s,
            t,
            rows_changed: changed.clone(),
            time_s: clock.elapsed().as_secs_f64(),
            contraction,
            matrix: cfg.record_iterates.then(|| a.clone()),
            power_converged: converged,
        });
        history.push(IterateSignature::of(&a, pair.rho));

        let zero_component = pair.v.iter().any(|x| *x <= cfg.zero_tol);
        let current = Snapshot { matrix: a, pair, s, t };
        if best.as_ref().is_none_or(|b| dir.improves(current.pair.rho, b.pair.rho, 0.0)) {
            best = Some(Snapshot {
                matrix: current.matrix.clone(),
                pair: current.pair.clone(),
                s,
                t,
            });
        }

        if detect_cycle(&history, dir, cfg.delta) {
            break (Status::CycleDetected, best.take().expect("best iterate"));
        }
        if changed.is_empty() {
            let status = if dir == Direction::Max && zero_component {
                Status::ReducibleDetected
            } else {
                Status::Optimal
            };
            break (status, current);
        }
        if let Some(g) = cfg.gap_tol {
            if gap(dir, current.pair.rho, s, t) <= g * current.pair.rho.max(1.0) {
                break (Status::BoundCertified, current);
            }
        }
        if records.len() >= cfg.max_outer_iters {
            break (Status::MaxIters, best.take().expect("best iterate"));
        }
        a = next;
    };

    // Recompute the reported value with a tight tolerance through the same
    // eigenvector rule. Bounds from any non-negative vector are valid, so the
    // tighter of the loop's and the polished ones are kept.
    let (pair, s, t) = match selector.eigenpair(&fin.matrix, &polish) {
        Ok(p) => {
            let (_, _, s, t) = bounds_at(family, &fin.matrix, &p, dir, cfg.zero_tol)?;
            (p, s.min(fin.s), t.max(fin.t))
        }
        Err(_) => (fin.pair, fin.s, fin.t),
    };
    // A reducible optimum may carry a Jordan block at rho, where the power
    // method is only accurate to about the square root of its tolerance.
    let rho = if fin.matrix.is_irreducible() {
        pair.rho
    } else {
        spectral_radius(&fin.matrix, &polish)?
    };

    Ok(OptimizationResult {
        matrix: fin.matrix,
        rho,
        direction: dir,
        method: cfg.method,
        t,
        s,
        eigenvector: pair.v,
        trace: IterationTrace { records },
        status,
        reducibility: None,
    })
}
