//! Dense two-phase primal simplex with Bland's rule.
//!
//! Problems are small (a few dozen rows), so a full tableau is the simplest
//! correct choice. Bland's rule guarantees termination; among degenerate
//! optima the first vertex reached is returned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::rowsets::Direction;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;

/// `(normal, x) <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub normal: Vec<f64>,
    pub rhs: f64,
}

/// Optimize `(objective, x)` subject to the constraints and
/// `lower <= x <= upper`. Lower bounds must be finite; upper bounds may be
/// `+inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub sense: Direction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

impl LinearProgram {
    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if n == 0 {
            return bad("LP has no variables".into());
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.lower.len().min(self.upper.len()) });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return bad("LP objective must be finite".into());
        }
        for (j, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !lo.is_finite() || hi.is_nan() || hi < lo {
                return bad(format!("LP bounds of variable {j} are invalid: [{lo}, {hi}]"));
            }
        }
        for c in &self.constraints {
            if c.normal.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.normal.len() });
            }
            if !c.rhs.is_finite() || c.normal.iter().any(|a| !a.is_finite()) {
                return bad("LP constraint data must be finite".into());
            }
        }
        Ok(())
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|x| *x /= p);
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<f64>| {
            let f = row[c];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= f * p);
            }
        };
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Sets the objective row for maximizing `costs` and prices out the basis.
    fn set_objective(&mut self, costs: &[f64]) {
        self.obj = vec![0.0; self.width + 1];
        for (o, c) in self.obj.iter_mut().zip(costs) {
            *o = -c;
        }
        for r in 0..self.rows.len() {
            let f = self.obj[self.basis[r]];
            if f != 0.0 {
                let row = &self.rows[r];
                self.obj.iter_mut().zip(row).for_each(|(o, x)| *o -= f * x);
            }
        }
    }

    /// Bland's rule on columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j] < -COST_TOL) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[r] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(Error::LpUnbounded),
            }
        }
    }
}

/// Solves the LP and returns an optimal vertex.
pub fn lp_optimize(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.objective.len();

    // Shift x = lower + y with y >= 0; finite upper bounds become rows.
    let mut normals: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for c in &lp.constraints {
        normals.push(c.normal.clone());
        rhs.push(c.rhs - dot(&c.normal, &lp.lower));
    }
    for j in 0..n {
        if lp.upper[j].is_finite() {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            normals.push(e);
            rhs.push(lp.upper[j] - lp.lower[j]);
        }
    }
    let m = normals.len();
    let negative: Vec<usize> = (0..m).filter(|&r| rhs[r] < 0.0).collect();
    let n_art = negative.len();
    let width = n + m + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for r in 0..m {
        let mut row = vec![0.0; width + 1];
        let sign = if rhs[r] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = sign * normals[r][j];
        }
        row[n + r] = sign;
        row[width] = sign * rhs[r];
        if sign < 0.0 {
            let a = n + m + negative.iter().position(|&k| k == r).unwrap();
            row[a] = 1.0;
            basis.push(a);
        } else {
            basis.push(n + r);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, obj: Vec::new(), basis, width };

    if n_art > 0 {
        let mut costs = vec![0.0; width];
        costs[n + m..].iter_mut().for_each(|c| *c = -1.0);
        t.set_objective(&costs);
        t.optimize(width)?;
        if t.obj[width] < -FEAS_TOL {
            return Err(Error::LpInfeasible);
        }
        // Drive remaining artificials (at value zero) out of the basis.
        for r in 0..m {
            if t.basis[r] >= n + m {
                if let Some(c) = (0..n + m).find(|&j| t.rows[r][j].abs() > PIVOT_TOL) {
                    t.pivot(r, c);
                }
            }
        }
    }

    let mut costs = vec![0.0; width];
    for (j, c) in lp.objective.iter().enumerate() {
        costs[j] = match lp.sense {
            Direction::Max => *c,
            Direction::Min => -c,
        };
    }
    t.set_objective(&costs);
    t.optimize(n + m)?;

    let mut x = lp.lower.clone();
    for r in 0..m {
        let b = t.basis[r];
        if b < n {
            x[b] += t.rhs(r).max(0.0);
        }
    }
    for j in 0..n {
        if x[j] > lp.upper[j] {
            x[j] = lp.upper[j];
        }
    }
    let value = dot(&lp.objective, &x);
    Ok(LpSolution { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(obj: Vec<f64>, cons: Vec<(Vec<f64>, f64)>, lo: Vec<f64>, hi: Vec<f64>, sense: Direction) -> LinearProgram {
        LinearProgram {
            objective: obj,
            constraints: cons.into_iter().map(|(normal, rhs)| Constraint { normal, rhs }).collect(),
            lower: lo,
            upper: hi,
            sense,
        }
    }

    #[test]
    fn box_corner() {
        let p = lp(vec![1.0, 1.0], vec![], vec![0.0; 2], vec![1.0; 2], Direction::Max);
        let s = lp_optimize(&p).unwrap();
        assert_eq!(s.x, vec![1.0, 1.0]);
        assert_eq!(s.value, 2.0);
    }

    #[test]
    fn single_constraint() {
        let inf = f64::INFINITY;
        let p = lp(vec![2.0, 1.0], vec![(vec![1.0, 1.0], 1.0)], vec![0.0; 2], vec![inf; 2], Direction::Max);
        let s = lp_optimize(&p).unwrap();
        assert_eq!(s.x, vec![1.0, 0.0]);
        assert_eq!(s.value, 2.0);
    }

    #[test]
    fn minimization_needs_phase_one() {
        // min x + y s.t. x + y >= 1 (written as -x - y <= -1), 0 <= x, y <= 1.
        let p = lp(vec![1.0, 2.0], vec![(vec![-1.0, -1.0], -1.0)], vec![0.0; 2], vec![1.0; 2], Direction::Min);
        let s = lp_optimize(&p).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && s.x[1].abs() < 1e-12);
    }

    #[test]
    fn shifted_lower_bounds() {
        let p = lp(vec![-1.0, 1.0], vec![(vec![1.0, 1.0], 5.0)], vec![1.0, 2.0], vec![3.0, 10.0], Direction::Max);
        let s = lp_optimize(&p).unwrap();
        assert_eq!(s.x, vec![1.0, 4.0]);
        assert_eq!(s.value, 3.0);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let inf = f64::INFINITY;
        let p = lp(vec![1.0], vec![(vec![1.0], -1.0)], vec![0.0], vec![inf], Direction::Max);
        assert!(matches!(lp_optimize(&p), Err(Error::LpInfeasible)));
        let p = lp(vec![1.0], vec![], vec![0.0], vec![inf], Direction::Max);
        assert!(matches!(lp_optimize(&p), Err(Error::LpUnbounded)));
        let p = lp(vec![1.0], vec![], vec![0.0], vec![inf], Direction::Min);
        assert_eq!(lp_optimize(&p).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_malformed_input() {
        let p = lp(vec![1.0], vec![], vec![2.0], vec![1.0], Direction::Max);
        assert!(lp_optimize(&p).is_err());
        let p = lp(vec![1.0], vec![(vec![1.0, 2.0], 1.0)], vec![0.0], vec![1.0], Direction::Max);
        assert!(lp_optimize(&p).is_err());
    }
}
