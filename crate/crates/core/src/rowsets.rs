//! Row uncertainty sets and the product families built from them.
//!
//! Every set answers one question exactly: which of its rows maximizes (or
//! minimizes) the scalar product with a given non-negative vector. Ties are
//! always broken toward the lowest index so that iterations are reproducible.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, NonNegativeMatrix};
use crate::lp::{lp_optimize, Constraint, LinearProgram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

impl Direction {
    /// Whether `candidate` beats `incumbent` by more than `delta`.
    pub fn improves(self, candidate: f64, incumbent: f64, delta: f64) -> bool {
        match self {
            Direction::Max => candidate - incumbent > delta,
            Direction::Min => incumbent - candidate > delta,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::Max => Direction::Min,
            Direction::Min => Direction::Max,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Max => "max",
            Direction::Min => "min",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Direction::Max),
            "min" => Ok(Direction::Min),
            other => Err(Error::InvalidConfig(format!("unknown direction {other:?}"))),
        }
    }
}

/// Whether a graph row may have at most or at least `n` ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeSense {
    AtMost,
    AtLeast,
}

/// One uncertainty set `F_i` of admissible rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RowSet {
    /// An explicit list of rows.
    Finite { rows: Vec<Vec<f64>> },
    /// Rows `x` with `0 <= x_j <= 1` and `sum x_j <= n` (or `>= n`).
    #[serde(rename = "graph")]
    GraphDegree { n: usize, sense: DegreeSense },
    /// `{x >= 0 : ||x - center||_1 <= radius}`.
    L1Ball { center: Vec<f64>, radius: f64 },
    /// `{x : 0 <= x <= 1, (x, b_j) <= 1 for every normal b_j}`.
    #[serde(rename = "poly")]
    HalfspacePoly { normals: Vec<Vec<f64>> },
    /// Axis-aligned ellipsoid `{center + radius * diag(axes) u : ||u||_2 <= 1}`.
    Ellipsoid { center: Vec<f64>, radius: f64, axes: Vec<f64> },
    /// `{scale * x + offset : x in base}`.
    Affine { base: Box<RowSet>, scale: f64, offset: Vec<f64> },
}

fn check_row(row: &[f64], d: usize, what: &str) -> Result<()> {
    if row.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: row.len() });
    }
    if row.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidRowSet(format!("{what} must be finite and non-negative")));
    }
    Ok(())
}

impl RowSet {
    pub fn finite(rows: Vec<Vec<f64>>) -> Self {
        RowSet::Finite { rows }
    }

    pub fn graph(n: usize, sense: DegreeSense) -> Self {
        RowSet::GraphDegree { n, sense }
    }

    pub fn l1_ball(center: Vec<f64>, radius: f64) -> Self {
        RowSet::L1Ball { center, radius }
    }

    pub fn poly(normals: Vec<Vec<f64>>) -> Self {
        RowSet::HalfspacePoly { normals }
    }

    pub fn ellipsoid(center: Vec<f64>, radius: f64, axes: Vec<f64>) -> Self {
        RowSet::Ellipsoid { center, radius, axes }
    }

    /// Number of rows of a finite set; `None` for continuous sets.
    pub fn len(&self) -> Option<usize> {
        match self {
            RowSet::Finite { rows } => Some(rows.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            RowSet::Finite { rows } => {
                if rows.is_empty() {
                    return Err(Error::InvalidRowSet("finite set has no rows".into()));
                }
                rows.iter().try_for_each(|r| check_row(r, d, "finite rows"))
            }
            RowSet::GraphDegree { n, .. } => {
                if *n == 0 || *n > d {
                    return Err(Error::InvalidRowSet(format!("degree {n} outside 1..={d}")));
                }
                Ok(())
            }
            RowSet::L1Ball { center, radius } => {
                check_row(center, d, "ball center")?;
                if !radius.is_finite() || *radius < 0.0 {
                    return Err(Error::InvalidRowSet(format!("ball radius {radius} is invalid")));
                }
                Ok(())
            }
            RowSet::HalfspacePoly { normals } => {
                normals.iter().try_for_each(|b| check_row(b, d, "constraint normals"))
            }
            RowSet::Ellipsoid { center, radius, axes } => {
                check_row(center, d, "ellipsoid center")?;
                check_row(axes, d, "ellipsoid axes")?;
                if !radius.is_finite() || *radius <= 0.0 {
                    return Err(Error::InvalidRowSet(format!("ellipsoid radius {radius} is invalid")));
                }
                if axes.iter().any(|a| *a <= 0.0) {
                    return Err(Error::InvalidRowSet("ellipsoid axes must be positive".into()));
                }
                if center.iter().zip(axes).any(|(c, a)| c - radius * a <= 0.0) {
                    return Err(Error::InvalidRowSet(
                        "ellipsoid must lie in the open positive orthant".into(),
                    ));
                }
                Ok(())
            }
            RowSet::Affine { base, scale, offset } => {
                base.validate(d)?;
                check_row(offset, d, "affine offset")?;
                if !scale.is_finite() || *scale <= 0.0 {
                    return Err(Error::InvalidRowSet(format!("affine scale {scale} must be positive")));
                }
                Ok(())
            }
        }
    }

    /// Image of the set under `x -> (1 - alpha) x + alpha p`.
    fn blended(&self, alpha: f64, p: &[f64]) -> RowSet {
        let blend = |r: &[f64]| -> Vec<f64> {
            r.iter().zip(p).map(|(x, pj)| (1.0 - alpha) * x + alpha * pj).collect()
        };
        match self {
            RowSet::Finite { rows } => RowSet::Finite { rows: rows.iter().map(|r| blend(r)).collect() },
            other => RowSet::Affine {
                base: Box::new(other.clone()),
                scale: 1.0 - alpha,
                offset: p.iter().map(|pj| alpha * pj).collect(),
            },
        }
    }
}

/// Exact optimizer of `(a, v)` over `a` in `set`.
///
/// `v` must be non-negative and nonzero. Its length is taken as the ambient
/// dimension.
pub fn best_row(set: &RowSet, v: &[f64], direction: Direction) -> Result<Vec<f64>> {
    if v.iter().all(|x| *x == 0.0) {
        return Err(Error::DegenerateObjective);
    }
    if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidConfig("objective vector must be finite and non-negative".into()));
    }
    best_row_unchecked(set, v, direction)
}

fn best_row_unchecked(set: &RowSet, v: &[f64], direction: Direction) -> Result<Vec<f64>> {
    let d = v.len();
    match set {
        RowSet::Finite { rows } => {
            let mut best = 0;
            let mut best_val = dot(&rows[0], v);
            for (k, r) in rows.iter().enumerate().skip(1) {
                let val = dot(r, v);
                if direction.improves(val, best_val, 0.0) {
                    best = k;
                    best_val = val;
                }
            }
            Ok(rows[best].clone())
        }
        RowSet::GraphDegree { n, sense } => Ok(graph_row(*n, *sense, v, direction)),
        RowSet::L1Ball { center, radius } => Ok(l1_ball_row(center, *radius, v, direction)),
        RowSet::HalfspacePoly { normals } => {
            let lp = LinearProgram {
                objective: v.to_vec(),
                constraints: normals
                    .iter()
                    .map(|b| Constraint { normal: b.clone(), rhs: 1.0 })
                    .collect(),
                lower: vec![0.0; d],
                upper: vec![1.0; d],
                sense: direction,
            };
            let sol = lp_optimize(&lp)?;
            Ok(sol.x.into_iter().map(|x| x.clamp(0.0, 1.0)).collect())
        }
        RowSet::Ellipsoid { center, radius, axes } => {
            let dv: Vec<f64> = axes.iter().zip(v).map(|(a, vj)| a * vj).collect();
            let norm = norm2(&dv);
            let sign = match direction {
                Direction::Max => 1.0,
                Direction::Min => -1.0,
            };
            Ok(center
                .iter()
                .zip(axes.iter().zip(&dv))
                .map(|(c, (a, w))| (c + sign * radius * a * w / norm).max(0.0))
                .collect())
        }
        RowSet::Affine { base, scale, offset } => {
            let inner = best_row_unchecked(base, v, direction)?;
            Ok(inner.iter().zip(offset).map(|(x, o)| scale * x + o).collect())
        }
    }
}

/// Indices sorted by `v` (descending for `largest`), ties by lowest index.
fn ranked(v: &[f64], largest: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    if largest {
        idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    } else {
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    }
    idx
}

fn graph_row(n: usize, sense: DegreeSense, v: &[f64], direction: Direction) -> Vec<f64> {
    let d = v.len();
    let mut row = vec![0.0; d];
    match (sense, direction) {
        (DegreeSense::AtMost, Direction::Max) => ranked(v, true)[..n].iter().for_each(|&j| row[j] = 1.0),
        (DegreeSense::AtLeast, Direction::Min) => ranked(v, false)[..n].iter().for_each(|&j| row[j] = 1.0),
        (DegreeSense::AtLeast, Direction::Max) => row.fill(1.0),
        (DegreeSense::AtMost, Direction::Min) => {}
    }
    row
}

/// Maximization puts the whole budget on the largest weight. Minimization
/// lowers coordinates in order of decreasing weight: raising a coordinate
/// never helps since `v >= 0`, and spending on `v_j = 0` changes nothing.
fn l1_ball_row(center: &[f64], radius: f64, v: &[f64], direction: Direction) -> Vec<f64> {
    let mut row = center.to_vec();
    match direction {
        Direction::Max => {
            let j = ranked(v, true)[0];
            row[j] += radius;
        }
        Direction::Min => {
            let mut budget = radius;
            for j in ranked(v, true) {
                if budget <= 0.0 || v[j] == 0.0 {
                    break;
                }
                let cut = row[j].min(budget);
                row[j] -= cut;
                budget -= cut;
            }
        }
    }
    row
}

/// Product of `d` row sets; matrix row `i` is drawn from `sets[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct ProductFamily {
    d: usize,
    sets: Vec<RowSet>,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    d: usize,
    sets: Vec<RowSet>,
}

impl TryFrom<FamilyRepr> for ProductFamily {
    type Error = Error;

    fn try_from(repr: FamilyRepr) -> Result<Self> {
        if repr.sets.len() != repr.d {
            return Err(Error::DimensionMismatch { expected: repr.d, found: repr.sets.len() });
        }
        Self::new(repr.sets)
    }
}

impl From<ProductFamily> for FamilyRepr {
    fn from(f: ProductFamily) -> Self {
        FamilyRepr { d: f.d, sets: f.sets }
    }
}

impl ProductFamily {
    /// The dimension is the number of sets.
    pub fn new(sets: Vec<RowSet>) -> Result<Self> {
        let d = sets.len();
        if d == 0 {
            return Err(Error::InvalidRowSet("a family needs at least one set".into()));
        }
        for s in &sets {
            s.validate(d)?;
        }
        Ok(Self { d, sets })
    }

    /// Family containing the single matrix `a`.
    pub fn singleton(a: &NonNegativeMatrix) -> Self {
        Self { d: a.dim(), sets: a.rows().map(|r| RowSet::finite(vec![r.to_vec()])).collect() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn sets(&self) -> &[RowSet] {
        &self.sets
    }

    pub fn is_all_finite(&self) -> bool {
        self.sets.iter().all(|s| matches!(s, RowSet::Finite { .. }))
    }

    /// Set sizes when every set is finite.
    pub fn sizes(&self) -> Option<Vec<usize>> {
        self.sets.iter().map(RowSet::len).collect()
    }

    pub fn best_rows(&self, v: &[f64], direction: Direction) -> Result<Vec<Vec<f64>>> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: v.len() });
        }
        self.sets.iter().map(|s| best_row(s, v, direction)).collect()
    }

    /// Matrix of best rows against `v`.
    pub fn best_matrix(&self, v: &[f64], direction: Direction) -> Result<NonNegativeMatrix> {
        NonNegativeMatrix::from_rows(self.best_rows(v, direction)?)
    }

    /// Family with every set mapped through `x -> (1 - alpha) x + alpha p_i`,
    /// where `p_i` is row `i` of the cyclic permutation matrix (a one in
    /// column `i + 1 mod d`). The support graph of every member then contains
    /// the full cycle and is strongly connected.
    pub fn perturbed(&self, alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidConfig(format!("perturbation weight {alpha} outside [0, 1)")));
        }
        if alpha == 0.0 {
            return Ok(self.clone());
        }
        let d = self.d;
        let sets = self
            .sets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut p = vec![0.0; d];
                p[(i + 1) % d] = 1.0;
                s.blended(alpha, &p)
            })
            .collect();
        Ok(Self { d, sets })
    }

    /// Whether `a` has dimension `d` and each of its rows lies in the
    /// matching set, up to `tol`. Exact for finite sets; continuous sets are
    /// checked through their defining inequalities.
    pub fn contains(&self, a: &NonNegativeMatrix, tol: f64) -> bool {
        a.dim() == self.d && self.sets.iter().zip(a.rows()).all(|(s, r)| set_contains(s, r, tol))
    }
}

fn set_contains(set: &RowSet, r: &[f64], tol: f64) -> bool {
    let nonneg = r.iter().all(|x| *x >= -tol);
    match set {
        RowSet::Finite { rows } => rows
            .iter()
            .any(|b| b.iter().zip(r).all(|(x, y)| (x - y).abs() <= tol)),
        RowSet::GraphDegree { n, sense } => {
            let sum: f64 = r.iter().sum();
            let n = *n as f64;
            nonneg
                && r.iter().all(|x| *x <= 1.0 + tol)
                && match sense {
                    DegreeSense::AtMost => sum <= n + tol,
                    DegreeSense::AtLeast => sum >= n - tol,
                }
        }
        RowSet::L1Ball { center, radius } => {
            nonneg && r.iter().zip(center).map(|(x, c)| (x - c).abs()).sum::<f64>() <= radius + tol
        }
        RowSet::HalfspacePoly { normals } => {
            nonneg
                && r.iter().all(|x| *x <= 1.0 + tol)
                && normals.iter().all(|b| dot(b, r) <= 1.0 + tol)
        }
        RowSet::Ellipsoid { center, radius, axes } => {
            let q: f64 = r
                .iter()
                .zip(center.iter().zip(axes))
                .map(|(x, (c, a))| ((x - c) / (radius * a)).powi(2))
                .sum();
            q <= 1.0 + tol
        }
        RowSet::Affine { base, scale, offset } => {
            let inner: Vec<f64> = r.iter().zip(offset).map(|(x, o)| (x - o) / scale).collect();
            set_contains(base, &inner, tol / scale)
        }
    }
}
