//! Dense non-negative matrices, the selected leading eigenpair and the
//! a-posteriori spectral radius bounds.

mod bounds;
mod power;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounds::{lower_bound_t, upper_bound_s, Bound};
pub(crate) use bounds::row_ratio;
pub use power::{
    left_eigenvector, power_eigenpair_from, ratio_estimate, selected_eigenpair, spectral_radius,
    Eigenpair, PowerConfig,
};

/// Threshold below which an eigenvector component counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Square matrix with non-negative entries, stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct NonNegativeMatrix {
    dim: usize,
    entries: Vec<f64>,
}

/// On-disk shape: `{"d": int, "rows": [[...]]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    d: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for NonNegativeMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.rows.len() != repr.d {
            return Err(Error::DimensionMismatch { expected: repr.d, found: repr.rows.len() });
        }
        Self::from_rows(repr.rows)
    }
}

impl From<NonNegativeMatrix> for MatrixRepr {
    fn from(m: NonNegativeMatrix) -> Self {
        MatrixRepr { d: m.dim, rows: m.to_rows() }
    }
}

impl NonNegativeMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        if let Some(pos) = entries.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) = {} is not a finite non-negative number",
                pos / dim,
                pos % dim,
                entries[pos]
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        Self { dim, entries: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Replaces row `i`. Negative entries are rejected.
    pub fn set_row(&mut self, i: usize, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: row.len() });
        }
        if row.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidMatrix(format!("row {i} has a negative or non-finite entry")));
        }
        self.entries[i * self.dim..(i + 1) * self.dim].copy_from_slice(row);
        Ok(())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (o, row) in out.iter_mut().zip(self.rows()) {
            *o = dot(row, x);
        }
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j];
            }
        }
        Self { dim: d, entries }
    }

    /// `A + c I` for `c >= 0`.
    pub fn shifted(&self, c: f64) -> Self {
        assert!(c >= 0.0);
        let mut m = self.clone();
        for i in 0..self.dim {
            m.entries[i * self.dim + i] += c;
        }
        m
    }

    /// Operator norm induced by the max norm: the largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.rows().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max)
    }

    /// `||self - other||_inf` as an operator norm.
    pub fn inf_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.rows()
            .zip(other.rows())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Whether the support graph (edge `i -> j` iff `a_ij > 0`) is strongly
    /// connected.
    pub fn is_irreducible(&self) -> bool {
        let d = self.dim;
        let reach_all = |transposed: bool| {
            let mut seen = vec![false; d];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for j in 0..d {
                    let w = if transposed { self.get(j, i) } else { self.get(i, j) };
                    if w > 0.0 && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach_all(false) && reach_all(true)
    }

    /// Strongly connected components of the support graph, each sorted.
    pub fn strong_components(&self) -> Vec<Vec<usize>> {
        let d = self.dim;
        let edge = |i: usize, j: usize, transposed: bool| {
            if transposed { self.get(j, i) > 0.0 } else { self.get(i, j) > 0.0 }
        };
        // Kosaraju: finishing order on the graph, then sweeps of the
        // transposed graph in reverse finishing order.
        let mut order = Vec::with_capacity(d);
        let mut seen = vec![false; d];
        for root in 0..d {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![(root, 0usize)];
            while let Some((i, next)) = stack.last_mut() {
                let i = *i;
                match (*next..d).find(|&j| !seen[j] && edge(i, j, false)) {
                    Some(j) => {
                        *next = j + 1;
                        seen[j] = true;
                        stack.push((j, 0));
                    }
                    None => {
                        order.push(i);
                        stack.pop();
                    }
                }
            }
        }
        let mut comp = vec![usize::MAX; d];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for &root in order.iter().rev() {
            if comp[root] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[root] = id;
            let mut members = vec![root];
            let mut stack = vec![root];
            while let Some(i) = stack.pop() {
                for j in 0..d {
                    if comp[j] == usize::MAX && edge(i, j, true) {
                        comp[j] = id;
                        members.push(j);
                        stack.push(j);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Whether the support graph is acyclic, i.e. whether the matrix is
    /// nilpotent.
    pub fn is_nilpotent(&self) -> bool {
        let d = self.dim;
        let mut indegree = vec![0usize; d];
        for i in 0..d {
            for j in 0..d {
                if self.get(i, j) > 0.0 {
                    indegree[j] += 1;
                }
            }
        }
        let mut queue: Vec<usize> = (0..d).filter(|&j| indegree[j] == 0).collect();
        let mut removed = 0;
        while let Some(i) = queue.pop() {
            removed += 1;
            for j in 0..d {
                if self.get(i, j) > 0.0 {
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        queue.push(j);
                    }
                }
            }
        }
        removed == d
    }
}

impl fmt::Debug for NonNegativeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for NonNegativeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_ragged_input() {
        assert!(NonNegativeMatrix::from_rows(vec![vec![1.0, -1.0], vec![0.0, 0.0]]).is_err());
        assert!(NonNegativeMatrix::from_rows(vec![vec![1.0], vec![0.0, 0.0]]).is_err());
        assert!(NonNegativeMatrix::new(0, vec![]).is_err());
        assert!(NonNegativeMatrix::new(1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn irreducibility_and_nilpotency() {
        let cycle = NonNegativeMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(cycle.is_irreducible());
        assert!(!cycle.is_nilpotent());

        let upper = NonNegativeMatrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(!upper.is_irreducible());
        assert!(upper.is_nilpotent());

        assert!(!NonNegativeMatrix::identity(3).is_nilpotent());
        assert!(NonNegativeMatrix::identity(1).is_irreducible());
    }

    #[test]
    fn strong_components() {
        // 0 <-> 2 form a cycle, 1 only feeds into it, 3 is isolated.
        let m = NonNegativeMatrix::from_rows(vec![
            vec![0.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let mut comps = m.strong_components();
        comps.sort();
        assert_eq!(comps, vec![vec![0, 2], vec![1], vec![3]]);
        let cycle = NonNegativeMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(cycle.strong_components(), vec![vec![0, 1]]);
    }

    #[test]
    fn norms() {
        let a = NonNegativeMatrix::from_rows(vec![vec![1.0, 2.0], vec![0.5, 0.0]]).unwrap();
        assert_eq!(a.inf_norm(), 3.0);
        assert_eq!(a.inf_distance(&NonNegativeMatrix::zeros(2)), 3.0);
        assert_eq!(a.transpose().get(0, 1), 0.5);
        assert_eq!(a.shifted(1.0).get(1, 1), 1.0);
    }

    #[test]
    fn json_shape() {
        let a = NonNegativeMatrix::from_rows(vec![vec![1.0, 2.0], vec![0.5, 0.0]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"d":2,"rows":[[1.0,2.0],[0.5,0.0]]}"#);
        let back: NonNegativeMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<NonNegativeMatrix>(r#"{"d":3,"rows":[[1]]}"#).is_err());
    }
}
