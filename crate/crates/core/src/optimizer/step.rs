use crate::error::{Error, Result};
use crate::linalg::{dot, NonNegativeMatrix};
use crate::rowsets::{Direction, ProductFamily};

/// Rows whose best replacement improves `(a_i, v)` by more than `delta` in
/// the given direction.
pub(crate) fn improvable_rows(
    a: &NonNegativeMatrix,
    v: &[f64],
    candidates: &[Vec<f64>],
    direction: Direction,
    delta: f64,
) -> Vec<usize> {
    candidates
        .iter()
        .enumerate()
        .filter(|(i, b)| direction.improves(dot(b, v), dot(a.row(*i), v), delta))
        .map(|(i, _)| i)
        .collect()
}

/// One greedy step: every row that can be improved by at least `delta` is
/// replaced by its best row against `v`. Returns the new matrix and the
/// replaced row indices.
pub fn greedy_step(
    a: &NonNegativeMatrix,
    v: &[f64],
    family: &ProductFamily,
    direction: Direction,
    delta: f64,
) -> Result<(NonNegativeMatrix, Vec<usize>)> {
    if a.dim() != family.dim() {
        return Err(Error::DimensionMismatch { expected: family.dim(), found: a.dim() });
    }
    let candidates = family.best_rows(v, direction)?;
    let changed = improvable_rows(a, v, &candidates, direction, delta);
    let mut next = a.clone();
    for &i in &changed {
        next.set_row(i, &candidates[i])?;
    }
    Ok((next, changed))
}
