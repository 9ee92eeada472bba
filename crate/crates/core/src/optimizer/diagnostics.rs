//! Convergence-rate diagnostics.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::rowsets::{ProductFamily, RowSet};

/// Linear convergence factor `q = 1 - m^2 / (m^2 + (d - 1) M^2)` for families
/// whose entries all lie in `[m, M]` with `m > 0`.
///
/// `m` and `M` are exact for finite sets. For continuous sets they come from
/// an enclosing box, which can only make `q` larger. Sets that contain rows
/// with zero entries are rejected.
pub fn linear_rate_bound(family: &ProductFamily) -> Result<f64> {
    let d = family.dim();
    let (mut m, mut big_m) = (f64::INFINITY, 0.0f64);
    for (i, set) in family.sets().iter().enumerate() {
        let (lo, hi) = entry_range(set)?;
        if !(lo > 0.0) {
            return Err(Error::NonPositiveEntry(format!("set {i} has entries down to {lo}")));
        }
        m = m.min(lo);
        big_m = big_m.max(hi);
    }
    let (m2, big_m2) = (m * m, big_m * big_m);
    Ok(1.0 - m2 / (m2 + (d as f64 - 1.0) * big_m2))
}

fn entry_range(set: &RowSet) -> Result<(f64, f64)> {
    let fold = |it: &mut dyn Iterator<Item = f64>| {
        it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    Ok(match set {
        RowSet::Finite { rows } => fold(&mut rows.iter().flatten().copied()),
        RowSet::GraphDegree { .. } | RowSet::HalfspacePoly { .. } => (0.0, 1.0),
        RowSet::L1Ball { center, radius } => {
            let (lo, hi) = fold(&mut center.iter().copied());
            ((lo - radius).max(0.0), hi + radius)
        }
        RowSet::Ellipsoid { center, radius, axes } => {
            let lo = fold(&mut center.iter().zip(axes).map(|(c, a)| c - radius * a)).0;
            let hi = fold(&mut center.iter().zip(axes).map(|(c, a)| c + radius * a)).1;
            (lo, hi)
        }
        RowSet::Affine { base, scale, offset } => {
            let (lo, hi) = entry_range(base)?;
            let (olo, ohi) = fold(&mut offset.iter().copied());
            (scale * lo + olo, scale * hi + ohi)
        }
    })
}

/// Per-iteration contraction `1 - max_j u_j v_j / (u, v)` of the distance to
/// the optimum, from the next left eigenvector `u` and the current right
/// eigenvector `v`.
pub fn contraction_factor(u_next: &[f64], v: &[f64]) -> Result<f64> {
    if u_next.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: v.len(), found: u_next.len() });
    }
    let uv = dot(u_next, v);
    if !(uv > 0.0) {
        return Err(Error::DegenerateEigenpair);
    }
    let peak = u_next.iter().zip(v).map(|(a, b)| a * b).fold(0.0, f64::max);
    Ok((1.0 - peak / uv).max(0.0))
}
