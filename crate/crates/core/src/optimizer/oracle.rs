use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, NonNegativeMatrix, PowerConfig};
use crate::rowsets::{Direction, ProductFamily, RowSet};

const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Exhaustive optimum over a family of finite sets.
///
/// Matrices are visited in lexicographic order of their row indices and the
/// first one attaining the optimum is returned. Spectral radii come from
/// [`spectral_radius`] with tolerance `1e-12`.
pub fn brute_force_optimum(family: &ProductFamily, direction: Direction) -> Result<(NonNegativeMatrix, f64)> {
    let sets: Vec<&Vec<Vec<f64>>> = family
        .sets()
        .iter()
        .map(|s| match s {
            RowSet::Finite { rows } => Ok(rows),
            _ => Err(Error::InvalidRowSet("enumeration needs finite sets".into())),
        })
        .collect::<Result<_>>()?;
    let size = sets.iter().try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128));
    match size {
        Some(n) if n <= ENUMERATION_LIMIT => {}
        other => {
            return Err(Error::TooLarge { size: other.unwrap_or(u128::MAX), limit: ENUMERATION_LIMIT })
        }
    }

    let d = family.dim();
    let cfg = PowerConfig { eps: 1e-12, max_iters: Some(20 * PowerConfig::default().max_iters_for(d)) };
    let mut idx = vec![0usize; d];
    let mut entries: Vec<f64> = sets.iter().flat_map(|s| s[0].iter().copied()).collect();
    let mut best: Option<(NonNegativeMatrix, f64)> = None;
    loop {
        let a = NonNegativeMatrix::new(d, entries.clone())?;
        let rho = spectral_radius(&a, &cfg)?;
        if best.as_ref().is_none_or(|(_, b)| direction.improves(rho, *b, 0.0)) {
            best = Some((a, rho));
        }
        // Odometer with the last row varying fastest.
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(best.expect("at least one matrix"));
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < sets[i].len() {
                entries[i * d..(i + 1) * d].copy_from_slice(&sets[i][idx[i]]);
                break;
            }
            idx[i] = 0;
            entries[i * d..(i + 1) * d].copy_from_slice(&sets[i][0]);
        }
    }
}
