use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::linalg::NonNegativeMatrix;
use crate::rowsets::Direction;

const QUANTUM: f64 = 1e-12;

/// Identity of an iterate: one hash per row, of the row content rounded to
/// multiples of `1e-12`, together with the iterate's spectral radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterateSignature {
    pub key: Vec<u64>,
    pub rho: f64,
}

impl IterateSignature {
    pub fn of(a: &NonNegativeMatrix, rho: f64) -> Self {
        let key = a
            .rows()
            .map(|row| {
                let mut h = DefaultHasher::new();
                for x in row {
                    ((x / QUANTUM).round() as i64).hash(&mut h);
                }
                h.finish()
            })
            .collect();
        Self { key, rho }
    }
}

/// True iff the last signature repeats an earlier one and no iterate in
/// between improved on that earlier value by more than `delta`.
pub fn detect_cycle(history: &[IterateSignature], direction: Direction, delta: f64) -> bool {
    let Some((last, earlier)) = history.split_last() else {
        return false;
    };
    earlier.iter().enumerate().any(|(j, sig)| {
        sig.key == last.key
            && !history[j + 1..].iter().any(|h| direction.improves(h.rho, sig.rho, delta))
    })
}
