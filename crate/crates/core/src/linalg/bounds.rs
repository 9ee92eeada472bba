use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{dot, NonNegativeMatrix};
use crate::error::{Error, Result};
use crate::rowsets::{Direction, ProductFamily};

/// A real number or `+inf`. Serialized as a JSON number, or as the string
/// `"inf"` when infinite.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Bound(f64);

impl Bound {
    pub const INFINITY: Bound = Bound(f64::INFINITY);

    /// Panics on NaN or `-inf`.
    pub fn new(x: f64) -> Self {
        assert!(!x.is_nan() && x != f64::NEG_INFINITY, "invalid bound {x}");
        Bound(x)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 { other } else { self }
    }

    pub fn min(self, other: Self) -> Self {
        if other.0 < self.0 { other } else { self }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl From<f64> for Bound {
    fn from(x: f64) -> Self {
        Bound::new(x)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct BoundVisitor;

        impl Visitor<'_> for BoundVisitor {
            type Value = Bound;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, x: f64) -> std::result::Result<Bound, E> {
                if x.is_nan() || x == f64::NEG_INFINITY {
                    return Err(E::custom("bound must not be NaN or -inf"));
                }
                Ok(Bound(x))
            }

            fn visit_i64<E: de::Error>(self, x: i64) -> std::result::Result<Bound, E> {
                Ok(Bound(x as f64))
            }

            fn visit_u64<E: de::Error>(self, x: u64) -> std::result::Result<Bound, E> {
                Ok(Bound(x as f64))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Bound, E> {
                match s {
                    "inf" | "+inf" | "Infinity" => Ok(Bound::INFINITY),
                    _ => s.parse::<f64>().map_err(E::custom).and_then(|x| self.visit_f64(x)),
                }
            }
        }

        d.deserialize_any(BoundVisitor)
    }
}

/// Row ratio `(b, v) / v_i`, or `+inf` when `v_i <= zero_tol`.
pub(crate) fn row_ratio(b: &[f64], v: &[f64], i: usize, zero_tol: f64) -> Bound {
    if v[i] <= zero_tol {
        Bound::INFINITY
    } else {
        Bound(dot(b, v) / v[i])
    }
}

/// Per-row ratios `s_i` (max) or `t_i` (min) for the given eigenvector.
pub(crate) fn row_ratios(
    family: &ProductFamily,
    v: &[f64],
    direction: Direction,
    zero_tol: f64,
) -> Result<Vec<Bound>> {
    let best = family.best_rows(v, direction)?;
    Ok(best.iter().enumerate().map(|(i, b)| row_ratio(b, v, i, zero_tol)).collect())
}

fn check_dims(a: &NonNegativeMatrix, v: &[f64], family: &ProductFamily) -> Result<()> {
    if family.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: family.dim() });
    }
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: v.len() });
    }
    Ok(())
}

/// `s(A) = max_i max_{b in F_i} (b, v) / v_i`.
///
/// Components with `v_i <= zero_tol` contribute `+inf`. For a leading
/// eigenvector `v` of `A` in the family, `rho(A) <= rho_max <= s(A)`.
pub fn upper_bound_s(
    a: &NonNegativeMatrix,
    v: &[f64],
    family: &ProductFamily,
    zero_tol: f64,
) -> Result<Bound> {
    check_dims(a, v, family)?;
    Ok(row_ratios(family, v, Direction::Max, zero_tol)?
        .into_iter()
        .fold(Bound(f64::NEG_INFINITY), Bound::max))
}

/// `t(A) = min_i min_{b in F_i} (b, v) / v_i`, the lower counterpart of
/// [`upper_bound_s`]: `t(A) <= rho_min <= rho(A)`.
pub fn lower_bound_t(
    a: &NonNegativeMatrix,
    v: &[f64],
    family: &ProductFamily,
    zero_tol: f64,
) -> Result<Bound> {
    check_dims(a, v, family)?;
    Ok(row_ratios(family, v, Direction::Min, zero_tol)?
        .into_iter()
        .fold(Bound::INFINITY, Bound::min))
}
