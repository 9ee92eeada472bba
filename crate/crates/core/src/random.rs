//! Seeded random families.
//!
//! The generator is xorshift64* (Vigna): `x ^= x >> 12; x ^= x << 25;
//! x ^= x >> 27`, output `x * 0x2545F4914F6CDD1D`. The seed is scrambled by
//! one splitmix64 step so that small seeds give unrelated streams. Uniform
//! draws on `(0, 1]` use the top 53 bits: `((x >> 11) + 1) * 2^-53`. These
//! definitions are fixed so that families are reproducible in any language.

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::rowsets::{ProductFamily, RowSet};

#[derive(Clone, Debug)]
pub struct XorShift64Star {
    state: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        Self { state: if s == 0 { 0x9E37_79B9_7F4A_7C15 } else { s } }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform on `(0, 1]`.
    pub fn next_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(lo, hi]`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyMode {
    /// Every entry uniform on `(0, 1]`.
    Positive,
    /// Entry nonzero with probability `gamma_i`, drawn once per set.
    Sparse,
}

fn check_shape(d: usize, n: usize) -> Result<()> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidConfig(format!("need d >= 1 and N >= 1, got d = {d}, N = {n}")));
    }
    Ok(())
}

/// `d` finite sets of `n` rows each.
///
/// In sparse mode each set draws its density `gamma_i` uniformly from
/// `density`; then, row by row and entry by entry, a uniform `u` makes the
/// entry nonzero when `u <= gamma_i`, and a second draw gives its magnitude
/// on `(0, 1]`. A row left all zero gets a magnitude in entry 0. The
/// interval `(1, 1)` is the positive mode.
pub fn generate_random_family(
    d: usize,
    n: usize,
    density: (f64, f64),
    seed: u64,
    mode: FamilyMode,
) -> Result<ProductFamily> {
    check_shape(d, n)?;
    let (lo, hi) = density;
    if mode == FamilyMode::Sparse && !(0.0 < lo && lo <= hi && hi <= 1.0) {
        return Err(Error::InvalidConfig(format!("density interval ({lo}, {hi}) must satisfy 0 < lo <= hi <= 1")));
    }
    let positive = mode == FamilyMode::Positive || (lo == 1.0 && hi == 1.0);
    let mut rng = XorShift64Star::new(seed);
    let sets = (0..d)
        .map(|_| {
            let gamma = if positive { 1.0 } else { rng.uniform(lo, hi) };
            let rows = (0..n)
                .map(|_| {
                    if positive {
                        return (0..d).map(|_| rng.next_unit()).collect();
                    }
                    let mut row: Vec<f64> = (0..d)
                        .map(|_| if rng.next_unit() <= gamma { rng.next_unit() } else { 0.0 })
                        .collect();
                    if row.iter().all(|x| *x == 0.0) {
                        row[0] = rng.next_unit();
                    }
                    row
                })
                .collect();
            RowSet::finite(rows)
        })
        .collect();
    ProductFamily::new(sets)
}

/// `d` polyhedral sets `{0 <= x <= 1, (x, b_j) <= 1}` with `n` normals each,
/// drawn uniform on `(0, 1]^d` and scaled to unit Euclidean norm.
pub fn generate_polyhedral_family(d: usize, n: usize, seed: u64) -> Result<ProductFamily> {
    check_shape(d, n)?;
    let mut rng = XorShift64Star::new(seed);
    let sets = (0..d)
        .map(|_| {
            let normals = (0..n)
                .map(|_| {
                    let b: Vec<f64> = (0..d).map(|_| rng.next_unit()).collect();
                    let norm = norm2(&b);
                    b.into_iter().map(|x| x / norm).collect()
                })
                .collect();
            RowSet::poly(normals)
        })
        .collect();
    ProductFamily::new(sets)
}

/// `d` axis-aligned ellipsoids with centers uniform on `(1, 2]^d`, semi-axis
/// scales uniform on `(0.5, 1]` and radius `0.5`, so every member is a
/// positive matrix.
pub fn generate_ellipsoid_family(d: usize, seed: u64) -> Result<ProductFamily> {
    check_shape(d, 1)?;
    let mut rng = XorShift64Star::new(seed);
    let sets = (0..d)
        .map(|_| {
            let center: Vec<f64> = (0..d).map(|_| rng.uniform(1.0, 2.0)).collect();
            let axes: Vec<f64> = (0..d).map(|_| rng.uniform(0.5, 1.0)).collect();
            RowSet::ellipsoid(center, 0.5, axes)
        })
        .collect();
    ProductFamily::new(sets)
}
