//! Seeded inputs shared by the benchmarks.

use spectral_optim::{
    generate_random_family, Constraint, Direction, FamilyMode, LinearProgram, NonNegativeMatrix,
    ProductFamily, XorShift64Star,
};

/// Dense matrix with entries uniform on (0, 1].
pub fn positive_matrix(d: usize, seed: u64) -> NonNegativeMatrix {
    let mut rng = XorShift64Star::new(seed);
    let rows = (0..d).map(|_| (0..d).map(|_| rng.uniform(0.0, 1.0)).collect()).collect();
    NonNegativeMatrix::from_rows(rows).expect("finite non-negative entries")
}

/// Sparse finite family with density in (0.09, 0.15).
pub fn sparse_family(d: usize, n: usize, seed: u64) -> ProductFamily {
    generate_random_family(d, n, (0.09, 0.15), seed, FamilyMode::Sparse).expect("valid shape")
}

/// `max (c, x)` over `{0 <= x, (a_j, x) <= 1}` with `m` positive random
/// normals `a_j`; bounded and feasible at the origin.
pub fn random_lp(n: usize, m: usize, seed: u64) -> LinearProgram {
    let mut rng = XorShift64Star::new(seed);
    let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.uniform(0.01, 1.0)).collect() };
    let objective = draw(n);
    let constraints = (0..m).map(|_| Constraint { normal: draw(n), rhs: 1.0 }).collect();
    LinearProgram {
        objective,
        constraints,
        lower: vec![0.0; n],
        upper: vec![f64::INFINITY; n],
        sense: Direction::Max,
    }
}
