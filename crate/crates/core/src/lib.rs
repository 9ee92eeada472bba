//! Minimization and maximization of the spectral radius over product families
//! of non-negative matrices.
//!
//! A product family is given by one uncertainty set per row; a matrix belongs
//! to the family when each of its rows is drawn from the corresponding set.
//! The crate provides the spectral simplex method (smallest-index and pivoting
//! rules), the greedy method and the selective greedy method, which computes
//! every leading eigenvector by the power method started from the vector of
//! ones. Around those sit the a-posteriori bounds, a small dense LP solver for
//! polyhedral sets, the graph and stabilization applications, random family
//! generators and a benchmark driver.
//!
//! ```
//! use spectral_optim::{selective_greedy, Direction, OptimizerConfig, ProductFamily, RowSet};
//!
//! let family = ProductFamily::new(vec![
//!     RowSet::finite(vec![vec![1.0, 1.0], vec![0.0, 3.0]]),
//!     RowSet::finite(vec![vec![2.0, 0.0], vec![1.0, 1.0]]),
//! ])
//! .unwrap();
//! let result = selective_greedy(&family, &OptimizerConfig::new(Direction::Max)).unwrap();
//! // The best choice is [[0, 3], [2, 0]], whose spectral radius is sqrt(6).
//! assert!((result.rho - 6f64.sqrt()).abs() < 1e-9);
//! ```

pub mod applications;
pub mod benchmark;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod optimizer;
pub mod random;
pub mod rowsets;

pub use applications::{
    closest_stable, closest_unstable, optimize_graph, DegreeSpec, GraphOutcome,
    StabilizationOutcome, StabilizationProblem,
};
pub use benchmark::{run_benchmark, BenchCell, BenchSpec, BenchTable, FamilyKind};
pub use error::{Error, Result};
pub use linalg::{
    left_eigenvector, lower_bound_t, selected_eigenpair, spectral_radius, upper_bound_s, Bound, Eigenpair,
    NonNegativeMatrix, PowerConfig, ZERO_TOL,
};
pub use lp::{lp_optimize, Constraint, LinearProgram, LpSolution};
pub use optimizer::{
    brute_force_optimum, contraction_factor, detect_and_remedy_reducibility, detect_cycle,
    greedy, greedy_step, linear_rate_bound, optimize, optimize_with, selective_greedy,
    spectral_simplex, EigenSelector, IterateSignature, IterationRecord, IterationTrace, Method,
    OptimizationResult, OptimizerConfig, ReducibilityReport, SelectedEigenvector, Status,
    UnselectedEigenvector,
};
pub use random::{
    generate_ellipsoid_family, generate_polyhedral_family, generate_random_family, FamilyMode,
    XorShift64Star,
};
pub use rowsets::{best_row, DegreeSense, Direction, ProductFamily, RowSet};
