//! Graph spectral-radius optimization under in-degree budgets, and the
//! closest stable or unstable matrix in the max-norm.

mod graph;
mod stabilize;

pub use graph::{optimize_graph, DegreeSpec, GraphOutcome};
pub use stabilize::{closest_stable, closest_unstable, StabilizationOutcome, StabilizationProblem};
