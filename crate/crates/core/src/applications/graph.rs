use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::NonNegativeMatrix;
use crate::optimizer::{selective_greedy, OptimizationResult, OptimizerConfig};
use crate::rowsets::{DegreeSense, Direction, ProductFamily, RowSet};

/// Number of incoming edges of each vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSpec {
    pub degrees: Vec<usize>,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphOutcome {
    /// 0/1 adjacency matrix; row `i` has exactly `degrees[i]` ones.
    pub adjacency: NonNegativeMatrix,
    pub rho: f64,
    pub result: OptimizationResult,
}

impl DegreeSpec {
    pub fn new(degrees: Vec<usize>, direction: Direction) -> Self {
        Self { degrees, direction }
    }

    /// Rows with at most `n_i` ones for maximization, at least `n_i` for
    /// minimization. Both optima use the budget exactly.
    pub fn family(&self) -> Result<ProductFamily> {
        let d = self.degrees.len();
        if let Some(n) = self.degrees.iter().find(|&&n| n == 0 || n > d) {
            return Err(Error::InvalidConfig(format!("degree {n} outside 1..={d}")));
        }
        let sense = match self.direction {
            Direction::Max => DegreeSense::AtMost,
            Direction::Min => DegreeSense::AtLeast,
        };
        ProductFamily::new(self.degrees.iter().map(|&n| RowSet::graph(n, sense)).collect())
    }
}

/// Selective greedy over graphs with the prescribed in-degrees. The
/// direction of `spec` overrides the one in `cfg`.
pub fn optimize_graph(spec: &DegreeSpec, cfg: &OptimizerConfig) -> Result<GraphOutcome> {
    let family = spec.family()?;
    let mut cfg = cfg.clone();
    cfg.direction = spec.direction;
    let result = selective_greedy(&family, &cfg)?;
    Ok(GraphOutcome { adjacency: result.matrix.clone(), rho: result.rho, result })
}
