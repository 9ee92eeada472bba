use crate::error::Result;
use crate::linalg::{power_eigenpair_from, selected_eigenpair, Eigenpair, NonNegativeMatrix, PowerConfig};

/// Chooses which leading eigenvector an iteration works with.
///
/// The optimizers are generic over this so that alternative choices (the
/// classic greedy method, or a scripted adversary in tests) share one loop.
pub trait EigenSelector: Sync {
    fn eigenpair(&self, a: &NonNegativeMatrix, cfg: &PowerConfig) -> Result<Eigenpair>;
}

/// Power method from the vector of ones: the selected leading eigenvector.
#[derive(Clone, Copy, Debug, Default)]
pub struct SelectedEigenvector;

impl EigenSelector for SelectedEigenvector {
    fn eigenpair(&self, a: &NonNegativeMatrix, cfg: &PowerConfig) -> Result<Eigenpair> {
        selected_eigenpair(a, cfg)
    }
}

/// Power method from the fixed positive start `x_i = 1 / (i + 1)`.
///
/// This yields a valid leading eigenvector, but when the leading eigenvalue
/// is multiple it is generally not the selected one, which is what the
/// classic greedy method does.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnselectedEigenvector;

impl EigenSelector for UnselectedEigenvector {
    fn eigenpair(&self, a: &NonNegativeMatrix, cfg: &PowerConfig) -> Result<Eigenpair> {
        let start: Vec<f64> = (0..a.dim()).map(|i| 1.0 / (i + 1) as f64).collect();
        power_eigenpair_from(a, &start, cfg)
    }
}
