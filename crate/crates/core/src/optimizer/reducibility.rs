use serde::{Deserialize, Serialize};

use super::{run, EigenSelector, IterationTrace, OptimizationResult, OptimizerConfig, Status};
use crate::error::Result;
use crate::linalg::NonNegativeMatrix;
use crate::rowsets::{best_row, Direction, ProductFamily, RowSet};

/// Outcome of the retry triggered by a reducible max-mode fixed point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducibilityReport {
    pub alpha: f64,
    /// Value at the fixed point that triggered the retry.
    pub unperturbed_rho: f64,
    /// Value reached on the perturbed family.
    pub perturbed_rho: f64,
    /// Value reached on the original family, restarted from the perturbed
    /// optimum mapped back into it.
    pub restarted_rho: f64,
    /// Whether the returned matrix satisfies `s - rho <= 1e-6 max(1, rho)`.
    pub certified: bool,
    pub perturbed_trace: IterationTrace,
    pub restart_trace: IterationTrace,
}

/// The family perturbed by `cfg.reducibility_alpha` times the cyclic
/// permutation: every member of it is irreducible.
pub fn detect_and_remedy_reducibility(family: &ProductFamily, cfg: &OptimizerConfig) -> Result<ProductFamily> {
    family.perturbed(cfg.reducibility_alpha)
}

/// Maps a matrix of the perturbed family back into the original one. Finite
/// rows snap to the nearest original row; continuous sets take their best row
/// against the perturbed optimum's eigenvector.
fn recover(
    family: &ProductFamily,
    perturbed: &NonNegativeMatrix,
    v: &[f64],
    alpha: f64,
    direction: Direction,
) -> Result<NonNegativeMatrix> {
    let d = family.dim();
    let rows = family
        .sets()
        .iter()
        .enumerate()
        .map(|(i, set)| match set {
            RowSet::Finite { rows } => {
                let mut target: Vec<f64> = perturbed.row(i).iter().map(|x| x / (1.0 - alpha)).collect();
                target[(i + 1) % d] -= alpha / (1.0 - alpha);
                let dist = |r: &[f64]| r.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let mut best = 0;
                for k in 1..rows.len() {
                    if dist(&rows[k]) < dist(&rows[best]) {
                        best = k;
                    }
                }
                Ok(rows[best].clone())
            }
            other => best_row(other, v, direction),
        })
        .collect::<Result<Vec<_>>>()?;
    NonNegativeMatrix::from_rows(rows)
}

pub(super) fn remedy(
    family: &ProductFamily,
    cfg: &OptimizerConfig,
    selector: &dyn EigenSelector,
    first: OptimizationResult,
) -> Result<OptimizationResult> {
    let alpha = cfg.reducibility_alpha;
    let perturbed_family = detect_and_remedy_reducibility(family, cfg)?;
    let perturbed = run(&perturbed_family, cfg, None, selector)?;
    let recovered = recover(family, &perturbed.matrix, &perturbed.eigenvector, alpha, cfg.direction)?;
    let restarted = run(family, cfg, Some(&recovered), selector)?;

    let unperturbed_rho = first.rho;
    let restarted_rho = restarted.rho;
    let restart_trace = restarted.trace.clone();
    let mut chosen = if cfg.direction.improves(restarted.rho, first.rho, 0.0) { restarted } else { first };
    let certified = chosen.gap() <= 1e-6 * chosen.rho.max(1.0);
    chosen.status = Status::ReducibleDetected;
    chosen.reducibility = Some(ReducibilityReport {
        alpha,
        unperturbed_rho,
        perturbed_rho: perturbed.rho,
        restarted_rho,
        certified,
        perturbed_trace: perturbed.trace,
        restart_trace,
    });
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{brute_force_optimum, selective_greedy};

    #[test]
    fn perturbed_members_are_irreducible() {
        let fam = ProductFamily::new(vec![
            RowSet::finite(vec![vec![1.0, 2.0], vec![3.0, 0.5]]),
            RowSet::finite(vec![vec![0.0, 1.0], vec![0.0, 4.0]]),
        ])
        .unwrap();
        let cfg = OptimizerConfig::new(Direction::Max);
        let p = detect_and_remedy_reducibility(&fam, &cfg).unwrap();
        for rows in [[0usize, 0], [0, 1], [1, 0], [1, 1]] {
            let m = NonNegativeMatrix::from_rows(vec![
                p.sets()[0].clone().finite_rows()[rows[0]].clone(),
                p.sets()[1].clone().finite_rows()[rows[1]].clone(),
            ])
            .unwrap();
            assert!(m.is_irreducible());
        }
    }

    #[test]
    fn perturbation_is_continuous_on_cycling_family() {
        let fam = crate::optimizer::tests::cycling_family();
        let cfg = OptimizerConfig::new(Direction::Max);
        let p = detect_and_remedy_reducibility(&fam, &cfg).unwrap();
        let (_, rho) = brute_force_optimum(&p, Direction::Max).unwrap();
        assert!((rho - 12.0).abs() < 1e-6);
    }

    fn trap_family() -> ProductFamily {
        // Against the ones vector row 1 picks (0, 0, 12), giving the block
        // {1, 2} rho 1.15 < 10. Once the eigenvector components on that block
        // vanish, rows 1 and 2 see a zero objective and never move, although
        // (0, 11, 0) gives rho 11.
        ProductFamily::new(vec![
            RowSet::finite(vec![vec![10.0, 0.0, 0.0]]),
            RowSet::finite(vec![vec![0.0, 11.0, 0.0], vec![0.0, 0.0, 12.0]]),
            RowSet::finite(vec![vec![0.0, 0.1, 0.1]]),
        ])
        .unwrap()
    }

    #[test]
    fn reducible_trap_is_escaped() {
        let cfg = OptimizerConfig::new(Direction::Max).with_eps(1e-14);
        let r = selective_greedy(&trap_family(), &cfg).unwrap();
        assert_eq!(r.status, Status::ReducibleDetected);
        let report = r.reducibility.as_ref().unwrap();
        assert!((report.unperturbed_rho - 10.0).abs() < 1e-9);
        assert!((report.perturbed_rho - 11.0).abs() < 1e-6);
        assert!((r.rho - 11.0).abs() < 1e-9, "{}", r.rho);
        assert_eq!(r.matrix.row(1), &[0.0, 11.0, 0.0]);
    }

    #[test]
    fn small_components_still_steer_at_default_tolerance() {
        let r = selective_greedy(&trap_family(), &OptimizerConfig::new(Direction::Max)).unwrap();
        assert!((r.rho - 11.0).abs() < 1e-9, "{}", r.rho);
    }

    impl RowSet {
        fn finite_rows(self) -> Vec<Vec<f64>> {
            match self {
                RowSet::Finite { rows } => rows,
                _ => unreachable!(),
            }
        }
    }
}
