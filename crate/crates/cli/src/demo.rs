//! Cycling fixture: three rows with 4, 2 and 2 choices. Plain greedy started
//! at `A1` and fed the non-selected eigenvectors (2,2,1) of `A2` and (2,1,2)
//! of `A3` alternates between `A2` and `A3` forever; the selective greedy
//! method reaches the optimum 12.

use anyhow::{ensure, Result};
use spectral_optim::io::format_value;
use spectral_optim::linalg::ratio_estimate;
use spectral_optim::{
    optimize_with, selected_eigenpair, selective_greedy, Direction, EigenSelector, Eigenpair,
    Method, NonNegativeMatrix, OptimizerConfig, PowerConfig, ProductFamily, RowSet, Status,
    ZERO_TOL,
};

fn matrix(rows: [[f64; 3]; 3]) -> NonNegativeMatrix {
    NonNegativeMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("valid fixture")
}

fn family() -> ProductFamily {
    ProductFamily::new(vec![
        RowSet::finite(vec![
            vec![1.0, 1.0, 1.0],
            vec![0.0, 5.0, 10.0],
            vec![0.0, 10.0, 5.0],
            vec![12.0, 0.0, 0.0],
        ]),
        RowSet::finite(vec![vec![1.0, 1.0, 1.0], vec![0.0, 10.0, 0.0]]),
        RowSet::finite(vec![vec![1.0, 1.0, 3.0], vec![0.0, 0.0, 10.0]]),
    ])
    .expect("valid fixture")
}

struct Adversary {
    a2: NonNegativeMatrix,
    a3: NonNegativeMatrix,
}

impl EigenSelector for Adversary {
    fn eigenpair(&self, a: &NonNegativeMatrix, cfg: &PowerConfig) -> spectral_optim::Result<Eigenpair> {
        let v = if *a == self.a2 {
            [2.0, 2.0, 1.0]
        } else if *a == self.a3 {
            [2.0, 1.0, 2.0]
        } else {
            return selected_eigenpair(a, cfg);
        };
        let v: Vec<f64> = v.iter().map(|x| x / 3.0).collect();
        Ok(Eigenpair { rho: ratio_estimate(a, &v, ZERO_TOL), v, u: None, power_iters: 0 })
    }
}

pub fn cycling() -> Result<()> {
    let fam = family();
    let a1 = matrix([[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 3.0]]);
    let adversary = Adversary {
        a2: matrix([[0.0, 5.0, 10.0], [0.0, 10.0, 0.0], [0.0, 0.0, 10.0]]),
        a3: matrix([[0.0, 10.0, 5.0], [0.0, 10.0, 0.0], [0.0, 0.0, 10.0]]),
    };

    let cfg = OptimizerConfig::new(Direction::Max).with_method(Method::Greedy);
    let g = optimize_with(&fam, &cfg, Some(&a1), &adversary)?;
    println!(
        "greedy (adversarial eigenvectors): status = {}, iters = {}, best rho = {}, s = {}",
        g.status,
        g.iterations(),
        format_value(g.rho),
        format_value(g.s.value())
    );
    ensure!(g.status == Status::CycleDetected, "adversarial greedy ended with status {}", g.status);

    let r = selective_greedy(&fam, &OptimizerConfig::new(Direction::Max))?;
    println!(
        "selective greedy: rho = {}, status = {}, iters = {}",
        format_value(r.rho),
        r.status,
        r.iterations()
    );
    ensure!((r.rho - 12.0).abs() <= 1e-9, "selective greedy reached rho = {}", r.rho);
    Ok(())
}
