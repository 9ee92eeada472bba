//! Iteration-count benchmarks over random families.

use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{optimize, Method, OptimizerConfig};
use crate::random::{generate_polyhedral_family, generate_random_family, FamilyMode};
use crate::rowsets::{Direction, ProductFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// Finite sets of `N` positive rows.
    Positive,
    /// Finite sets of `N` sparse rows with density drawn from the interval.
    Sparse,
    /// Polyhedral sets with `N` unit-norm constraint normals.
    Polyhedral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub kind: FamilyKind,
    pub dims: Vec<usize>,
    pub set_sizes: Vec<usize>,
    pub density_interval: (f64, f64),
    pub trials: usize,
    pub seed: u64,
    pub direction: Direction,
    pub method: Method,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
}

impl BenchSpec {
    pub fn new(kind: FamilyKind, dims: Vec<usize>, set_sizes: Vec<usize>) -> Self {
        Self {
            kind,
            dims,
            set_sizes,
            density_interval: (0.09, 0.15),
            trials: 10,
            seed: 42,
            direction: Direction::Max,
            method: Method::SelectiveGreedy,
            threads: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.density_interval;
        if !(0.0 < lo && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidConfig(format!("density interval ({lo}, {hi}) is invalid")));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.set_sizes.is_empty() {
            return Err(Error::InvalidConfig("empty benchmark grid".into()));
        }
        if self.dims.contains(&0) || self.set_sizes.contains(&0) {
            return Err(Error::InvalidConfig("dimensions and set sizes must be positive".into()));
        }
        Ok(())
    }

    fn family(&self, d: usize, n: usize, seed: u64) -> Result<ProductFamily> {
        match self.kind {
            FamilyKind::Positive => generate_random_family(d, n, (1.0, 1.0), seed, FamilyMode::Positive),
            FamilyKind::Sparse => generate_random_family(d, n, self.density_interval, seed, FamilyMode::Sparse),
            FamilyKind::Polyhedral => generate_polyhedral_family(d, n, seed),
        }
    }
}

/// Averages over the successful trials of one `(d, N)` cell. Means are NaN
/// when every trial failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub d: usize,
    pub n: usize,
    pub mean_iters: f64,
    pub mean_time_s: f64,
    /// Number of successful trials.
    pub trials: usize,
    pub failures: usize,
    pub seed: u64,
    pub iterations: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub spec: BenchSpec,
    pub cells: Vec<BenchCell>,
}

impl BenchTable {
    pub fn to_text(&self) -> String {
        let header = ["d", "N", "mean_iters", "mean_time_s", "trials", "seed"];
        let rows: Vec<[String; 6]> = self
            .cells
            .iter()
            .map(|c| {
                [
                    c.d.to_string(),
                    c.n.to_string(),
                    format!("{:.2}", c.mean_iters),
                    format!("{:.4}", c.mean_time_s),
                    c.trials.to_string(),
                    c.seed.to_string(),
                ]
            })
            .collect();
        let widths: Vec<usize> = (0..6)
            .map(|k| rows.iter().map(|r| r[k].len()).chain([header[k].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, cells: &[&str]| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(out, "{}", parts.join("  "));
        };
        line(&mut out, &header);
        for r in &rows {
            line(&mut out, &r.iter().map(String::as_str).collect::<Vec<_>>());
        }
        if self.spec.kind == FamilyKind::Polyhedral {
            out.push_str("# constraint normals: uniform on (0,1]^d, unit Euclidean norm\n");
        }
        out
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["d", "N", "mean_iters", "mean_time_s", "trials", "seed"])?;
        for c in &self.cells {
            w.write_record([
                c.d.to_string(),
                c.n.to_string(),
                c.mean_iters.to_string(),
                c.mean_time_s.to_string(),
                c.trials.to_string(),
                c.seed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs every `(d, N, trial)` job, in parallel across trials. Trial `k` of a
/// cell uses the seed `spec.seed ^ k`. A failing trial is counted and
/// skipped.
pub fn run_benchmark(spec: &BenchSpec) -> Result<BenchTable> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let cfg = OptimizerConfig::new(spec.direction).with_method(spec.method);

    let mut cells = Vec::new();
    for &d in &spec.dims {
        for &n in &spec.set_sizes {
            let outcomes: Vec<Option<(usize, f64)>> = pool.install(|| {
                (0..spec.trials as u64)
                    .into_par_iter()
                    .map(|k| {
                        let family = spec.family(d, n, spec.seed ^ k).ok()?;
                        let clock = Instant::now();
                        let r = optimize(&family, &cfg).ok()?;
                        Some((r.iterations(), clock.elapsed().as_secs_f64()))
                    })
                    .collect()
            });
            let ok: Vec<(usize, f64)> = outcomes.iter().flatten().copied().collect();
            let count = ok.len();
            let mean = |f: fn(&(usize, f64)) -> f64| {
                if count == 0 { f64::NAN } else { ok.iter().map(f).sum::<f64>() / count as f64 }
            };
            cells.push(BenchCell {
                d,
                n,
                mean_iters: mean(|x| x.0 as f64),
                mean_time_s: mean(|x| x.1),
                trials: count,
                failures: spec.trials - count,
                seed: spec.seed,
                iterations: ok.iter().map(|x| x.0).collect(),
            });
        }
    }
    Ok(BenchTable { spec: spec.clone(), cells })
}
