use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use spectral_optim::io::{format_value, read_family, read_matrix, write_family, write_matrix, write_trace_csv};
use spectral_optim::{
    closest_stable, generate_ellipsoid_family, generate_polyhedral_family, generate_random_family,
    optimize, optimize_graph, run_benchmark, BenchSpec, DegreeSpec, Direction, FamilyKind,
    FamilyMode, Method, NonNegativeMatrix, OptimizationResult, OptimizerConfig,
    StabilizationProblem, Status,
};

mod demo;

#[derive(Parser)]
#[command(name = "spectral-optim", version, about = "Spectral radius optimization over product families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the spectral radius over a family read from a JSON file.
    Optimize {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value = "max")]
        direction: Direction,
        #[arg(long, default_value = "selective-greedy")]
        method: Method,
        /// Power method tolerance.
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        /// Minimal gain for a row replacement.
        #[arg(long, default_value_t = 1e-10)]
        delta: f64,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        /// Write the iteration trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the optimal matrix as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graph with prescribed in-degrees and extremal spectral radius.
    Graph {
        /// Comma-separated in-degrees, one per vertex.
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[arg(long, default_value = "max")]
        direction: Direction,
    },
    /// Closest matrix (max-norm) with spectral radius at most the target.
    Stabilize {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        target: f64,
        #[arg(long, default_value_t = 1e-6)]
        rtol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean iteration counts over random families.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value = "sparse")]
        kind: Kind,
        /// Density interval `lo:hi` for sparse families.
        #[arg(long, default_value = "0.09:0.15", value_parser = parse_interval)]
        density: (f64, f64),
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "max")]
        direction: Direction,
        #[arg(long, default_value = "selective-greedy")]
        method: Method,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write a random family to a JSON file.
    Generate {
        #[arg(long)]
        dim: usize,
        /// Rows (finite), or constraints (polyhedral) per set.
        #[arg(long, default_value_t = 10)]
        size: usize,
        #[arg(long, value_enum, default_value = "sparse")]
        kind: GenKind,
        #[arg(long, default_value = "0.09:0.15", value_parser = parse_interval)]
        density: (f64, f64),
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the cycling fixture with an adversarial eigenvector and with the
    /// selective greedy method.
    DemoCycling,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Positive,
    Sparse,
    Polyhedral,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Positive,
    Sparse,
    Polyhedral,
    Ellipsoid,
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("SPECTRAL_OPTIM_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("SPECTRAL_OPTIM_THREADS={v:?}"))?;
            if n == 0 {
                bail!("SPECTRAL_OPTIM_THREADS must be at least 1");
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn print_matrix(m: &NonNegativeMatrix) {
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|x| format_value(*x)).collect();
        println!("  [{}]", cells.join(", "));
    }
}

fn print_result(r: &OptimizationResult) {
    println!("rho = {}, status = {}, iters = {}", format_value(r.rho), r.status, r.iterations());
    println!("bounds: t = {}, s = {}", format_value(r.t.value()), format_value(r.s.value()));
    if let Some(rep) = &r.reducibility {
        println!("reducible fixed point: rho = {}, perturbed rho = {}", format_value(rep.unperturbed_rho), format_value(rep.perturbed_rho));
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Optimize { family, direction, method, eps, delta, max_iter, trace, out } => {
            let fam = read_family(&family).with_context(|| format!("reading {}", family.display()))?;
            let mut cfg = OptimizerConfig::new(direction).with_method(method).with_eps(eps).with_delta(delta);
            cfg.max_outer_iters = max_iter;
            let r = optimize(&fam, &cfg)?;
            print_result(&r);
            if let Some(path) = trace {
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_trace_csv(BufWriter::new(f), &r.trace)?;
            }
            if let Some(path) = out {
                write_matrix(&path, &r.matrix).with_context(|| format!("writing {}", path.display()))?;
            }
            if r.status == Status::MaxIters {
                bail!("no convergence within {max_iter} iterations");
            }
        }
        Command::Graph { degrees, direction } => {
            let spec = DegreeSpec::new(degrees, direction);
            let g = optimize_graph(&spec, &OptimizerConfig::new(direction))?;
            println!("rho = {}", format_value(g.rho));
            print_matrix(&g.adjacency);
        }
        Command::Stabilize { matrix, target, rtol, out } => {
            let a = read_matrix(&matrix).with_context(|| format!("reading {}", matrix.display()))?;
            let mut p = StabilizationProblem::new(a);
            p.target = target;
            p.r_tol = rtol;
            let s = closest_stable(&p, &OptimizerConfig::new(Direction::Min))?;
            println!("r = {}", format_value(s.r_star));
            println!("rho(A) = {}, rho(X) = {}", format_value(s.rho_a), format_value(s.rho_x));
            if let Some(path) = out {
                write_matrix(&path, &s.x).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Bench { dims, sizes, kind, density, trials, seed, direction, method, csv } => {
            let kind = match kind {
                Kind::Positive => FamilyKind::Positive,
                Kind::Sparse => FamilyKind::Sparse,
                Kind::Polyhedral => FamilyKind::Polyhedral,
            };
            let mut spec = BenchSpec::new(kind, dims, sizes);
            spec.density_interval = density;
            spec.trials = trials;
            spec.seed = seed;
            spec.direction = direction;
            spec.method = method;
            spec.threads = threads_from_env()?;
            let table = run_benchmark(&spec)?;
            print!("{}", table.to_text());
            if let Some(path) = csv {
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                table.write_csv(BufWriter::new(f))?;
            }
            let failed: usize = table.cells.iter().map(|c| c.failures).sum();
            if failed > 0 {
                bail!("{failed} benchmark trials failed");
            }
        }
        Command::Generate { dim, size, kind, density, seed, out } => {
            let fam = match kind {
                GenKind::Positive => generate_random_family(dim, size, (1.0, 1.0), seed, FamilyMode::Positive)?,
                GenKind::Sparse => generate_random_family(dim, size, density, seed, FamilyMode::Sparse)?,
                GenKind::Polyhedral => generate_polyhedral_family(dim, size, seed)?,
                GenKind::Ellipsoid => generate_ellipsoid_family(dim, seed)?,
            };
            write_family(&out, &fam).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::DemoCycling => demo::cycling()?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
