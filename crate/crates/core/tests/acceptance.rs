//! Acceptance run: one PASS/FAIL line per criterion, each with its runtime
//! limit. Exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use spectral_optim::{
    brute_force_optimum, closest_stable, generate_ellipsoid_family,
    generate_random_family, linear_rate_bound, lp_optimize, optimize, optimize_graph, optimize_with,
    run_benchmark, selected_eigenpair, selective_greedy, BenchSpec, Constraint,
    DegreeSpec, Direction, FamilyKind, FamilyMode, IterationTrace, LinearProgram, Method,
    NonNegativeMatrix, OptimizationResult, OptimizerConfig, PowerConfig, ProductFamily, SelectedEigenvector,
    StabilizationProblem, Status, XorShift64Star,
};

type Check = std::result::Result<String, String>;
/// Number, title, time limit in milliseconds, check.
type Entry = (u32, &'static str, u64, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok { Ok(()) } else { Err(msg.into()) }
}

fn report(id: u32, title: &str, limit: Duration, f: fn() -> Check) -> bool {
    let clock = Instant::now();
    let outcome = f();
    let elapsed = clock.elapsed();
    let in_time = elapsed <= limit;
    let (pass, detail) = match outcome {
        Ok(d) if in_time => (true, d),
        Ok(d) => (false, format!("{d}; over the time limit")),
        Err(e) => (false, e),
    };
    println!(
        "criterion {id:>2} {} | {title} | {detail} | {:.3}s (limit {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    pass
}

const CLOSE: f64 = 1e-9;

fn criterion_1() -> Check {
    let fam = cycling_family();
    let r = selective_greedy(&fam, &OptimizerConfig::new(Direction::Max)).map_err(|e| e.to_string())?;
    ensure((r.rho - 12.0).abs() <= CLOSE, format!("selective rho = {}", r.rho))?;
    ensure(r.matrix.row(0) == [12.0, 0.0, 0.0], format!("first row {:?}", r.matrix.row(0)))?;
    ensure(r.iterations() <= 4, format!("{} iterations", r.iterations()))?;

    let cfg = OptimizerConfig::new(Direction::Max).with_method(Method::Greedy);
    let g = optimize_with(&fam, &cfg, Some(&cycling_a1()), &Adversary).map_err(|e| e.to_string())?;
    ensure(g.status == Status::CycleDetected, format!("adversarial status {}", g.status))?;
    ensure((g.rho - 10.0).abs() <= CLOSE, format!("adversarial best {}", g.rho))?;
    ensure((g.s.value() - 12.5).abs() <= CLOSE, format!("adversarial s = {}", g.s))?;
    Ok(format!(
        "selective rho = {} in {} iterations; adversarial greedy: {} with {} <= rho_max <= {}",
        r.rho,
        r.iterations(),
        g.status,
        g.rho,
        g.s
    ))
}

fn small_family(k: u64) -> ProductFamily {
    let d = 1 + (k % 6) as usize;
    let n = 1 + ((k / 6) % 3) as usize;
    let mode = if k.is_multiple_of(2) { FamilyMode::Positive } else { FamilyMode::Sparse };
    generate_random_family(d, n, (0.2, 0.6), 1000 + k, mode).unwrap()
}

/// `t <= rho_k <= s` on every record; in max mode also `rho_max <= s + 1e-9`,
/// in min mode `t <= rho_min + 1e-9`.
fn sandwich(trace: &IterationTrace, dir: Direction, optimum: Option<f64>) -> std::result::Result<(), String> {
    for r in trace.iter() {
        ensure(r.t.value() <= r.rho && r.rho <= r.s.value(), format!("iter {}: {} <= {} <= {} fails", r.iter, r.t, r.rho, r.s))?;
        if let Some(opt) = optimum {
            let ok = match dir {
                Direction::Max => opt <= r.s.value() + CLOSE,
                Direction::Min => r.t.value() <= opt + CLOSE,
            };
            ensure(ok, format!("iter {}: optimum {opt} outside [{}, {}]", r.iter, r.t, r.s))?;
        }
    }
    Ok(())
}

fn sandwich_all(r: &OptimizationResult, optimum: f64) -> std::result::Result<usize, String> {
    sandwich(&r.trace, r.direction, Some(optimum))?;
    let mut n = r.trace.len();
    if let Some(rep) = &r.reducibility {
        sandwich(&rep.restart_trace, r.direction, Some(optimum))?;
        sandwich(&rep.perturbed_trace, r.direction, None)?;
        n += rep.restart_trace.len() + rep.perturbed_trace.len();
    }
    Ok(n)
}

const COMPARED: [Method; 3] = [Method::SelectiveGreedy, Method::SimplexSmallestIndex, Method::SimplexPivot];

fn criterion_2_and_6() -> std::result::Result<(usize, f64, usize), String> {
    let (mut runs, mut worst, mut records) = (0, 0.0f64, 0);
    for k in 0..200 {
        let fam = small_family(k);
        for dir in [Direction::Max, Direction::Min] {
            let (m, opt) = brute_force_optimum(&fam, dir).map_err(|e| e.to_string())?;
            let independent = nalgebra_rho(&m);
            ensure((independent - opt).abs() <= 1e-8 * opt.max(1.0), format!("family {k}: oracle {opt} vs eigensolver {independent}"))?;
            for method in COMPARED {
                let cfg = OptimizerConfig::new(dir).with_method(method);
                let r = optimize(&fam, &cfg).map_err(|e| format!("family {k} {dir} {}: {e}", method.name()))?;
                let diff = (r.rho - opt).abs();
                worst = worst.max(diff);
                ensure(diff <= 1e-8, format!("family {k} {dir} {}: {} vs oracle {opt}", method.name(), r.rho))?;
                records += sandwich_all(&r, opt).map_err(|e| format!("family {k} {dir} {}: {e}", method.name()))?;
                runs += 1;
            }
        }
    }
    Ok((runs, worst, records))
}

fn criterion_2() -> Check {
    let (runs, worst, _) = criterion_2_and_6()?;
    Ok(format!("{runs} runs on 200 families, max |drho| = {worst:.2e}"))
}

fn criterion_6() -> Check {
    let (runs, _, records) = criterion_2_and_6()?;
    Ok(format!("{records} iteration records over {runs} runs inside [t, s]"))
}

fn criterion_3() -> Check {
    let degrees = vec![3, 2, 3, 2, 4, 1, 1];
    let g = optimize_graph(&DegreeSpec::new(degrees.clone(), Direction::Max), &OptimizerConfig::new(Direction::Max))
        .map_err(|e| e.to_string())?;
    ensure((g.rho - 3.21432).abs() <= 1e-4, format!("rho = {}", g.rho))?;
    let independent = nalgebra_rho(&g.adjacency);
    ensure((independent - g.rho).abs() <= 1e-9, format!("eigensolver gives {independent}"))?;
    for (row, n) in g.adjacency.rows().zip(&degrees) {
        ensure(row.iter().sum::<f64>() == *n as f64, "degree budget not used exactly")?;
    }
    let mut extremes = Vec::new();
    for (deg, want) in [(1usize, 1.0), (7, 7.0)] {
        let e = optimize_graph(&DegreeSpec::new(vec![deg; 7], Direction::Max), &OptimizerConfig::new(Direction::Max))
            .map_err(|e| e.to_string())?;
        ensure(e.rho == want, format!("all-{deg} gives {}", e.rho))?;
        extremes.push(e.rho);
    }
    Ok(format!("rho = {:.6} (eigensolver {independent:.6}); all-1 -> {}, all-7 -> {}", g.rho, extremes[0], extremes[1]))
}

fn stabilization_instance() -> (NonNegativeMatrix, NonNegativeMatrix) {
    let a = matrix(&[
        &[0., 0., 0., 3., 5., 0., 8., 0., 0., 0.],
        &[8., 0., 0., 0., 0., 0., 0., 0., 8., 0.],
        &[0., 2., 0., 0., 0., 4., 0., 5., 0., 7.],
        &[0., 0., 0., 0., 0., 0., 0., 0., 8., 0.],
        &[1., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
        &[0., 0., 0., 0., 0., 7., 0., 0., 0., 0.],
        &[0., 0., 0., 0., 6., 2., 2., 0., 1., 0.],
        &[0., 0., 0., 0., 0., 0., 1., 0., 7., 0.],
        &[0., 0., 0., 9., 5., 0., 0., 0., 1., 0.],
        &[0., 0., 0., 0., 0., 0., 3., 4., 8., 9.],
    ]);
    let x = matrix(&[
        &[0., 0., 0., 3., 5., 0., 0.125, 0., 0., 0.],
        &[0.125, 0., 0., 0., 0., 0., 0., 0., 8., 0.],
        &[0., 2., 0., 0., 0., 4., 0., 5., 0., 0.],
        &[0., 0., 0., 0., 0., 0., 0., 0., 0.125, 0.],
        &[0.; 10],
        &[0.; 10],
        &[0., 0., 0., 0., 6., 2., 2., 0., 1., 0.],
        &[0., 0., 0., 0., 0., 0., 1., 0., 7., 0.],
        &[0., 0., 0., 2.125, 5., 0., 0., 0., 0., 0.],
        &[0., 0., 0., 0., 0., 0., 3., 4., 8., 1.],
    ]);
    (a, x)
}

fn criterion_4() -> Check {
    let (a, x_printed) = stabilization_instance();
    let d_printed = x_printed.inf_distance(&a);
    let rho_a = selected_eigenpair(&a, &PowerConfig::with_eps(1e-12)).map_err(|e| e.to_string())?.rho;
    let rho_a_independent = nalgebra_rho(&a);
    ensure((rho_a - 9.139125).abs() <= 1e-4, format!("rho(A) = {rho_a}"))?;
    ensure((rho_a_independent - 9.139125).abs() <= 1e-4, format!("eigensolver rho(A) = {rho_a_independent}"))?;
    let out = closest_stable(&StabilizationProblem::new(a.clone()), &OptimizerConfig::new(Direction::Min))
        .map_err(|e| e.to_string())?;
    let rho_x = blockwise_rho(&out.x);
    let dist = out.x.inf_distance(&a);
    ensure(rho_x <= 1.0 + 1e-6, format!("rho(X) = {rho_x}"))?;
    ensure(out.x.entries().iter().all(|v| *v >= 0.0), "X has a negative entry")?;
    ensure(dist <= d_printed + 1e-3, format!("||X - A|| = {dist} > {d_printed} + 1e-3"))?;
    Ok(format!(
        "rho(A) = {rho_a:.6}; rho(X) = {rho_x:.3e}; ||X - A||_inf = {dist:.6} vs printed {d_printed}; {} probes",
        out.probes
    ))
}

fn criterion_5() -> Check {
    let threads = Some(1);
    let mut positive = BenchSpec::new(FamilyKind::Positive, vec![25, 100, 500], vec![50, 100]);
    positive.threads = threads;
    let pt = run_benchmark(&positive).map_err(|e| e.to_string())?;
    let mut sparse = BenchSpec::new(FamilyKind::Sparse, vec![25, 100, 500], vec![50, 100]);
    sparse.threads = threads;
    let st = run_benchmark(&sparse).map_err(|e| e.to_string())?;

    let means = |cells: &[spectral_optim::BenchCell]| cells.iter().map(|c| c.mean_iters).collect::<Vec<_>>();
    let (pm, sm) = (means(&pt.cells), means(&st.cells));
    for c in pt.cells.iter().chain(&st.cells) {
        ensure(c.failures == 0, format!("d = {}, N = {}: {} failed trials", c.d, c.n, c.failures))?;
    }
    let (pmax, pmin) = (pm.iter().copied().fold(0.0, f64::max), pm.iter().copied().fold(f64::INFINITY, f64::min));
    ensure(pmax <= 6.0, format!("positive means {pm:?}"))?;
    ensure(pmax <= 2.0 * pmin, format!("positive means not flat: {pm:?}"))?;
    ensure(sm.iter().all(|m| *m <= 10.0), format!("sparse means {sm:?}"))?;
    let fmt = |v: &[f64]| v.iter().map(|m| format!("{m:.1}")).collect::<Vec<_>>().join(" ");
    Ok(format!("positive mean iterations [{}], sparse [{}] (d-major, N = 50, 100)", fmt(&pm), fmt(&sm)))
}

/// Positive families: half with entries on (0, 1], half shifted to (1, 2]
/// so that the rate bound is away from 1.
fn positive_family(k: u64) -> ProductFamily {
    let d = 2 + (k % 7) as usize;
    let n = 1 + ((k / 7) % 4) as usize;
    let fam = generate_random_family(d, n, (1.0, 1.0), 5000 + k, FamilyMode::Positive).unwrap();
    if k.is_multiple_of(2) {
        return fam;
    }
    let sets = fam
        .sets()
        .iter()
        .map(|s| match s {
            spectral_optim::RowSet::Finite { rows } => {
                spectral_optim::RowSet::finite(rows.iter().map(|r| r.iter().map(|x| 1.0 + x).collect()).collect())
            }
            _ => unreachable!(),
        })
        .collect();
    ProductFamily::new(sets).unwrap()
}

/// Contractions `(rho_max - rho_{k+1}) / (rho_max - rho_k)` along a run
/// started from the minimizing matrix, so that there is a descent to measure.
fn contractions(fam: &ProductFamily, method: Method, rho_max: f64) -> std::result::Result<Vec<f64>, String> {
    let cfg = OptimizerConfig::new(Direction::Max).with_method(method).with_eps(1e-13);
    let start = fam.best_matrix(&vec![1.0; fam.dim()], Direction::Min).map_err(|e| e.to_string())?;
    let r = optimize_with(fam, &cfg, Some(&start), &SelectedEigenvector).map_err(|e| e.to_string())?;
    let rhos = r.trace.rhos();
    Ok(rhos
        .windows(2)
        .filter(|w| rho_max - w[0] > 1e-10)
        .map(|w| (rho_max - w[1]).max(0.0) / (rho_max - w[0]))
        .collect())
}

/// The rate argument needs the replaced row to be the one attaining `s`,
/// which holds for greedy and for the pivoting rule. Smallest-index
/// violations are counted for information only.
fn criterion_7() -> Check {
    let (mut observed, mut worst_slack, mut min_q, mut smallest_index_over) = (0usize, f64::NEG_INFINITY, 1.0f64, 0);
    for k in 0..50 {
        let fam = positive_family(k);
        let q = linear_rate_bound(&fam).map_err(|e| e.to_string())?;
        min_q = min_q.min(q);
        let (_, rho_max) = brute_force_optimum(&fam, Direction::Max).map_err(|e| e.to_string())?;
        for method in [Method::SelectiveGreedy, Method::SimplexPivot] {
            for ratio in contractions(&fam, method, rho_max)? {
                observed += 1;
                worst_slack = worst_slack.max(ratio - q);
                ensure(ratio <= q + CLOSE, format!("family {k} {}: contraction {ratio} > q = {q}", method.name()))?;
            }
        }
        smallest_index_over += contractions(&fam, Method::SimplexSmallestIndex, rho_max)?
            .iter()
            .filter(|r| **r > q + CLOSE)
            .count();
    }
    Ok(format!(
        "{observed} contractions (greedy, pivot), max (ratio - q) = {worst_slack:.3}, smallest q = {min_q:.4}; \
         smallest-index rule exceeds q {smallest_index_over} times"
    ))
}

/// Errors `||A_k - A_bar||_inf` along a run, where `A_bar` comes from a run
/// to tolerance 1e-14.
fn iterate_errors(fam: &ProductFamily, method: Method) -> std::result::Result<Vec<f64>, String> {
    let mut tight = OptimizerConfig::new(Direction::Max).with_eps(1e-14).with_delta(1e-15);
    tight.max_outer_iters = 10_000;
    let bar = selective_greedy(fam, &tight).map_err(|e| e.to_string())?.matrix;
    let mut cfg = tight.with_method(method);
    cfg.record_iterates = true;
    let r = optimize(fam, &cfg).map_err(|e| e.to_string())?;
    Ok(r.trace.iter().filter_map(|rec| rec.matrix.as_ref()).map(|m| m.inf_distance(&bar)).collect())
}

/// Errors still measurable: above the floor set by the eigenvector
/// tolerance and below 1.
fn measurable(errors: &[f64]) -> Vec<f64> {
    errors.iter().copied().filter(|e| *e > 1e-9 && *e < 1.0).collect()
}

/// `log e_{k+1} / log e_k` for the last two measurable errors.
fn last_order(errors: &[f64]) -> Option<f64> {
    let m = measurable(errors);
    let n = m.len();
    (n >= 2).then(|| m[n - 1].ln() / m[n - 2].ln())
}

/// Per-iteration order averaged over the measurable tail: the geometric mean
/// of `log e_{k+1} / log e_k`. Single-row updates stall on rows not yet
/// touched, so one ratio alone says little.
fn mean_order(errors: &[f64]) -> Option<f64> {
    let m = measurable(errors);
    let n = m.len();
    (n >= 2).then(|| (m[n - 1].ln() / m[0].ln()).powf(1.0 / (n - 1) as f64))
}

fn criterion_8() -> Check {
    let (mut greedy_orders, mut simplex_orders) = (Vec::new(), Vec::new());
    for k in 0..20u64 {
        // A sweep of d single-row updates acts like one greedy step, so the
        // simplex order per iteration is near 2^(1/d); d = 2 would give 1.41.
        let d = 3 + (k % 8) as usize;
        let fam = generate_ellipsoid_family(d, 7000 + k).unwrap();
        let g = iterate_errors(&fam, Method::SelectiveGreedy)?;
        let s = iterate_errors(&fam, Method::SimplexSmallestIndex)?;
        let go = last_order(&g).ok_or(format!("family {k}: greedy errors {g:?} too few to measure"))?;
        ensure(go >= 1.8, format!("family {k} (d = {d}): greedy order {go:.3}, errors {g:?}"))?;
        let so = mean_order(&s).ok_or(format!("family {k}: simplex errors {s:?} too few to measure"))?;
        ensure(so < 1.3, format!("family {k} (d = {d}): simplex order {so:.3}, errors {s:?}"))?;
        greedy_orders.push(go);
        simplex_orders.push(so);
    }
    let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(format!(
        "greedy order in [{:.2}, {:.2}], simplex order in [{:.2}, {:.2}]",
        lo(&greedy_orders),
        hi(&greedy_orders),
        lo(&simplex_orders),
        hi(&simplex_orders)
    ))
}

fn criterion_9() -> Check {
    let mut rng = XorShift64Star::new(9);
    let (mut runs, mut iters) = (0, 0);
    for k in 0..500u64 {
        let d = 2 + (rng.next_u64() % 29) as usize;
        let n = 2 + (rng.next_u64() % 5) as usize;
        let lo = rng.uniform(0.05, 0.2);
        let hi = rng.uniform(lo, 0.2);
        let fam = generate_random_family(d, n, (lo, hi), 9000 + k, FamilyMode::Sparse).unwrap();
        for dir in [Direction::Max, Direction::Min] {
            let r = selective_greedy(&fam, &OptimizerConfig::new(dir).with_delta(1e-10)).map_err(|e| e.to_string())?;
            ensure(r.status != Status::CycleDetected, format!("family {k} {dir} cycled"))?;
            runs += 1;
            iters += r.iterations();
        }
    }
    Ok(format!("{runs} runs, no cycles, {:.2} mean iterations", iters as f64 / runs as f64))
}

fn random_lp(rng: &mut XorShift64Star) -> LinearProgram {
    let n = 1 + (rng.next_u64() % 4) as usize;
    let m = 1 + (rng.next_u64() % 4) as usize;
    let lower: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let upper: Vec<f64> = lower.iter().map(|l| l + rng.uniform(0.1, 2.0)).collect();
    let inside: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| rng.uniform(*l, *u)).collect();
    let constraints = (0..m)
        .map(|_| {
            let normal: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let at: f64 = normal.iter().zip(&inside).map(|(a, x)| a * x).sum();
            Constraint { normal, rhs: at + rng.uniform(0.0, 0.5) }
        })
        .collect();
    let objective = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let sense = if rng.next_u64().is_multiple_of(2) { Direction::Max } else { Direction::Min };
    LinearProgram { objective, constraints, lower, upper, sense }
}

fn criterion_10() -> Check {
    let mut rng = XorShift64Star::new(10);
    let mut worst = 0.0f64;
    for k in 0..500 {
        let lp = random_lp(&mut rng);
        let (_, want) = vertex_enumeration(&lp).ok_or(format!("lp {k}: no feasible vertex"))?;
        let got = lp_optimize(&lp).map_err(|e| format!("lp {k}: {e}"))?;
        let violation = lp_rows(&lp)
            .iter()
            .map(|(a, b)| a.iter().zip(&got.x).map(|(p, q)| p * q).sum::<f64>() - b)
            .fold(0.0, f64::max);
        ensure(violation <= 1e-9, format!("lp {k}: infeasible by {violation}"))?;
        worst = worst.max((got.value - want).abs());
        ensure((got.value - want).abs() <= 1e-9, format!("lp {k}: {} vs {want}", got.value))?;
    }
    let mut spec = BenchSpec::new(FamilyKind::Polyhedral, vec![10, 25], vec![5, 10]);
    spec.threads = Some(1);
    let table = run_benchmark(&spec).map_err(|e| e.to_string())?;
    let means: Vec<f64> = table.cells.iter().map(|c| c.mean_iters).collect();
    ensure(table.cells.iter().all(|c| c.failures == 0), "polyhedral trial failed")?;
    ensure(means.iter().all(|m| *m <= 8.0), format!("polyhedral means {means:?}"))?;
    Ok(format!("500 LPs, max |dvalue| = {worst:.1e}; polyhedral mean iterations {means:?}"))
}

fn main() {
    let criteria: [Entry; 10] = [
        (1, "cycling fixture", 100, criterion_1),
        (2, "oracle equivalence", 60_000, criterion_2),
        (3, "graph application", 100, criterion_3),
        (4, "stabilization", 5_000, criterion_4),
        (5, "iteration flatness", 600_000, criterion_5),
        (6, "bound sandwich", 60_000, criterion_6),
        (7, "linear rate bound", 60_000, criterion_7),
        (8, "quadratic convergence", 60_000, criterion_8),
        (9, "no cycling", 300_000, criterion_9),
        (10, "LP layer", 300_000, criterion_10),
    ];
    let mut failed = 0;
    for (id, title, ms, f) in criteria {
        if !report(id, title, Duration::from_millis(ms), f) {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
