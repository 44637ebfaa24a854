//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p fpqs-core --test acceptance`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use fpqs_core::analytics::{
    avg_queries_classical, avg_queries_quantum, crossover_epsilon_a, pi3_query_sequence,
    plan_queries,
};
use fpqs_core::experiments::{figure1_data, figure4_data, lockstep_residual, monte_carlo_summary};
use fpqs_core::{
    general_phase_scale_check, run_deferred_measurement, run_fixed_point_exact,
    run_fixed_point_full_exact, run_phase_pi3, DatabaseSpec, Reg, SearchConfig, Variant,
};

const IDENTITY: f64 = 1e-12;
const CROSS: f64 = 1e-10;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

fn within(what: &str, got: f64, want: f64, tol: f64) -> Result<f64, String> {
    let d = (got - want).abs();
    if d <= tol {
        Ok(d)
    } else {
        Err(format!(
            "{what}: got {got:e}, want {want:e}, |diff| {d:e} > {tol:e}"
        ))
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = body()?;
    let took = start.elapsed();
    require(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{detail}, {took:.2?}"))
}

fn c1_convergence_law() -> Outcome {
    timed(Duration::from_secs(1), || {
        let mut worst = 0.0f64;
        for eps in grid() {
            for q in 1..=8u32 {
                let d =
                    run_fixed_point_exact(&SearchConfig::new(eps, q)).map_err(|e| e.to_string())?;
                let want = eps.powi(2 * q as i32 + 1);
                worst = worst.max(within(
                    &format!("eps={eps} q={q}"),
                    d.final_failure,
                    want,
                    IDENTITY,
                )?);
            }
        }
        Ok(format!("max residual {worst:.1e}"))
    })
}

fn c2_general_r_law() -> Outcome {
    let mut worst = 0.0f64;
    for eps in grid() {
        for r in [0.25, 0.5, 0.75, 1.0] {
            for q in 1..=8u32 {
                let d = run_fixed_point_exact(&SearchConfig::new(eps, q).with_r(r))
                    .map_err(|e| e.to_string())?;
                let want = eps * (1.0 - 2.0 * r * (1.0 - eps)).powi(2 * q as i32);
                worst = worst.max(within(
                    &format!("eps={eps} r={r} q={q}"),
                    d.final_failure,
                    want,
                    IDENTITY,
                )?);
            }
        }
    }
    Ok(format!("max residual {worst:.1e}"))
}

fn c3_figure1() -> Outcome {
    let t = figure1_data(1.0 / 30.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for row in &t.rows {
        let e = row[0];
        for col in [1, 2] {
            worst = worst.max(within(
                "simple",
                row[col],
                4.0 * e * e * e - 4.0 * e * e + e,
                IDENTITY,
            )?);
        }
        for col in [3, 4] {
            worst = worst.max(within("pi/3", row[col], e * e * e, IDENTITY)?);
        }
    }
    let third = t.row_at(1.0 / 3.0).ok_or("grid lacks 1/3")?;
    within("simple at 1/3", third[2], 1.0 / 27.0, IDENTITY)?;
    within("pi/3 at 1/3", third[4], 1.0 / 27.0, IDENTITY)?;
    let half = figure1_data(0.01).map_err(|e| e.to_string())?;
    let half = half.row_at(0.5).ok_or("grid lacks 1/2")?;
    within("simple at 1/2", half[2], 0.0, IDENTITY)?;
    Ok(format!("{} rows, max residual {worst:.1e}", t.rows.len()))
}

fn c4_figure4() -> Outcome {
    let q = 4;
    let t = figure4_data(0.01, q).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for row in &t.rows {
        let e = row[0];
        // Direct sums over exit iterations.
        let mut an = 0.0;
        let mut reach = 1.0;
        for k in 1..=q {
            let p_exit = if k == 1 {
                0.5 * (1.0 - e)
            } else {
                0.5 * (1.0 + e) * (1.0 - e * e) * e.powi(2 * k as i32 - 4)
            };
            an += k as f64 * p_exit;
            reach -= p_exit;
        }
        an += q as f64 * reach;
        let cl: f64 = (0..2 * q).map(|k| e.powi(k as i32)).sum();
        worst = worst.max(within(&format!("(a) eps={e}"), row[1], an, IDENTITY)?);
        worst = worst.max(within(&format!("(a) sim eps={e}"), row[2], an, IDENTITY)?);
        worst = worst.max(within(&format!("(c) eps={e}"), row[4], cl, IDENTITY)?);
        worst = worst.max(within(&format!("(c) sim eps={e}"), row[5], cl, IDENTITY)?);
        require(row[3] == q as f64, || "(b) not constant".into())?;
        if e > 0.0 && e < 1.0 {
            require(2.0 * row[1] > row[4], || {
                format!("2 q_an <= q_cl at eps={e}")
            })?;
        }
    }
    let half = t.row_at(0.5).ok_or("grid lacks 1/2")?;
    within("q_an(0.5)", half[1], 1.984375, IDENTITY)?;
    within("q_cl(0.5)", half[4], 1.9921875, IDENTITY)?;
    within(
        "closed q_an",
        avg_queries_quantum(0.5, 0.5, 4),
        1.984375,
        IDENTITY,
    )?;
    within(
        "closed q_cl",
        avg_queries_classical(0.5, 4),
        1.9921875,
        IDENTITY,
    )?;
    Ok(format!("max residual {worst:.1e}"))
}

fn c5_success_bookkeeping() -> Outcome {
    let mut worst = 0.0f64;
    for eps in grid() {
        for q in 1..=8u32 {
            let d = run_fixed_point_exact(&SearchConfig::new(eps, q)).map_err(|e| e.to_string())?;
            let p = eps.powi(2 * q as i32 - 2);
            worst = worst.max(within(
                "sum exits",
                d.deterministic_success(),
                1.0 - p * (1.0 + eps) / 2.0,
                IDENTITY,
            )?);
            worst = worst.max(within(
                "final success",
                d.final_success,
                0.5 * p * (1.0 + eps - 2.0 * eps.powi(3)),
                IDENTITY,
            )?);
            worst = worst.max(within("total", d.total(), 1.0, IDENTITY)?);
        }
    }
    Ok(format!("max residual {worst:.1e}"))
}

fn c6_phase_pi3() -> Outcome {
    let mut worst = 0.0f64;
    for eps in grid() {
        for n in 1..=4u32 {
            let out = run_phase_pi3(eps, n).map_err(|e| e.to_string())?;
            let want = eps.powi(3i32.pow(n));
            let rel = if want == 0.0 {
                out.error_probability
            } else {
                (out.error_probability - want).abs() / want
            };
            require(rel <= CROSS, || {
                format!("eps={eps} n={n}: relative error {rel:e}")
            })?;
            worst = worst.max(rel);
        }
    }
    let queries: Vec<u64> = (1..=5)
        .map(|n| run_phase_pi3(0.5, n).unwrap().queries)
        .collect();
    require(queries == [1, 4, 13, 40, 121], || {
        format!("queries {queries:?}")
    })?;
    require(pi3_query_sequence(5) == [1, 4, 13, 40, 121], || {
        "sequence".into()
    })?;
    Ok(format!(
        "max relative error {worst:.1e}, queries {queries:?}"
    ))
}

fn c7_scale_factor() -> Outcome {
    let phases: Vec<f64> = (1..=12).map(|k| k as f64 * PI / 6.0).collect();
    let mut worst = 0.0f64;
    for &a in &phases {
        for &b in &phases {
            for eps in grid().into_iter().skip(1) {
                let c = general_phase_scale_check(a, b, eps).map_err(|e| e.to_string())?;
                worst = worst.max(within(
                    &format!("theta={a} phi={b} eps={eps}"),
                    c.simulated,
                    c.formula,
                    IDENTITY,
                )?);
            }
        }
    }
    for eps in grid().into_iter().skip(1) {
        let c = general_phase_scale_check(PI / 3.0, PI / 3.0, eps).map_err(|e| e.to_string())?;
        worst = worst.max(within("pi/3 factor", c.simulated, eps, IDENTITY)?);
    }
    Ok(format!("max residual {worst:.1e}"))
}

fn c8_deferred() -> Outcome {
    let mut worst = 0.0f64;
    for eps in grid() {
        for q in 1..=6u32 {
            let cfg = SearchConfig::new(eps, q);
            let a = run_deferred_measurement(&cfg).map_err(|e| e.to_string())?;
            let b = run_fixed_point_exact(&cfg).map_err(|e| e.to_string())?;
            worst = worst.max(within(
                &format!("eps={eps} q={q}"),
                a.max_abs_diff(&b),
                0.0,
                CROSS,
            )?);
        }
    }
    Ok(format!("max residual {worst:.1e}"))
}

fn c9_database() -> Outcome {
    let (mut lock, mut perm) = (0.0f64, 0.0f64);
    for n in [4usize, 8, 16] {
        for m in 0..=n {
            let first = DatabaseSpec::new(n, (0..m).collect()).map_err(|e| e.to_string())?;
            for q in [1, 3, 5] {
                lock = lock.max(within(
                    "lockstep",
                    lockstep_residual(&first, 0.5, q).map_err(|e| e.to_string())?,
                    0.0,
                    CROSS,
                )?);
            }
            let base = run_fixed_point_full_exact(&first, 4, 0.5).map_err(|e| e.to_string())?;
            for seed in 0..4 {
                let other = DatabaseSpec::random(n, m, seed).map_err(|e| e.to_string())?;
                let d = run_fixed_point_full_exact(&other, 4, 0.5).map_err(|e| e.to_string())?;
                perm = perm.max(within(
                    &format!("n={n} m={m}"),
                    d.max_abs_diff(&base),
                    0.0,
                    IDENTITY,
                )?);
            }
        }
    }
    Ok(format!("lockstep {lock:.1e}, permutation {perm:.1e}"))
}

fn c10_monte_carlo() -> Outcome {
    timed(Duration::from_secs(10), || {
        let cfg = SearchConfig::new(0.5, 4).with_seed(2024);
        let s = monte_carlo_summary(&cfg, 100_000).map_err(|e| e.to_string())?;
        let p = 1.0 - 0.5f64.powi(9);
        let dev_p = (s.success_rate - p).abs() / s.success_stderr.max(f64::MIN_POSITIVE);
        let dev_q = (s.mean_queries - 1.984375).abs() / s.queries_stderr;
        require(dev_p <= 4.0, || {
            format!("success rate {} is {dev_p:.2} sigma off", s.success_rate)
        })?;
        require(dev_q <= 4.0, || {
            format!("mean queries {} is {dev_q:.2} sigma off", s.mean_queries)
        })?;
        Ok(format!(
            "success {dev_p:.2} sigma, queries {dev_q:.2} sigma"
        ))
    })
}

fn c11_planner() -> Outcome {
    let plan = plan_queries(0.5, 1e-4).map_err(|e| e.to_string())?;
    let got = (plan.q_an, plan.q_pi3, plan.q_cl);
    require(got == (7, 13, 13), || format!("got {got:?}"))?;
    let (u, t) = (0.5f64, 1e-4);
    let an = |q: u64| u.powi(2 * q as i32 + 1) <= t;
    let cl = |q: u64| u.powi(q as i32 + 1) <= t;
    let pi3 = |n: u32| u.powi(3i32.pow(n)) <= t;
    require(an(7) && !an(6), || "q_an not minimal".into())?;
    require(cl(13) && !cl(12), || "q_cl not minimal".into())?;
    let n = (1..20)
        .find(|&n| (3u64.pow(n) - 1) / 2 == plan.q_pi3)
        .ok_or("q_pi3 not of the form (3^n-1)/2")?;
    require(pi3(n) && !pi3(n - 1), || "q_pi3 not minimal".into())?;
    Ok(format!("{got:?}"))
}

fn c12_crossover() -> Outcome {
    let mut worst = 0.0f64;
    let mut roots = Vec::new();
    for q in 2..=8u32 {
        let x = crossover_epsilon_a(q).map_err(|e| e.to_string())?;
        let g = 2.0 * x + x.powi(2 * q as i32 - 2) - 2.0 * x.powi(2 * q as i32) - 1.0;
        worst = worst.max(within(&format!("q={q}"), g, 0.0, 1e-12)?);
        require(x > 0.0 && x < 0.5, || {
            format!("q={q}: root {x} outside (0, 1/2)")
        })?;
        roots.push(format!("{x:.6}"));
    }
    Ok(format!(
        "max residual {worst:.1e}, roots {}",
        roots.join(" ")
    ))
}

fn c13_avoided() -> Outcome {
    let mut worst = 0.0f64;
    for eps in grid() {
        for q in 1..=8u32 {
            let cfg = SearchConfig::new(eps, q).with_variant(Variant::AvoidedTarget);
            require(cfg.variant.good_outcome() == Reg::NonTarget, || {
                "good outcome".into()
            })?;
            let d = run_fixed_point_exact(&cfg).map_err(|e| e.to_string())?;
            worst = worst.max(within(
                &format!("eps={eps} q={q}"),
                d.final_failure,
                (1.0 - eps).powi(2 * q as i32 + 1),
                IDENTITY,
            )?);
        }
    }
    Ok(format!("max residual {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("convergence law", c1_convergence_law),
        ("general-r law", c2_general_r_law),
        ("figure 1 table", c3_figure1),
        ("figure 4 table", c4_figure4),
        ("success bookkeeping", c5_success_bookkeeping),
        ("phase pi/3 recursion", c6_phase_pi3),
        ("phase scale factor", c7_scale_factor),
        ("deferred measurement", c8_deferred),
        ("database equivalence", c9_database),
        ("monte carlo", c10_monte_carlo),
        ("planner", c11_planner),
        ("crossover root", c12_crossover),
        ("avoided target", c13_avoided),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
