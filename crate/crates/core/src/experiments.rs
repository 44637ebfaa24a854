//! Figure tables, Monte Carlo summaries, the `q = O(1/f)` scaling scan and
//! the closed-form versus simulation verification matrix.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::algorithms::{
    general_phase_scale_check, run_classical_exact, run_deferred_measurement,
    run_fixed_point_exact, run_fixed_point_sampled, run_phase_pi3, run_simple_scheme, SearchConfig,
    Variant,
};
use crate::analytics::{
    avg_queries_classical, avg_queries_quantum, deterministic_success,
    deterministic_success_general, error_after, probabilistic_success,
};
use crate::database::{reduce_state, run_fixed_point_full_exact, DatabaseSpec, FullState};
use crate::error::{Error, Result};
use crate::statespace::{
    joint_diffusion, measure_ancilla2, oracle_query, prepare_initial, ProblemAngles,
    CROSS_CHECK_TOL, IDENTITY_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Grid,
    ClosedForm,
    ExactSim,
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub provenance: Provenance,
}

impl Column {
    fn new(name: &str, provenance: Provenance) -> Self {
        Column {
            name: name.to_string(),
            provenance,
        }
    }
}

/// Rows indexed by an ascending `ε` grid in column 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Row whose grid value equals `epsilon` exactly.
    pub fn row_at(&self, epsilon: f64) -> Option<&[f64]> {
        self.rows
            .iter()
            .find(|r| r[0] == epsilon)
            .map(|r| r.as_slice())
    }

    /// Header plus one line per row, `,`-separated, `\n`-terminated, numbers
    /// via [`format_number`].
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros removed,
/// exponent form outside `[1e-4, 1e12)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan"
        } else if x > 0.0 {
            "inf"
        } else {
            "-inf"
        }
        .to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Uniform grid `i/n` on `[0, 1]`, `n = 1/step`. The step must divide 1.
pub fn epsilon_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::Domain {
            name: "grid_step",
            value: step,
            range: "(0, 0.1]",
        });
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(Error::Domain {
            name: "grid_step",
            value: step,
            range: "1/step must be an integer",
        });
    }
    let n = n as u32;
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

fn check_pair(what: &str, epsilon: f64, closed: f64, sim: f64) -> Result<()> {
    let residual = (closed - sim).abs();
    if residual > CROSS_CHECK_TOL {
        return Err(Error::Mismatch {
            what: format!("{what} at epsilon = {epsilon}"),
            residual,
        });
    }
    Ok(())
}

/// Error after one query: simple scheme `4ε³ − 4ε² + ε` and Phase-π/3 `ε³`,
/// each as closed form and exact simulation.
pub fn figure1_data(grid_step: f64) -> Result<SweepTable> {
    let grid = epsilon_grid(grid_step)?;
    let rows = grid
        .par_iter()
        .map(|&eps| {
            let simple_closed = 4.0 * eps.powi(3) - 4.0 * eps * eps + eps;
            let simple_sim = run_simple_scheme(eps, 1)?.error_probability;
            let pi3_closed = eps.powi(3);
            let pi3_sim = run_phase_pi3(eps, 1)?.error_probability;
            check_pair("simple scheme", eps, simple_closed, simple_sim)?;
            check_pair("phase pi/3", eps, pi3_closed, pi3_sim)?;
            Ok(vec![eps, simple_closed, simple_sim, pi3_closed, pi3_sim])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        columns: vec![
            Column::new("epsilon", Provenance::Grid),
            Column::new("simple_closed", Provenance::ClosedForm),
            Column::new("simple_exact", Provenance::ExactSim),
            Column::new("pi3_closed", Provenance::ClosedForm),
            Column::new("pi3_exact", Provenance::ExactSim),
        ],
        rows,
    })
}

/// Average query counts for `q` iterations: the fixed point search, the
/// Phase-π/3 search (always exactly `q`), and the classical baseline run for
/// `2q` iterations.
pub fn figure4_data(grid_step: f64, q: u32) -> Result<SweepTable> {
    if q < 2 {
        return Err(Error::Domain {
            name: "q",
            value: q as f64,
            range: "q >= 2",
        });
    }
    let grid = epsilon_grid(grid_step)?;
    let rows = grid
        .par_iter()
        .map(|&eps| {
            let an_closed = avg_queries_quantum(eps, 0.5, q);
            let an_sim = run_fixed_point_exact(&SearchConfig::new(eps, q))?.expected_queries;
            let cl_closed = avg_queries_classical(eps, q);
            let cl_sim = run_classical_exact(eps, 2 * q)?.expected_queries;
            check_pair("fixed point average queries", eps, an_closed, an_sim)?;
            check_pair("classical average queries", eps, cl_closed, cl_sim)?;
            Ok(vec![eps, an_closed, an_sim, q as f64, cl_closed, cl_sim])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        columns: vec![
            Column::new("epsilon", Provenance::Grid),
            Column::new("fixed_point_closed", Provenance::ClosedForm),
            Column::new("fixed_point_exact", Provenance::ExactSim),
            Column::new("pi3", Provenance::ClosedForm),
            Column::new("classical_closed", Provenance::ClosedForm),
            Column::new("classical_exact", Provenance::ExactSim),
        ],
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub mean_queries: f64,
    pub queries_stderr: f64,
    pub success_rate: f64,
    pub success_stderr: f64,
}

fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone, n: u64) -> (f64, f64) {
    let n_f = n as f64;
    let mean = values.clone().sum::<f64>() / n_f;
    let var = values.map(|x| (x - mean).powi(2)).sum::<f64>() / (n_f - 1.0);
    (mean, (var / n_f).sqrt())
}

pub fn monte_carlo_summary(cfg: &SearchConfig, trials: u64) -> Result<MonteCarloSummary> {
    if trials < 100 {
        return Err(Error::Domain {
            name: "trials",
            value: trials as f64,
            range: "trials >= 100",
        });
    }
    let records = run_fixed_point_sampled(cfg, trials)?;
    let (mean_queries, queries_stderr) =
        mean_and_stderr(records.iter().map(|r| r.queries_used as f64), trials);
    let (success_rate, success_stderr) = mean_and_stderr(
        records.iter().map(|r| if r.success { 1.0 } else { 0.0 }),
        trials,
    );
    Ok(MonteCarloSummary {
        trials,
        mean_queries,
        queries_stderr,
        success_rate,
        success_stderr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub f: f64,
    pub q_needed: u64,
    pub q_times_f: f64,
}

/// Smallest `q ≥ 1` with `(1 − f)^{2q+1} ≤ e⁻¹`.
pub fn q_needed(f: f64) -> u64 {
    let target = (-1.0f64).exp();
    let ok = |q: u64| (1.0 - f).powi((2 * q + 1) as i32) <= target;
    let mut q = ((-1.0 / (1.0 - f).ln() - 1.0) / 2.0).ceil().max(1.0) as u64;
    while q > 1 && ok(q - 1) {
        q -= 1;
    }
    while !ok(q) {
        q += 1;
    }
    q
}

pub fn scaling_scan(f_values: &[f64]) -> Result<Vec<ScalingRow>> {
    f_values
        .iter()
        .map(|&f| {
            if !(f > 0.0 && f <= 0.1) {
                return Err(Error::Domain {
                    name: "f",
                    value: f,
                    range: "(0, 0.1]",
                });
            }
            let q = q_needed(f);
            Ok(ScalingRow {
                f,
                q_needed: q,
                q_times_f: q as f64 * f,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationEntry {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl VerificationEntry {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub entries: Vec<VerificationEntry>,
}

impl VerificationReport {
    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(VerificationEntry::passed)
    }
}

/// `ε ∈ {0, 0.05, …, 1}`.
pub fn standard_epsilon_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

pub const STANDARD_R_VALUES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

struct Tracker(f64);

impl Tracker {
    fn see(&mut self, a: f64, b: f64) {
        let d = (a - b).abs();
        self.0 = if d.is_nan() {
            f64::INFINITY
        } else {
            self.0.max(d)
        };
    }
}

fn entry(
    name: &'static str,
    tolerance: f64,
    body: impl FnOnce(&mut Tracker) -> Result<()>,
) -> Result<VerificationEntry> {
    let mut t = Tracker(0.0);
    body(&mut t)?;
    Ok(VerificationEntry {
        name,
        max_residual: t.0,
        tolerance,
    })
}

/// Recomputes every closed form by exact simulation across the standard
/// `ε × r × q` grid and reports the largest residual per family.
pub fn verification_matrix() -> Result<VerificationReport> {
    let grid = standard_epsilon_grid();
    let mut entries = Vec::new();

    entries.push(entry("error law (general r)", IDENTITY_TOL, |t| {
        for &eps in &grid {
            for r in STANDARD_R_VALUES {
                for q in 1..=8 {
                    let d = run_fixed_point_exact(&SearchConfig::new(eps, q).with_r(r))?;
                    t.see(d.final_failure, error_after(eps, r, q));
                    t.see(d.total(), 1.0);
                }
            }
        }
        Ok(())
    })?);

    entries.push(entry("success split", IDENTITY_TOL, |t| {
        for &eps in &grid {
            for q in 1..=8 {
                let d = run_fixed_point_exact(&SearchConfig::new(eps, q))?;
                t.see(d.deterministic_success(), deterministic_success(eps, q));
                t.see(d.final_success, probabilistic_success(eps, q));
                for r in STANDARD_R_VALUES {
                    let d = run_fixed_point_exact(&SearchConfig::new(eps, q).with_r(r))?;
                    t.see(
                        d.deterministic_success(),
                        deterministic_success_general(eps, r, q),
                    );
                }
            }
        }
        Ok(())
    })?);

    entries.push(entry("average queries", CROSS_CHECK_TOL, |t| {
        for &eps in &grid {
            for r in STANDARD_R_VALUES {
                for q in 1..=8 {
                    let d = run_fixed_point_exact(&SearchConfig::new(eps, q).with_r(r))?;
                    t.see(d.expected_queries, avg_queries_quantum(eps, r, q));
                }
            }
            for q in 1..=8 {
                let d = run_classical_exact(eps, 2 * q)?;
                t.see(d.expected_queries, avg_queries_classical(eps, q));
            }
        }
        Ok(())
    })?);

    entries.push(entry("avoided target", IDENTITY_TOL, |t| {
        for &eps in &grid {
            for q in 1..=8 {
                let cfg = SearchConfig::new(eps, q).with_variant(Variant::AvoidedTarget);
                let d = run_fixed_point_exact(&cfg)?;
                t.see(d.final_failure, (1.0 - eps).powi(2 * q as i32 + 1));
            }
        }
        Ok(())
    })?);

    entries.push(entry("simple scheme", IDENTITY_TOL, |t| {
        for &eps in &grid {
            for n in 1..=8 {
                let s = run_simple_scheme(eps, n)?;
                let d = run_fixed_point_exact(&SearchConfig::new(eps, n).with_r(1.0))?;
                t.see(s.error_probability, d.final_failure);
                t.see(
                    s.error_probability,
                    eps * (2.0 * eps - 1.0).powi(2 * n as i32),
                );
                for (a, b) in s.exit_profile.iter().zip(&d.exit_success) {
                    t.see(*a, *b);
                }
            }
        }
        Ok(())
    })?);

    entries.push(entry("deferred measurement", CROSS_CHECK_TOL, |t| {
        for &eps in &grid {
            for q in 1..=6 {
                let cfg = SearchConfig::new(eps, q);
                let a = run_deferred_measurement(&cfg)?;
                let b = run_fixed_point_exact(&cfg)?;
                t.see(a.max_abs_diff(&b), 0.0);
            }
        }
        Ok(())
    })?);

    entries.push(entry("phase pi/3 (relative)", CROSS_CHECK_TOL, |t| {
        for &eps in &grid {
            for n in 1..=4 {
                let got = run_phase_pi3(eps, n)?.error_probability;
                let want = eps.powi(3i32.pow(n));
                if want == 0.0 {
                    t.see(got, 0.0);
                } else {
                    t.see(got / want, 1.0);
                }
            }
        }
        Ok(())
    })?);

    entries.push(entry("phase scale factor", IDENTITY_TOL, |t| {
        let phases = [PI / 6.0, PI / 3.0, PI / 2.0, PI];
        for a in phases {
            for b in phases {
                for eps in [0.1, 0.5, 0.9] {
                    let c = general_phase_scale_check(a, b, eps)?;
                    t.see(c.simulated, c.formula);
                }
            }
        }
        Ok(())
    })?);

    entries.push(entry("database lockstep", CROSS_CHECK_TOL, |t| {
        for n in [4usize, 8, 16] {
            for m in 0..=n {
                let spec = DatabaseSpec::new(n, (0..m).collect())?;
                t.see(lockstep_residual(&spec, 0.5, 4)?, 0.0);
            }
        }
        Ok(())
    })?);

    entries.push(entry("database distribution", CROSS_CHECK_TOL, |t| {
        for n in [4usize, 8, 16] {
            for m in 0..=n {
                let spec = DatabaseSpec::new(n, (0..m).collect())?;
                for r in STANDARD_R_VALUES {
                    let full = run_fixed_point_full_exact(&spec, 3, r)?;
                    let reduced =
                        run_fixed_point_exact(&SearchConfig::new(spec.epsilon(), 3).with_r(r))?;
                    t.see(full.max_abs_diff(&reduced), 0.0);
                }
            }
        }
        Ok(())
    })?);

    entries.push(entry("figure tables", CROSS_CHECK_TOL, |_| {
        figure1_data(0.01)?;
        figure4_data(0.01, 4)?;
        Ok(())
    })?);

    Ok(VerificationReport { entries })
}

/// Runs the full-state and reduced simulations side by side for `q`
/// iterations (always following the outcome-0 branch) and returns the
/// largest reduced-state difference seen after any gate or collapse.
pub fn lockstep_residual(spec: &DatabaseSpec, r: f64, q: u32) -> Result<f64> {
    let angles = ProblemAngles::new(spec.epsilon(), r)?;
    let mut full = FullState::initial(spec, r)?;
    let mut reduced = prepare_initial(spec.epsilon(), r)?;
    let mut worst = reduce_state(&full, spec)?.state.max_abs_diff(&reduced);
    for _ in 0..q {
        full.apply_oracle(spec);
        reduced = oracle_query(&reduced, false);
        worst = worst.max(reduce_state(&full, spec)?.state.max_abs_diff(&reduced));

        let fm = full.measure_ancilla2();
        let rm = measure_ancilla2(&reduced);
        worst = worst.max((fm.p_one - rm.p_one).abs());
        match (fm.if_zero, rm.if_zero) {
            (Some(f), Some(s)) => {
                full = f;
                reduced = s;
            }
            (None, None) => return Ok(worst),
            _ => return Ok(f64::INFINITY),
        }
        worst = worst.max(reduce_state(&full, spec)?.state.max_abs_diff(&reduced));

        full.apply_diffusion(r);
        reduced = joint_diffusion(&reduced, &angles);
        worst = worst.max(reduce_state(&full, spec)?.state.max_abs_diff(&reduced));
    }
    Ok(worst)
}
