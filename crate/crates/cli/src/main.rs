use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use fpqs_core::analytics::{crossover_epsilon_a, plan_queries};
use fpqs_core::experiments::{
    figure1_data, figure4_data, format_number, monte_carlo_summary, scaling_scan,
    verification_matrix,
};
use fpqs_core::{
    run_fixed_point_exact, run_fixed_point_full_exact, run_fixed_point_full_sampled, DatabaseSpec,
    Error, OutcomeDistribution, SearchConfig, Variant,
};

/// Simulator for measurement-driven fixed point quantum search.
#[derive(Debug, Parser)]
#[command(name = "fpqs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact outcome distribution of the reduced search.
    Exact(ExactArgs),
    /// Seeded Monte Carlo run of the reduced search.
    Sample(SampleArgs),
    /// Error after one query vs epsilon: simple scheme and Phase-π/3.
    Figure1(FigureArgs),
    /// Average query counts vs epsilon.
    Figure4 {
        #[command(flatten)]
        figure: FigureArgs,
        #[arg(long, default_value_t = 4)]
        q: u32,
    },
    /// Minimal query counts for a target error bound.
    Plan {
        #[arg(long)]
        eps_up: f64,
        #[arg(long)]
        eps_th: f64,
    },
    /// Epsilon below which the classical baseline needs fewer queries.
    Crossover {
        #[arg(long)]
        q: u32,
    },
    /// Queries needed to reach error 1/e for small marked fractions.
    Scaling {
        /// Comma-separated marked fractions in (0, 0.1].
        #[arg(long, value_delimiter = ',', required = true)]
        f_list: Vec<f64>,
    },
    /// Recompute every closed form by simulation and report residuals.
    Verify,
    /// Full-database simulation.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long)]
    q: u32,
    /// Steer the register away from the target.
    #[arg(long)]
    avoided: bool,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    exact: ExactArgs,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Number of items, a power of two.
    #[arg(long)]
    n: usize,
    /// Comma-separated marked item indices.
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "m",
        required_unless_present = "m"
    )]
    marked: Option<Vec<usize>>,
    /// Number of marked items chosen at random with `--seed`.
    #[arg(long, requires = "seed")]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    q: u32,
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    /// Also sample this many trajectories (needs `--seed`).
    #[arg(long, requires = "seed")]
    trials: Option<u64>,
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Mismatch { .. } => Failure::Mismatch(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Out<'a> = &'a mut dyn Write;

fn line(out: Out, key: &str, value: f64) -> io::Result<()> {
    writeln!(out, "{key} = {}", format_number(value))
}

fn print_distribution(out: Out, d: &OutcomeDistribution) -> io::Result<()> {
    for (k, p) in d.exit_success.iter().enumerate() {
        line(out, &format!("exit_success[{}]", k + 1), *p)?;
    }
    line(out, "deterministic_success", d.deterministic_success())?;
    line(out, "final_success", d.final_success)?;
    line(out, "final_failure", d.final_failure)?;
    line(out, "expected_queries", d.expected_queries)?;
    line(out, "total", d.total())
}

fn config(a: &ExactArgs) -> SearchConfig {
    let variant = if a.avoided {
        Variant::AvoidedTarget
    } else {
        Variant::Standard
    };
    SearchConfig::new(a.epsilon, a.q)
        .with_r(a.r)
        .with_variant(variant)
}

fn write_csv(path: &Option<PathBuf>, csv: &str, out: Out) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, csv).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(csv.as_bytes())?),
    }
}

fn execute(cmd: Command, out: Out) -> Result<(), Failure> {
    match cmd {
        Command::Exact(a) => {
            let d = run_fixed_point_exact(&config(&a))?;
            print_distribution(out, &d)?;
        }
        Command::Sample(a) => {
            let cfg = config(&a.exact).with_seed(a.seed);
            let s = monte_carlo_summary(&cfg, a.trials)?;
            writeln!(out, "trials = {}", s.trials)?;
            writeln!(out, "seed = {}", a.seed)?;
            line(out, "success_rate", s.success_rate)?;
            line(out, "success_stderr", s.success_stderr)?;
            line(out, "mean_queries", s.mean_queries)?;
            line(out, "queries_stderr", s.queries_stderr)?;
        }
        Command::Figure1(f) => write_csv(&f.out, &figure1_data(f.step)?.to_csv(), out)?,
        Command::Figure4 { figure, q } => {
            write_csv(&figure.out, &figure4_data(figure.step, q)?.to_csv(), out)?
        }
        Command::Plan { eps_up, eps_th } => {
            let p = plan_queries(eps_up, eps_th)?;
            writeln!(out, "q_an={} q_pi3={} q_cl={}", p.q_an, p.q_pi3, p.q_cl)?;
        }
        Command::Crossover { q } => line(out, "epsilon_a", crossover_epsilon_a(q)?)?,
        Command::Scaling { f_list } => {
            writeln!(out, "f,q_needed,q_times_f")?;
            for row in scaling_scan(&f_list)? {
                writeln!(
                    out,
                    "{},{},{}",
                    format_number(row.f),
                    row.q_needed,
                    format_number(row.q_times_f)
                )?;
            }
        }
        Command::Verify => {
            let report = verification_matrix()?;
            for e in &report.entries {
                let verdict = if e.passed() { "ok" } else { "MISMATCH" };
                writeln!(
                    out,
                    "{:<26} {:>10} (tol {}) {verdict}",
                    e.name,
                    format_number(e.max_residual),
                    format_number(e.tolerance)
                )?;
            }
            line(out, "max residual", report.max_residual())?;
            if !report.passed() {
                return Err(Failure::Mismatch(
                    "verification matrix has failing entries".into(),
                ));
            }
        }
        Command::Run(a) => run_database(a, out)?,
    }
    Ok(())
}

fn run_database(a: RunArgs, out: Out) -> Result<(), Failure> {
    let spec = match (a.marked, a.m, a.seed) {
        (Some(list), _, _) => DatabaseSpec::new(a.n, list)?,
        (None, Some(m), Some(seed)) => DatabaseSpec::random(a.n, m, seed)?,
        _ => {
            return Err(Failure::Usage(
                "either --marked or --m with --seed is required".into(),
            ))
        }
    };
    writeln!(out, "n = {}", spec.n_items())?;
    writeln!(out, "marked = {}", spec.marked().len())?;
    line(out, "epsilon", spec.epsilon())?;
    match run_fixed_point_full_exact(&spec, a.q, a.r) {
        Ok(d) => print_distribution(out, &d)?,
        // Too large for the exact branch tree; sampling may still work.
        Err(Error::ResourceLimit { .. }) if a.trials.is_some() => {}
        Err(e) => return Err(e.into()),
    }
    if let (Some(trials), Some(seed)) = (a.trials, a.seed) {
        let runs = run_fixed_point_full_sampled(&spec, a.q, a.r, trials, seed)?;
        let n = runs.len() as f64;
        writeln!(out, "trials = {trials}")?;
        line(
            out,
            "sampled_success_rate",
            runs.iter().filter(|r| r.success).count() as f64 / n,
        )?;
        line(
            out,
            "sampled_mean_queries",
            runs.iter().map(|r| r.queries_used as f64).sum::<f64>() / n,
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("verification mismatch: {msg}");
            ExitCode::from(2)
        }
    }
}
