//! Search algorithms: the two-ancilla measurement-driven fixed point search,
//! its unitary deferred-measurement form, the single-ancilla simple scheme,
//! the recursive Phase-π/3 search and the classical random-pick baseline.
//!
//! Every algorithm has an exact evaluator that walks the measurement branch
//! tree. The fixed point search and the classical baseline also have a seeded
//! sampler that draws individual trajectories.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_probability, Error, Result};
use crate::statespace::{
    joint_diffusion, measure_ancilla2, oracle_query, prepare_from, register_phase_t,
    register_u_from, ProblemAngles, Reg, RegisterMatrix,
};

/// Largest iteration count accepted by [`run_deferred_measurement`].
pub const MAX_DEFERRED_Q: u32 = 12;
/// Largest recursion depth accepted by [`run_phase_pi3`].
pub const MAX_PI3_LEVELS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Oracle marks `|1⟩|t⟩`; `ε = 0` is the fixed point.
    #[default]
    Standard,
    /// Oracle marks `|1⟩|t⊥⟩`; `ε = 1` is the fixed point and `|t⟩` is avoided.
    AvoidedTarget,
    /// Standard oracle, evaluated as one unitary circuit with a fresh
    /// ancilla-2 per iteration and a single measurement at the end.
    DeferredMeasurement,
}

impl Variant {
    fn avoided(self) -> bool {
        matches!(self, Variant::AvoidedTarget)
    }

    /// Register outcome counted as success.
    pub fn good_outcome(self) -> Reg {
        if self.avoided() {
            Reg::NonTarget
        } else {
            Reg::Target
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub epsilon: f64,
    pub r: f64,
    pub q: u32,
    pub variant: Variant,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(epsilon: f64, q: u32) -> Self {
        SearchConfig {
            epsilon,
            r: 0.5,
            q,
            variant: Variant::Standard,
            seed: 0,
        }
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn angles(&self) -> Result<ProblemAngles> {
        if self.q == 0 {
            return Err(Error::Domain {
                name: "q",
                value: 0.0,
                range: "q >= 1",
            });
        }
        ProblemAngles::new(self.epsilon, self.r)
    }
}

/// Exact distribution over the ways a run can end.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    /// `exit_success[k - 1]`: probability of leaving the loop at iteration `k`
    /// with a certain answer.
    pub exit_success: Vec<f64>,
    /// Final register measurement gives a good outcome.
    pub final_success: f64,
    /// Final register measurement gives a bad outcome; the run's total error.
    pub final_failure: f64,
    pub expected_queries: f64,
}

impl OutcomeDistribution {
    pub(crate) fn assemble(exit_success: Vec<f64>, final_success: f64, final_failure: f64) -> Self {
        let q = exit_success.len() as f64;
        let expected_queries = exit_success
            .iter()
            .enumerate()
            .map(|(k, p)| (k + 1) as f64 * p)
            .sum::<f64>()
            + q * (final_success + final_failure);
        OutcomeDistribution {
            exit_success,
            final_success,
            final_failure,
            expected_queries,
        }
    }

    /// Total probability of a certain (measurement-heralded) answer.
    pub fn deterministic_success(&self) -> f64 {
        self.exit_success.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.deterministic_success() + self.final_success + self.final_failure
    }

    /// Largest componentwise difference; distributions of different lengths
    /// differ by infinity.
    pub fn max_abs_diff(&self, other: &OutcomeDistribution) -> f64 {
        if self.exit_success.len() != other.exit_success.len() {
            return f64::INFINITY;
        }
        self.exit_success
            .iter()
            .zip(&other.exit_success)
            .map(|(a, b)| (a - b).abs())
            .chain([
                (self.final_success - other.final_success).abs(),
                (self.final_failure - other.final_failure).abs(),
                (self.expected_queries - other.expected_queries).abs(),
            ])
            .fold(0.0, f64::max)
    }
}

/// One sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunRecord {
    pub success: bool,
    pub queries_used: u32,
    /// Iteration at which the loop was left with a certain answer; `None` if
    /// the run reached the final register measurement.
    pub exit_iteration: Option<u32>,
}

/// Generator for trial `trial` of a sampled experiment. Independent of the
/// order in which trials are evaluated.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub(crate) fn sample_trials<F>(trials: u64, seed: u64, trial: F) -> Vec<RunRecord>
where
    F: Fn(&mut ChaCha8Rng) -> RunRecord + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut trial_rng(seed, t)))
        .collect()
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::Domain {
            name: "trials",
            value: 0.0,
            range: "trials >= 1",
        });
    }
    Ok(())
}

/// Exact branch-tree evaluation of the two-ancilla fixed point search.
pub fn run_fixed_point_exact(cfg: &SearchConfig) -> Result<OutcomeDistribution> {
    if cfg.variant == Variant::DeferredMeasurement {
        return Err(Error::UnsupportedVariant(cfg.variant));
    }
    let angles = cfg.angles()?;
    let avoided = cfg.variant.avoided();

    let mut exits = vec![0.0; cfg.q as usize];
    let mut state = prepare_from(&angles);
    // Probability of still being inside the loop.
    let mut reach = 1.0;
    for exit in exits.iter_mut() {
        let m = measure_ancilla2(&oracle_query(&state, avoided));
        *exit = reach * m.p_one;
        reach *= m.p_zero;
        match m.if_zero {
            Some(s) => state = joint_diffusion(&s, &angles),
            None => {
                reach = 0.0;
                break;
            }
        }
    }
    let good = cfg.variant.good_outcome();
    Ok(OutcomeDistribution::assemble(
        exits,
        reach * state.register_probability(good),
        reach * state.register_probability(good.other()),
    ))
}

/// Draws `trials` independent trajectories of the fixed point search.
pub fn run_fixed_point_sampled(cfg: &SearchConfig, trials: u64) -> Result<Vec<RunRecord>> {
    if cfg.variant == Variant::DeferredMeasurement {
        return Err(Error::UnsupportedVariant(cfg.variant));
    }
    let angles = cfg.angles()?;
    check_trials(trials)?;
    let avoided = cfg.variant.avoided();
    let good = cfg.variant.good_outcome();
    let initial = prepare_from(&angles);
    let q = cfg.q;

    Ok(sample_trials(trials, cfg.seed, |rng| {
        let mut state = initial;
        for k in 1..=q {
            let m = measure_ancilla2(&oracle_query(&state, avoided));
            let u: f64 = rng.random();
            match m.if_zero {
                Some(s) if u >= m.p_one => state = joint_diffusion(&s, &angles),
                _ => {
                    return RunRecord {
                        success: true,
                        queries_used: k,
                        exit_iteration: Some(k),
                    }
                }
            }
        }
        let u: f64 = rng.random();
        RunRecord {
            success: u < state.register_probability(good),
            queries_used: q,
            exit_iteration: None,
        }
    }))
}

/// Fully unitary version with one ancilla-2 qubit per iteration.
///
/// The state is `4 · 2^q` amplitudes at index `mask * 4 + a1 * 2 + reg`,
/// where bit `k - 1` of `mask` is the ancilla-2 written by iteration `k`.
/// Iteration `k` (oracle and diffusion) acts only on the `mask` sector whose
/// bits `0..k-1` are clear. All qubits are measured once at the end and the
/// first set ancilla bit is read as the exit iteration.
pub fn run_deferred_measurement(cfg: &SearchConfig) -> Result<OutcomeDistribution> {
    let angles = cfg.angles()?;
    if cfg.q > MAX_DEFERRED_Q {
        return Err(Error::ResourceLimit {
            what: "q",
            value: cfg.q as u64,
            limit: MAX_DEFERRED_Q as u64,
        });
    }
    let q = cfg.q as usize;
    // Joint index a1 * 2 + reg of the oracle-marked direction.
    let marked = 2 + cfg.variant.good_outcome() as usize;
    let v = angles.joint_source();

    let mut amp = vec![Complex64::new(0.0, 0.0); 4 << q];
    for (j, x) in v.iter().enumerate() {
        amp[j] = Complex64::new(*x, 0.0);
    }

    for k in 0..q {
        let bit = 1usize << k;
        let earlier = bit - 1;
        // Oracle: controlled on a1 = 1, marked register state and all earlier
        // ancillas clear; flips ancilla k.
        for mask in 0..(1usize << q) {
            if mask & (earlier | bit) == 0 {
                amp.swap(mask * 4 + marked, (mask | bit) * 4 + marked);
            }
        }
        // Diffusion on the sector where ancillas 0..=k are clear.
        for mask in 0..(1usize << q) {
            if mask & (earlier | bit) == 0 {
                let block = &mut amp[mask * 4..mask * 4 + 4];
                let overlap: Complex64 = block.iter().zip(&v).map(|(a, x)| a * x).sum();
                for (a, x) in block.iter_mut().zip(&v) {
                    *a = overlap * (2.0 * x) - *a;
                }
            }
        }
    }

    let mut exits = vec![0.0; q];
    let good = cfg.variant.good_outcome() as usize;
    let (mut success, mut failure) = (0.0, 0.0);
    for mask in 0..(1usize << q) {
        let block = &amp[mask * 4..mask * 4 + 4];
        if mask == 0 {
            for (j, a) in block.iter().enumerate() {
                if j % 2 == good {
                    success += a.norm_sqr();
                } else {
                    failure += a.norm_sqr();
                }
            }
        } else {
            let first = mask.trailing_zeros() as usize;
            exits[first] += block.iter().map(|a| a.norm_sqr()).sum::<f64>();
        }
    }
    Ok(OutcomeDistribution::assemble(exits, success, failure))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimpleSchemeOutcome {
    pub error_probability: f64,
    pub exit_profile: Vec<f64>,
}

/// Single-ancilla scheme: oracle flips the ancilla on `|t⟩`, measure it, and
/// on outcome 0 reflect the register about `U|s⟩`.
///
/// Runs on the bare register with [`RegisterMatrix`] algebra, independently
/// of the joint-space code path.
pub fn run_simple_scheme(epsilon: f64, n: u32) -> Result<SimpleSchemeOutcome> {
    check_probability("epsilon", epsilon)?;
    let u = register_u_from((1.0 - epsilon).sqrt(), epsilon.sqrt());
    // 2|Us⟩⟨Us| − I = U diag(1, −1) U†.
    let reflect = u
        .mul(&RegisterMatrix::diag(
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ))
        .mul(&u.adjoint());

    let mut psi = u.apply([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let mut reach = 1.0;
    let mut exit_profile = vec![0.0; n as usize];
    for exit in exit_profile.iter_mut() {
        // After the oracle the ancilla is 1 exactly on the |t⟩ amplitude.
        let p_one = psi[0].norm_sqr();
        *exit = reach * p_one;
        let p_zero = psi[1].norm_sqr();
        reach *= p_zero;
        if p_zero < crate::statespace::ABSENT_BRANCH {
            reach = 0.0;
            break;
        }
        let collapsed = [Complex64::new(0.0, 0.0), psi[1] / p_zero.sqrt()];
        psi = reflect.apply(collapsed);
    }
    Ok(SimpleSchemeOutcome {
        error_probability: reach * psi[1].norm_sqr(),
        exit_profile,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pi3Outcome {
    pub error_probability: f64,
    pub queries: u64,
}

/// Phase-π/3 recursion `W₀ = U`, `W_{k+1} = W_k R_s W_k† R_t W_k` with
/// π/3 phase shifts. Each level applies `R_t` once and `W_k` three times, so
/// `n` levels cost `(3ⁿ − 1)/2` queries.
pub fn run_phase_pi3(epsilon: f64, levels: u32) -> Result<Pi3Outcome> {
    run_phase_recursion(epsilon, levels, PI / 3.0, PI / 3.0)
}

/// Same recursion with arbitrary source and target phases. Flipping the sign
/// of either phase turns `ε = 1` into the fixed point.
pub fn run_phase_recursion(
    epsilon: f64,
    levels: u32,
    s_phase: f64,
    t_phase: f64,
) -> Result<Pi3Outcome> {
    check_probability("epsilon", epsilon)?;
    if levels > MAX_PI3_LEVELS {
        return Err(Error::ResourceLimit {
            what: "levels",
            value: levels as u64,
            limit: MAX_PI3_LEVELS as u64,
        });
    }
    Ok(Pi3Outcome {
        error_probability: crate::precise::phase_recursion_error(epsilon, levels, s_phase, t_phase),
        queries: (3u64.pow(levels) - 1) / 2,
    })
}

/// The recursion operator `W_levels` in plain f64 [`RegisterMatrix`] algebra.
///
/// Agrees with [`run_phase_recursion`] to absolute ~1e-15 in the error
/// probability, but not in relative terms once the error gets tiny.
pub fn phase_recursion_matrix(
    epsilon: f64,
    levels: u32,
    s_phase: f64,
    t_phase: f64,
) -> RegisterMatrix {
    let rs = register_phase_t(s_phase);
    let rt = register_phase_t(t_phase);
    let mut w = register_u_from((1.0 - epsilon).sqrt(), epsilon.sqrt());
    for _ in 0..levels {
        w = w.mul(&rs).mul(&w.adjoint()).mul(&rt).mul(&w);
    }
    w
}

/// Classical baseline: pick a random item and test it with one query, up to
/// `max_iters` times; if every test fails, return one more random pick
/// without testing it.
pub fn run_classical_exact(epsilon: f64, max_iters: u32) -> Result<OutcomeDistribution> {
    check_probability("epsilon", epsilon)?;
    let exits = (0..max_iters as i32)
        .map(|k| (1.0 - epsilon) * epsilon.powi(k))
        .collect();
    let reach = epsilon.powi(max_iters as i32);
    Ok(OutcomeDistribution::assemble(
        exits,
        reach * (1.0 - epsilon),
        reach * epsilon,
    ))
}

pub fn run_classical_sampled(
    epsilon: f64,
    max_iters: u32,
    trials: u64,
    seed: u64,
) -> Result<Vec<RunRecord>> {
    check_probability("epsilon", epsilon)?;
    check_trials(trials)?;
    Ok(sample_trials(trials, seed, |rng| {
        for k in 1..=max_iters {
            if rng.random::<f64>() >= epsilon {
                return RunRecord {
                    success: true,
                    queries_used: k,
                    exit_iteration: Some(k),
                };
            }
        }
        RunRecord {
            success: rng.random::<f64>() >= epsilon,
            queries_used: max_iters,
            exit_iteration: None,
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleCheck {
    pub simulated: f64,
    pub formula: f64,
}

/// Compares the factor by which `U R_s^θ U† R_t^φ U |s⟩` rescales the
/// `|t⊥⟩` component against `|e^{i(θ−φ)/2} − 4 sin(θ/2) sin(φ/2) (1−ε)|`.
pub fn general_phase_scale_check(
    theta_phase: f64,
    phi_phase: f64,
    epsilon: f64,
) -> Result<ScaleCheck> {
    check_probability("epsilon", epsilon)?;
    if epsilon == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let u = register_u_from((1.0 - epsilon).sqrt(), epsilon.sqrt());
    let op = u
        .mul(&register_phase_t(theta_phase))
        .mul(&u.adjoint())
        .mul(&register_phase_t(phi_phase))
        .mul(&u);
    let simulated = op.entry(Reg::NonTarget, 0).norm() / epsilon.sqrt();
    let formula = (Complex64::from_polar(1.0, (theta_phase - phi_phase) / 2.0)
        - 4.0 * (theta_phase / 2.0).sin() * (phi_phase / 2.0).sin() * (1.0 - epsilon))
        .norm();
    Ok(ScaleCheck { simulated, formula })
}
