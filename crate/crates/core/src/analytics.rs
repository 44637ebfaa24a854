//! Closed-form error probabilities, success splits, average query counts,
//! query planners and thresholds. These are the reference values the
//! simulations in [`crate::algorithms`] are checked against.

use crate::error::{check_probability, check_ratio, Error, Result};

/// Residual required from [`crossover_epsilon_a`].
pub const ROOT_TOL: f64 = 1e-12;

/// Amplitude scale `1 − 2r(1−ε)` applied to the non-target direction by each
/// diffusion after the first measurement.
#[inline]
pub fn contraction(epsilon: f64, r: f64) -> f64 {
    1.0 - 2.0 * r * (1.0 - epsilon)
}

/// Error probability after `q` iterations: `ε (1 − 2r(1−ε))^{2q}`.
pub fn error_after(epsilon: f64, r: f64, q: u32) -> f64 {
    epsilon * contraction(epsilon, r).powi(2 * q as i32)
}

/// Probability of a heralded (certain) answer within `q` iterations at `r = ½`:
/// `1 − ε^{2q−2} (1+ε)/2`.
pub fn deterministic_success(epsilon: f64, q: u32) -> f64 {
    1.0 - epsilon.powi(2 * q as i32 - 2) * (1.0 + epsilon) / 2.0
}

/// Probability that the final register measurement succeeds at `r = ½`:
/// `½ ε^{2q−2} (1 + ε − 2ε³)`.
pub fn probabilistic_success(epsilon: f64, q: u32) -> f64 {
    0.5 * epsilon.powi(2 * q as i32 - 2) * (1.0 + epsilon - 2.0 * epsilon.powi(3))
}

/// Heralded success probability for general `r`.
///
/// The first iteration exits with `r(1−ε)`; every later iteration is entered
/// with the continuing weight and exits with `1 − c²`, `c = 1 − 2r(1−ε)`.
pub fn deterministic_success_general(epsilon: f64, r: f64, q: u32) -> f64 {
    let first = r * (1.0 - epsilon);
    let c = contraction(epsilon, r);
    first + (1.0 - first) * (1.0 - c.powi(2 * q as i32 - 2))
}

/// Average oracle queries of the fixed point search,
/// `1 + (1 − c^{2q−2}) / (4r(1−ε))`, with the `ε → 1` limit `q`.
pub fn avg_queries_quantum(epsilon: f64, r: f64, q: u32) -> f64 {
    let rf = r * (1.0 - epsilon);
    if rf == 0.0 {
        return q as f64;
    }
    let c = contraction(epsilon, r);
    1.0 + (1.0 - c.powi(2 * q as i32 - 2)) / (4.0 * rf)
}

/// Average queries of the classical baseline run for `2q` iterations,
/// `(1 − ε^{2q}) / (1 − ε)`, with the `ε → 1` limit `2q`.
pub fn avg_queries_classical(epsilon: f64, q: u32) -> f64 {
    if epsilon == 1.0 {
        return 2.0 * q as f64;
    }
    (1.0 - epsilon.powi(2 * q as i32)) / (1.0 - epsilon)
}

/// `q → ∞` averages `(1 + 1/(4r(1−ε)), 1/(1−ε))`.
pub fn avg_queries_limits(epsilon: f64, r: f64) -> Result<(f64, f64)> {
    check_probability("epsilon", epsilon)?;
    check_ratio("r", r)?;
    if epsilon == 1.0 {
        return Err(Error::Divergent);
    }
    let f = 1.0 - epsilon;
    Ok((1.0 + 1.0 / (4.0 * r * f), 1.0 / f))
}

/// All closed-form quantities for one `(ε, r, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticReport {
    pub error_q: f64,
    pub p1: f64,
    pub p_prob_success: f64,
    pub avg_q_quantum: f64,
    pub avg_q_classical: f64,
    /// `f64::INFINITY` at `ε = 1`.
    pub limit_quantum: f64,
    pub limit_classical: f64,
}

impl AnalyticReport {
    pub fn new(epsilon: f64, r: f64, q: u32) -> Result<Self> {
        check_probability("epsilon", epsilon)?;
        check_ratio("r", r)?;
        if q == 0 {
            return Err(Error::Domain {
                name: "q",
                value: 0.0,
                range: "q >= 1",
            });
        }
        let error_q = error_after(epsilon, r, q);
        let p1 = deterministic_success_general(epsilon, r, q);
        let (limit_quantum, limit_classical) =
            avg_queries_limits(epsilon, r).unwrap_or((f64::INFINITY, f64::INFINITY));
        Ok(AnalyticReport {
            error_q,
            p1,
            p_prob_success: 1.0 - p1 - error_q,
            avg_q_quantum: avg_queries_quantum(epsilon, r, q),
            avg_q_classical: avg_queries_classical(epsilon, q),
            limit_quantum,
            limit_classical,
        })
    }
}

/// Smallest query counts guaranteeing error at most `eps_th` whenever the
/// initial error is at most `eps_up`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanResult {
    pub q_an: u64,
    pub q_pi3: u64,
    pub q_cl: u64,
    pub eps_up: f64,
    pub eps_th: f64,
}

fn pow_le(base: f64, exponent: u64, bound: f64) -> bool {
    match i32::try_from(exponent) {
        Ok(e) => base.powi(e) <= bound,
        Err(_) => exponent as f64 * base.ln() <= bound.ln(),
    }
}

/// Walks `start` down while `valid(q - 1)` holds and up until `valid(q)`.
fn settle(start: u64, min: u64, valid: impl Fn(u64) -> bool) -> u64 {
    let mut q = start.max(min);
    while q > min && valid(q - 1) {
        q -= 1;
    }
    while !valid(q) {
        q += 1;
    }
    q
}

pub fn plan_queries(eps_up: f64, eps_th: f64) -> Result<PlanResult> {
    if !(eps_up > 0.0 && eps_up < 1.0) {
        return Err(Error::Domain {
            name: "eps_up",
            value: eps_up,
            range: "(0, 1)",
        });
    }
    if !(eps_th > 0.0 && eps_th < eps_up) {
        return Err(Error::Domain {
            name: "eps_th",
            value: eps_th,
            range: "(0, eps_up)",
        });
    }
    let ratio = eps_th.ln() / eps_up.ln();

    // Ceiling formulas give the starting point; the defining inequalities
    // decide, since the ratio may land a hair off an exact integer.
    let q_an = settle(((ratio - 1.0).ceil() / 2.0).ceil() as u64, 1, |q| {
        pow_le(eps_up, 2 * q + 1, eps_th)
    });
    let q_cl = settle((ratio - 1.0).ceil() as u64, 1, |q| {
        pow_le(eps_up, q + 1, eps_th)
    });
    // 3^40 is the last power of three that fits in u64.
    let n = settle((ratio.log(3.0).ceil() as u64).min(40), 1, |n| {
        n >= 40 || pow_le(eps_up, 3u64.pow(n as u32), eps_th)
    });
    let q_pi3 = (3u64.pow(n as u32) - 1) / 2;
    Ok(PlanResult {
        q_an,
        q_pi3,
        q_cl,
        eps_up,
        eps_th,
    })
}

fn crossover_residual(x: f64, q: u32) -> f64 {
    2.0 * x + x.powi(2 * q as i32 - 2) - 2.0 * x.powi(2 * q as i32) - 1.0
}

/// Root of `2x + x^{2q−2} − 2x^{2q} = 1` in `(0, ½)`: the error probability
/// below which the classical baseline needs fewer queries on average.
pub fn crossover_epsilon_a(q: u32) -> Result<f64> {
    if q < 2 {
        return Err(Error::Domain {
            name: "q",
            value: q as f64,
            range: "q >= 2",
        });
    }
    // g(0) = -1 and g(½) = 2^{-2q} > 0.
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = crossover_residual(mid, q);
        if g == 0.0 {
            return Ok(mid);
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // The bracket has collapsed to adjacent floats; keep the smaller residual.
    if crossover_residual(lo, q).abs() <= crossover_residual(hi, q).abs() {
        Ok(lo)
    } else {
        Ok(hi)
    }
}

/// `ε₀ = 1 − 1/(2r)`, where one iteration is exact, and
/// `ε_rl = (2r−1)/(2r+1)`, above which `|1 − 2r(1−ε)| < ε`. Both exist only
/// for `r > ½`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub eps0: Option<f64>,
    pub eps_rl: Option<f64>,
}

pub fn thresholds(r: f64) -> Result<Thresholds> {
    check_ratio("r", r)?;
    if r <= 0.5 {
        return Ok(Thresholds {
            eps0: None,
            eps_rl: None,
        });
    }
    Ok(Thresholds {
        eps0: Some(1.0 - 1.0 / (2.0 * r)),
        eps_rl: Some((2.0 * r - 1.0) / (2.0 * r + 1.0)),
    })
}

/// Query counts of the first `n` Phase-π/3 levels, `q_i = 3q_{i−1} + 1`.
pub fn pi3_query_sequence(n: u32) -> Vec<u64> {
    std::iter::successors(Some(1u64), |q| Some(3 * q + 1))
        .take(n as usize)
        .collect()
}

/// `cos²θ cos^{2n} 2θ` with `cos²θ = ε`, i.e. `ε (2ε − 1)^{2n}`.
pub fn simple_scheme_error(epsilon: f64, n: u32) -> f64 {
    let theta = epsilon.sqrt().acos();
    theta.cos().powi(2) * (2.0 * theta).cos().powi(2 * n as i32)
}

/// Normalization of the joint non-target direction, `√(2/(1+ε))`.
pub fn normalization_n(epsilon: f64) -> f64 {
    (2.0 / (1.0 + epsilon)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn error_after_examples() {
        assert!((error_after(0.5, 0.5, 1) - 0.125).abs() < TOL);
        assert!(error_after(0.5, 1.0, 1).abs() < TOL);
        for eps in [0.1f64, 0.4, 0.9] {
            for q in 1..6 {
                let want = eps.powi(2 * q as i32 + 1);
                assert!((error_after(eps, 0.5, q) - want).abs() < TOL);
            }
        }
    }

    #[test]
    fn success_split() {
        for eps in [0.0, 0.2, 0.7] {
            assert!((deterministic_success(eps, 1) - (1.0 - eps) / 2.0).abs() < TOL);
        }
        assert!((deterministic_success(0.5, 2) - 0.8125).abs() < TOL);
        assert!((probabilistic_success(0.5, 2) - 0.15625).abs() < TOL);
        assert!((0.8125 + 0.15625 + 0.5f64.powi(5) - 1.0).abs() < TOL);
        for q in 2..6 {
            assert_eq!(deterministic_success(0.0, q), 1.0);
        }
        for eps in [0.1, 0.5, 0.9] {
            for q in 1..5 {
                let g = deterministic_success_general(eps, 0.5, q);
                assert!((g - deterministic_success(eps, q)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn average_queries() {
        for eps in [0.0, 0.3, 0.9] {
            assert!((avg_queries_quantum(eps, 0.5, 1) - 1.0).abs() < TOL);
            assert!((avg_queries_classical(eps, 1) - (1.0 + eps)).abs() < TOL);
        }
        assert!((avg_queries_quantum(0.5, 0.5, 4) - 1.984375).abs() < TOL);
        assert!((avg_queries_classical(0.5, 4) - 1.9921875).abs() < TOL);
        assert_eq!(avg_queries_quantum(1.0, 0.5, 4), 4.0);
        assert_eq!(avg_queries_classical(1.0, 4), 8.0);
        // Continuity into the analytic limit.
        assert!((avg_queries_quantum(1.0 - 1e-9, 0.5, 4) - 4.0).abs() < 1e-6);
        assert!((avg_queries_classical(1.0 - 1e-9, 4) - 8.0).abs() < 1e-6);
    }

    #[test]
    fn quantum_average_reduces_to_half_form() {
        for eps in [0.0f64, 0.1, 0.37, 0.5, 0.8, 0.99] {
            for q in 1..9 {
                let eq9 = 1.0 + (1.0 - eps.powi(2 * q - 2)) / (2.0 * (1.0 - eps));
                assert!((avg_queries_quantum(eps, 0.5, q as u32) - eq9).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn limits() {
        let (qa, qc) = avg_queries_limits(0.5, 1.0).unwrap();
        assert!((qa - 1.5).abs() < TOL && (qc - 2.0).abs() < TOL);
        assert_eq!(avg_queries_limits(1.0, 0.5), Err(Error::Divergent));
        // Ratio approaches 4 as ε → 1.
        let (qa, qc) = avg_queries_limits(0.999999, 1.0).unwrap();
        assert!((qc / qa - 4.0).abs() < 1e-4);
    }

    #[test]
    fn plan_reference_case() {
        let p = plan_queries(0.5, 1e-4).unwrap();
        assert_eq!((p.q_an, p.q_pi3, p.q_cl), (7, 13, 13));
    }

    #[test]
    fn plan_at_exact_cube() {
        for eps in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let p = plan_queries(eps, eps.powi(3)).unwrap();
            assert_eq!((p.q_an, p.q_pi3, p.q_cl), (1, 1, 2), "eps = {eps}");
        }
    }

    #[test]
    fn plan_rejects_bad_bounds() {
        assert!(plan_queries(0.5, 0.6).is_err());
        assert!(plan_queries(1.0, 0.1).is_err());
        assert!(plan_queries(0.5, 0.0).is_err());
    }

    #[test]
    fn crossover() {
        let x = crossover_epsilon_a(2).unwrap();
        assert!(x > 0.43 && x < 0.45);
        assert!(crossover_residual(x, 2).abs() < ROOT_TOL);
        let x = crossover_epsilon_a(4).unwrap();
        assert!(x > 0.49 && x < 0.5);
        assert!(crossover_epsilon_a(1).is_err());
    }

    #[test]
    fn threshold_values() {
        let t = thresholds(1.0).unwrap();
        assert!((t.eps0.unwrap() - 0.5).abs() < TOL);
        assert!((t.eps_rl.unwrap() - 1.0 / 3.0).abs() < TOL);
        assert_eq!(
            thresholds(0.5).unwrap(),
            Thresholds {
                eps0: None,
                eps_rl: None
            }
        );
        let t = thresholds(0.75).unwrap();
        assert!((t.eps0.unwrap() - 1.0 / 3.0).abs() < TOL);
        assert!((t.eps_rl.unwrap() - 0.2).abs() < TOL);
        for q in 1..5 {
            assert!(error_after(1.0 / 3.0, 0.75, q).abs() < TOL);
        }
    }

    #[test]
    fn small_helpers() {
        assert_eq!(pi3_query_sequence(4), [1, 4, 13, 40]);
        assert!((simple_scheme_error(1.0 / 3.0, 1) - 1.0 / 27.0).abs() < TOL);
        assert_eq!(normalization_n(1.0), 1.0);
        assert!((normalization_n(0.0) - 2f64.sqrt()).abs() < TOL);
    }
}
