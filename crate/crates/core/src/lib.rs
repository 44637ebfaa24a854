//! Simulation of measurement-driven fixed point quantum search.
//!
//! Two ancilla qubits steer an amplitude-amplification loop: ancilla-1 caps
//! the effective target fraction at `r`, and ancilla-2 records each oracle
//! outcome and is measured every iteration. An outcome of 1 ends the search
//! with a certain answer. An outcome of 0 triggers a reflection about the
//! prepared joint state. With `r = ½` the error after `q` queries is
//! `ε^{2q+1}` for every `q`.
//!
//! The crate is organized as:
//!
//! - [`statespace`]: the 8-amplitude joint state, its gates and measurements.
//! - [`algorithms`]: exact (branch-tree) and sampled runs of the fixed point
//!   search, its deferred-measurement circuit, the simple single-ancilla
//!   scheme, the Phase-π/3 recursion and the classical baseline.
//! - [`analytics`]: closed forms, query planners and threshold values.
//! - [`database`]: full `N`-item simulation that validates the reduced model.
//! - [`experiments`]: figure tables, Monte Carlo summaries, the verification
//!   matrix and CSV output.
//!
//! ```
//! use fpqs_core::{run_fixed_point_exact, SearchConfig};
//!
//! let dist = run_fixed_point_exact(&SearchConfig::new(0.5, 3)).unwrap();
//! assert!((dist.final_failure - 0.5f64.powi(7)).abs() < 1e-12);
//! ```

pub mod algorithms;
pub mod analytics;
pub mod database;
pub mod error;
pub mod experiments;
mod precise;
pub mod statespace;

pub use algorithms::{
    general_phase_scale_check, phase_recursion_matrix, run_classical_exact, run_classical_sampled,
    run_deferred_measurement, run_fixed_point_exact, run_fixed_point_sampled, run_phase_pi3,
    run_phase_recursion, run_simple_scheme, trial_rng, OutcomeDistribution, Pi3Outcome, RunRecord,
    ScaleCheck, SearchConfig, SimpleSchemeOutcome, Variant,
};
pub use analytics::{AnalyticReport, PlanResult, Thresholds};
pub use database::{
    reduce_state, run_fixed_point_full_exact, run_fixed_point_full_sampled, DatabaseSpec, FullState,
};
pub use error::{Error, Result};
pub use experiments::{MonteCarloSummary, ScalingRow, SweepTable, VerificationReport};
pub use statespace::{
    joint_diffusion, measure_ancilla2, oracle_query, prepare_initial, register_phase_s,
    register_phase_t, register_u, Amplitude, JointState, ProblemAngles, Reg, RegisterMatrix,
};
