//! Full-dimensional simulation over an `N`-item database.
//!
//! `U` is the Walsh-Hadamard transform, so `U|s⟩` with `|s⟩ = |0…0⟩` is the
//! uniform superposition over items. The diffusion is applied literally as
//! `(R ⊗ H) I₀ (R ⊗ H)†`, which gives a code path independent of the reduced
//! two-level model in [`crate::statespace`]. [`reduce_state`] projects a full
//! state back onto the reduced basis for lockstep comparison.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{sample_trials, OutcomeDistribution, RunRecord};
use crate::error::{check_ratio, Error, Result};
use crate::statespace::{JointState, Reg, ABSENT_BRANCH, CROSS_CHECK_TOL};

/// Largest database size accepted in exact mode.
pub const MAX_EXACT_ITEMS: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatabaseSpec {
    n_items: usize,
    marked: Vec<usize>,
    is_marked: Vec<bool>,
}

impl DatabaseSpec {
    pub fn new(n_items: usize, mut marked: Vec<usize>) -> Result<Self> {
        if !n_items.is_power_of_two() {
            return Err(Error::InvalidDatabase(format!(
                "N = {n_items} is not a power of two"
            )));
        }
        marked.sort_unstable();
        if let Some(w) = marked.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidDatabase(format!(
                "item {} listed twice",
                w[0]
            )));
        }
        if let Some(&last) = marked.last() {
            if last >= n_items {
                return Err(Error::InvalidDatabase(format!(
                    "item {last} out of range for N = {n_items}"
                )));
            }
        }
        let mut is_marked = vec![false; n_items];
        for &i in &marked {
            is_marked[i] = true;
        }
        Ok(DatabaseSpec {
            n_items,
            marked,
            is_marked,
        })
    }

    /// `m` distinct items chosen uniformly with a seeded generator.
    pub fn random(n_items: usize, m: usize, seed: u64) -> Result<Self> {
        if m > n_items {
            return Err(Error::InvalidDatabase(format!(
                "cannot mark {m} of {n_items} items"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let marked = rand::seq::index::sample(&mut rng, n_items, m).into_vec();
        DatabaseSpec::new(n_items, marked)
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn is_marked(&self, item: usize) -> bool {
        self.is_marked[item]
    }

    /// Initial error probability `1 − M/N`.
    pub fn epsilon(&self) -> f64 {
        1.0 - self.marked.len() as f64 / self.n_items as f64
    }
}

/// `4N` amplitudes at index `a1 * 2N + item * 2 + a2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    n_items: usize,
    amp: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullMeasurement {
    pub p_zero: f64,
    pub p_one: f64,
    pub if_zero: Option<FullState>,
    pub if_one: Option<FullState>,
}

fn walsh_hadamard(x: &mut [Complex64]) {
    let n = x.len();
    let mut h = 1;
    while h < n {
        for block in x.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    for a in x.iter_mut() {
        *a *= scale;
    }
}

impl FullState {
    #[inline]
    fn index(&self, a1: usize, item: usize, a2: usize) -> usize {
        a1 * 2 * self.n_items + item * 2 + a2
    }

    /// `(R_r ⊗ H ⊗ I)|0⟩|0…0⟩|0⟩`.
    pub fn initial(spec: &DatabaseSpec, r: f64) -> Result<Self> {
        check_ratio("r", r)?;
        let n = spec.n_items;
        let mut state = FullState {
            n_items: n,
            amp: vec![Complex64::new(0.0, 0.0); 4 * n],
        };
        let uniform = 1.0 / (n as f64).sqrt();
        for item in 0..n {
            let (i0, i1) = (state.index(0, item, 0), state.index(1, item, 0));
            state.amp[i0] = Complex64::new((1.0 - r).sqrt() * uniform, 0.0);
            state.amp[i1] = Complex64::new(r.sqrt() * uniform, 0.0);
        }
        Ok(state)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Flips ancilla-2 where ancilla-1 is `|1⟩` and the item is marked.
    pub fn apply_oracle(&mut self, spec: &DatabaseSpec) {
        for &item in &spec.marked {
            let i = self.index(1, item, 0);
            self.amp.swap(i, i + 1);
        }
    }

    pub fn measure_ancilla2(&self) -> FullMeasurement {
        let project = |keep: usize| {
            let mut s = self.clone();
            for (i, a) in s.amp.iter_mut().enumerate() {
                if i % 2 != keep {
                    *a = Complex64::new(0.0, 0.0);
                }
            }
            s
        };
        let (zero, one) = (project(0), project(1));
        let (pz, po) = (zero.norm_sqr(), one.norm_sqr());
        let total = pz + po;
        let collapse = |mut s: FullState, p: f64| {
            (p >= ABSENT_BRANCH).then(|| {
                let k = 1.0 / p.sqrt();
                s.amp.iter_mut().for_each(|a| *a *= k);
                s
            })
        };
        FullMeasurement {
            p_zero: pz / total,
            p_one: po / total,
            if_zero: collapse(zero, pz),
            if_one: collapse(one, po),
        }
    }

    /// `(R ⊗ H) (2|0,0⟩⟨0,0| − I) (R ⊗ H)†` on ancilla-1 ⊗ item, for each
    /// ancilla-2 value.
    pub fn apply_diffusion(&mut self, r: f64) {
        let n = self.n_items;
        let (c, s) = ((1.0 - r).sqrt(), r.sqrt());
        for a2 in 0..2 {
            let mut lo: Vec<Complex64> = (0..n).map(|i| self.amp[i * 2 + a2]).collect();
            let mut hi: Vec<Complex64> = (0..n).map(|i| self.amp[2 * n + i * 2 + a2]).collect();

            // (R ⊗ H)† = Rᵀ ⊗ H with R = [[c, −s], [s, c]].
            walsh_hadamard(&mut lo);
            walsh_hadamard(&mut hi);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u * c + v * s;
                *y = -u * s + v * c;
            }

            let keep = lo[0];
            lo.iter_mut().chain(hi.iter_mut()).for_each(|a| *a = -*a);
            lo[0] = keep;

            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u * c - v * s;
                *y = u * s + v * c;
            }
            walsh_hadamard(&mut lo);
            walsh_hadamard(&mut hi);

            for i in 0..n {
                self.amp[i * 2 + a2] = lo[i];
                self.amp[2 * n + i * 2 + a2] = hi[i];
            }
        }
    }

    /// Probability that measuring the item register returns a marked item.
    pub fn marked_probability(&self, spec: &DatabaseSpec) -> f64 {
        let mut p = 0.0;
        for &item in &spec.marked {
            for a1 in 0..2 {
                let i = self.index(a1, item, 0);
                p += self.amp[i].norm_sqr() + self.amp[i + 1].norm_sqr();
            }
        }
        p
    }
}

fn check_q(q: u32) -> Result<()> {
    if q == 0 {
        return Err(Error::Domain {
            name: "q",
            value: 0.0,
            range: "q >= 1",
        });
    }
    Ok(())
}

/// Exact branch-tree evaluation on the full state.
pub fn run_fixed_point_full_exact(
    spec: &DatabaseSpec,
    q: u32,
    r: f64,
) -> Result<OutcomeDistribution> {
    check_q(q)?;
    if spec.n_items > MAX_EXACT_ITEMS {
        return Err(Error::ResourceLimit {
            what: "N",
            value: spec.n_items as u64,
            limit: MAX_EXACT_ITEMS as u64,
        });
    }
    let mut state = FullState::initial(spec, r)?;
    let mut exits = vec![0.0; q as usize];
    let mut reach = 1.0;
    for exit in exits.iter_mut() {
        state.apply_oracle(spec);
        let m = state.measure_ancilla2();
        *exit = reach * m.p_one;
        reach *= m.p_zero;
        match m.if_zero {
            Some(s) => {
                state = s;
                state.apply_diffusion(r);
            }
            None => {
                reach = 0.0;
                break;
            }
        }
    }
    let p_marked = state.marked_probability(spec);
    Ok(OutcomeDistribution::assemble(
        exits,
        reach * p_marked,
        reach * (1.0 - p_marked).max(0.0),
    ))
}

/// Sampled trajectories on the full state; the final measurement draws an
/// actual item index.
pub fn run_fixed_point_full_sampled(
    spec: &DatabaseSpec,
    q: u32,
    r: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<RunRecord>> {
    check_q(q)?;
    if trials == 0 {
        return Err(Error::Domain {
            name: "trials",
            value: 0.0,
            range: "trials >= 1",
        });
    }
    let initial = FullState::initial(spec, r)?;
    let n = spec.n_items;
    Ok(sample_trials(trials, seed, |rng| {
        let mut state = initial.clone();
        for k in 1..=q {
            state.apply_oracle(spec);
            let m = state.measure_ancilla2();
            let u: f64 = rng.random();
            match m.if_zero {
                Some(s) if u >= m.p_one => {
                    state = s;
                    state.apply_diffusion(r);
                }
                _ => {
                    return RunRecord {
                        success: true,
                        queries_used: k,
                        exit_iteration: Some(k),
                    }
                }
            }
        }
        let mut u: f64 = rng.random();
        let mut item = n - 1;
        'draw: for i in 0..n {
            for a1 in 0..2 {
                let base = state.index(a1, i, 0);
                u -= state.amp[base].norm_sqr() + state.amp[base + 1].norm_sqr();
            }
            if u < 0.0 {
                item = i;
                break 'draw;
            }
        }
        RunRecord {
            success: spec.is_marked(item),
            queries_used: q,
            exit_iteration: None,
        }
    }))
}

/// Reduced state and the norm of the part outside the reduced subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    pub state: JointState,
    pub residual: f64,
}

/// Projects onto the basis `(a1, {uniform marked, uniform unmarked}, a2)`.
/// Fails if the state has weight `≥ 1e-10` outside that subspace.
pub fn reduce_state(full: &FullState, spec: &DatabaseSpec) -> Result<Reduction> {
    if full.n_items != spec.n_items {
        return Err(Error::InvalidDatabase(format!(
            "state has N = {}, database has N = {}",
            full.n_items, spec.n_items
        )));
    }
    let n = spec.n_items;
    let m = spec.marked.len();
    let weight = |count: usize| {
        if count == 0 {
            0.0
        } else {
            1.0 / (count as f64).sqrt()
        }
    };
    let (wt, wn) = (weight(m), weight(n - m));

    let mut amp = [Complex64::new(0.0, 0.0); 8];
    for a1 in 0..2 {
        for a2 in 0..2 {
            let (mut t, mut tp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for item in 0..n {
                let a = full.amp[full.index(a1, item, a2)];
                if spec.is_marked(item) {
                    t += a * wt;
                } else {
                    tp += a * wn;
                }
            }
            amp[a1 * 4 + Reg::Target as usize * 2 + a2] = t;
            amp[a1 * 4 + Reg::NonTarget as usize * 2 + a2] = tp;
        }
    }

    let mut residual_sq = 0.0;
    for a1 in 0..2 {
        for a2 in 0..2 {
            let t = amp[a1 * 4 + a2];
            let tp = amp[a1 * 4 + 2 + a2];
            for item in 0..n {
                let rebuilt = if spec.is_marked(item) {
                    t * wt
                } else {
                    tp * wn
                };
                residual_sq += (full.amp[full.index(a1, item, a2)] - rebuilt).norm_sqr();
            }
        }
    }
    let residual = residual_sq.sqrt();
    if residual >= CROSS_CHECK_TOL {
        return Err(Error::SubspaceViolation(residual));
    }
    Ok(Reduction {
        state: JointState::from_amplitudes(amp),
        residual,
    })
}
