//! Joint state of ancilla-1, the reduced two-level register and ancilla-2.
//!
//! The register is reduced to the invariant plane spanned by the target
//! direction `|t⟩` and the non-target direction `|t⊥⟩`. Amplitudes are stored
//! at index `a1 * 4 + reg * 2 + a2` with `reg` = 0 for `|t⟩` and 1 for `|t⊥⟩`.
//!
//! All operations are value-semantic: gates take a state by reference and
//! return a new one.

use num_complex::Complex64;

use crate::error::{check_probability, check_ratio, Result};

/// Tolerance for algebraic identities (norms, unitarity, closed forms).
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for agreement between independent simulation routes.
pub const CROSS_CHECK_TOL: f64 = 1e-10;
/// Branches with probability below this are reported as absent.
pub const ABSENT_BRANCH: f64 = 1e-15;

pub type Amplitude = Complex64;

const ZERO: Amplitude = Complex64 { re: 0.0, im: 0.0 };
const ONE: Amplitude = Complex64 { re: 1.0, im: 0.0 };

/// Basis direction of the reduced register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reg {
    Target = 0,
    NonTarget = 1,
}

impl Reg {
    pub fn other(self) -> Reg {
        match self {
            Reg::Target => Reg::NonTarget,
            Reg::NonTarget => Reg::Target,
        }
    }
}

#[inline]
pub fn basis_index(a1: usize, reg: Reg, a2: usize) -> usize {
    debug_assert!(a1 < 2 && a2 < 2);
    a1 * 4 + (reg as usize) * 2 + a2
}

/// Angles describing one problem instance.
///
/// `theta` is the register rotation with `cos²θ = epsilon`; `theta_j` is the
/// angle between the prepared joint state and the joint non-target direction,
/// with `sin²θ_j = r sin²θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemAngles {
    pub epsilon: f64,
    pub theta: f64,
    pub theta_j: f64,
    pub r: f64,
}

impl ProblemAngles {
    pub fn new(epsilon: f64, r: f64) -> Result<Self> {
        check_probability("epsilon", epsilon)?;
        check_ratio("r", r)?;
        let theta = epsilon.sqrt().acos();
        let theta_j = (r * (1.0 - epsilon)).sqrt().asin();
        Ok(ProblemAngles {
            epsilon,
            theta,
            theta_j,
            r,
        })
    }

    // Computed from epsilon directly rather than through acos, which loses
    // digits near the endpoints.
    pub fn sin_theta(&self) -> f64 {
        (1.0 - self.epsilon).sqrt()
    }

    pub fn cos_theta(&self) -> f64 {
        self.epsilon.sqrt()
    }

    /// The prepared joint vector `(R_r ⊗ U)|0⟩|s⟩` over `(a1, reg)`, index `a1 * 2 + reg`.
    pub fn joint_source(&self) -> [f64; 4] {
        let (s, c) = (self.sin_theta(), self.cos_theta());
        let (a0, a1) = ((1.0 - self.r).sqrt(), self.r.sqrt());
        [a0 * s, a0 * c, a1 * s, a1 * c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    amp: [Amplitude; 8],
}

impl JointState {
    pub fn from_amplitudes(amp: [Amplitude; 8]) -> Self {
        JointState { amp }
    }

    pub fn from_real(amp: [f64; 8]) -> Self {
        JointState {
            amp: amp.map(|x| Complex64::new(x, 0.0)),
        }
    }

    pub fn basis(a1: usize, reg: Reg, a2: usize) -> Self {
        let mut amp = [ZERO; 8];
        amp[basis_index(a1, reg, a2)] = ONE;
        JointState { amp }
    }

    pub fn amplitudes(&self) -> &[Amplitude; 8] {
        &self.amp
    }

    pub fn amp(&self, a1: usize, reg: Reg, a2: usize) -> Amplitude {
        self.amp[basis_index(a1, reg, a2)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &JointState) -> Complex64 {
        self.amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability that measuring the register yields `reg`.
    pub fn register_probability(&self, reg: Reg) -> f64 {
        let mut p = 0.0;
        for a1 in 0..2 {
            for a2 in 0..2 {
                p += self.amp(a1, reg, a2).norm_sqr();
            }
        }
        p
    }

    pub fn ancilla2_probability(&self, a2: usize) -> f64 {
        (0..4).map(|j| self.amp[j * 2 + a2].norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: f64) -> JointState {
        JointState {
            amp: self.amp.map(|a| a * factor),
        }
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &JointState) -> f64 {
        self.amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.amp
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// Prepares `(R_r ⊗ U ⊗ I)|0⟩|s⟩|0⟩`, where `R_r|0⟩ = √(1−r)|0⟩ + √r|1⟩` and
/// `U|s⟩ = sinθ|t⟩ + cosθ|t⊥⟩` with `cos²θ = epsilon`.
pub fn prepare_initial(epsilon: f64, r: f64) -> Result<JointState> {
    let angles = ProblemAngles::new(epsilon, r)?;
    Ok(prepare_from(&angles))
}

pub(crate) fn prepare_from(angles: &ProblemAngles) -> JointState {
    let v = angles.joint_source();
    let mut amp = [0.0; 8];
    for (j, x) in v.iter().enumerate() {
        amp[j * 2] = *x;
    }
    JointState::from_real(amp)
}

/// One oracle call: flips ancilla-2 when ancilla-1 is `|1⟩` and the register
/// is `|t⟩`, or `|t⊥⟩` when `avoided` is set.
pub fn oracle_query(state: &JointState, avoided: bool) -> JointState {
    let reg = if avoided { Reg::NonTarget } else { Reg::Target };
    let mut out = *state;
    out.amp.swap(basis_index(1, reg, 0), basis_index(1, reg, 1));
    out
}

/// Outcome of a projective measurement of ancilla-2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ancilla2Measurement {
    pub p_zero: f64,
    pub p_one: f64,
    /// Renormalized post-measurement state; `None` when the branch probability
    /// is below [`ABSENT_BRANCH`].
    pub if_zero: Option<JointState>,
    pub if_one: Option<JointState>,
}

pub fn measure_ancilla2(state: &JointState) -> Ancilla2Measurement {
    let project = |keep: usize| {
        let mut amp = state.amp;
        for (i, a) in amp.iter_mut().enumerate() {
            if i % 2 != keep {
                *a = ZERO;
            }
        }
        JointState { amp }
    };
    let zero = project(0);
    let one = project(1);
    let p_zero = zero.norm_sqr();
    let p_one = one.norm_sqr();
    let total = p_zero + p_one;
    let collapse = |s: JointState, p: f64| (p >= ABSENT_BRANCH).then(|| s.scaled(1.0 / p.sqrt()));
    Ancilla2Measurement {
        p_zero: p_zero / total,
        p_one: p_one / total,
        if_zero: collapse(zero, p_zero),
        if_one: collapse(one, p_one),
    }
}

/// Reflection `2|v⟩⟨v| − I` about `v = (R_r ⊗ U)|0⟩|s⟩` on the ancilla-1 ⊗
/// register factor, identity on ancilla-2.
pub fn joint_diffusion(state: &JointState, angles: &ProblemAngles) -> JointState {
    let v = angles.joint_source();
    let mut out = state.amp;
    for a2 in 0..2 {
        let overlap: Complex64 = (0..4).map(|j| state.amp[j * 2 + a2] * v[j]).sum();
        for j in 0..4 {
            out[j * 2 + a2] = overlap * (2.0 * v[j]) - state.amp[j * 2 + a2];
        }
    }
    JointState { amp: out }
}

/// 2×2 complex operator on the `{|t⟩, |t⊥⟩}` plane, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegisterMatrix {
    pub m: [[Amplitude; 2]; 2],
}

impl RegisterMatrix {
    pub fn identity() -> Self {
        RegisterMatrix {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn diag(d0: Amplitude, d1: Amplitude) -> Self {
        RegisterMatrix {
            m: [[d0, ZERO], [ZERO, d1]],
        }
    }

    pub fn entry(&self, row: Reg, col: usize) -> Amplitude {
        self.m[row as usize][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        RegisterMatrix {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    pub fn mul(&self, rhs: &RegisterMatrix) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        RegisterMatrix { m }
    }

    pub fn apply(&self, v: [Amplitude; 2]) -> [Amplitude; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn scale(&self, factor: Amplitude) -> Self {
        RegisterMatrix {
            m: self.m.map(|row| row.map(|x| x * factor)),
        }
    }

    /// Largest entry of `|M†M − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().mul(self);
        let id = RegisterMatrix::identity();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((g.m[i][j] - id.m[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

/// `U` with `U|s⟩ = sinθ|t⟩ + cosθ|t⊥⟩`, where `|s⟩` is the first coordinate.
/// Columns are `(sinθ, cosθ)` and `(cosθ, −sinθ)`.
pub fn register_u(theta: f64) -> RegisterMatrix {
    let (s, c) = theta.sin_cos();
    register_u_from(s, c)
}

pub(crate) fn register_u_from(sin_theta: f64, cos_theta: f64) -> RegisterMatrix {
    let re = |x: f64| Complex64::new(x, 0.0);
    RegisterMatrix {
        m: [
            [re(sin_theta), re(cos_theta)],
            [re(cos_theta), re(-sin_theta)],
        ],
    }
}

/// Selective phase `e^{iφ}` on `|t⟩`.
pub fn register_phase_t(phi: f64) -> RegisterMatrix {
    RegisterMatrix::diag(Complex64::from_polar(1.0, phi), ONE)
}

/// Selective phase `e^{iφ}` on `U|s⟩`, i.e. `U·diag(e^{iφ}, 1)·U†`.
pub fn register_phase_s(theta: f64, phi: f64) -> RegisterMatrix {
    let u = register_u(theta);
    u.mul(&register_phase_t(phi)).mul(&u.adjoint())
}
