//! Extended-precision 2×2 complex matrices for the Phase-π/3 recursion.
//!
//! In f64 the recursion's small `|t⊥⟩` amplitude is the difference of O(1)
//! terms, so its relative accuracy is lost once `ε^{3ⁿ}` drops below ~1e-16.
//! Carrying 1280 bits keeps every representable error probability exact to
//! well below f64 resolution.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use dashu_float::FBig;

const PRECISION_BITS: usize = 1280;

type Real = FBig;

fn real(x: f64) -> Real {
    FBig::try_from(x)
        .expect("finite input")
        .with_precision(PRECISION_BITS)
        .value()
}

#[derive(Clone, Debug)]
struct Cx {
    re: Real,
    im: Real,
}

impl Cx {
    fn new(re: Real, im: Real) -> Self {
        Cx { re, im }
    }

    fn zero() -> Self {
        Cx::new(real(0.0), real(0.0))
    }

    fn one() -> Self {
        Cx::new(real(1.0), real(0.0))
    }

    fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -self.im.clone())
    }

    fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `e^{iφ}`, exact for the phases the searches use.
    fn unit(phi: f64) -> Self {
        let third = PI / 3.0;
        if phi == third || phi == -third {
            let half_root3 = real(3.0).sqrt() / real(2.0);
            let im = if phi > 0.0 { half_root3 } else { -half_root3 };
            Cx::new(real(0.5), im)
        } else if phi == PI || phi == -PI {
            Cx::new(real(-1.0), real(0.0))
        } else if phi == 0.0 {
            Cx::one()
        } else {
            let (s, c) = phi.sin_cos();
            Cx::new(real(c), real(s))
        }
    }
}

impl Add for &Cx {
    type Output = Cx;
    fn add(self, rhs: &Cx) -> Cx {
        Cx::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &Cx {
    type Output = Cx;
    fn sub(self, rhs: &Cx) -> Cx {
        Cx::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &Cx {
    type Output = Cx;
    fn mul(self, rhs: &Cx) -> Cx {
        Cx::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

#[derive(Clone, Debug)]
struct Mat2([[Cx; 2]; 2]);

impl Mat2 {
    fn diag(d0: Cx, d1: Cx) -> Self {
        Mat2([[d0, Cx::zero()], [Cx::zero(), d1]])
    }

    fn mul(&self, rhs: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let cell = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        Mat2([[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]])
    }

    fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }
}

/// Error probability `|⟨t⊥|W_levels|s⟩|²` of the recursion
/// `W₀ = U`, `W_{k+1} = W_k R_s W_k† R_t W_k`.
pub(crate) fn phase_recursion_error(epsilon: f64, levels: u32, s_phase: f64, t_phase: f64) -> f64 {
    let eps = real(epsilon);
    let sin = (real(1.0) - &eps).sqrt();
    let cos = eps.sqrt();
    let zero = || real(0.0);
    let mut w = Mat2([
        [Cx::new(sin.clone(), zero()), Cx::new(cos.clone(), zero())],
        [Cx::new(cos, zero()), Cx::new(-sin, zero())],
    ]);
    let rs = Mat2::diag(Cx::unit(s_phase), Cx::one());
    let rt = Mat2::diag(Cx::unit(t_phase), Cx::one());
    for _ in 0..levels {
        w = w.mul(&rs).mul(&w.adjoint()).mul(&rt).mul(&w);
    }
    w.0[1][0].norm_sqr().to_f64().value()
}
