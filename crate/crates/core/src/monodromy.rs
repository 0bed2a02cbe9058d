//! Circuit matrix around the origin, the characteristic exponent and the
//! multiplicative solutions, all as polynomials in the six Stokes multipliers.

use rug::Float;

use crate::error::{Error, Result};
use crate::frame::{Frame, Kappa};
use crate::mp::{self, Complex};
use crate::stokes::StokesSet;

/// `|p1 - p2|` below which the two multipliers are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Phase coefficient of a term: `exp((thirds/3) π i τ(κ))`, or unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    One,
    Tau { thirds: u8, kappa: Kappa },
}

/// One monomial `coeff · [i] · phase · Π σ_n(κ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: i32,
    pub imaginary: bool,
    pub phase: Phase,
    pub factors: &'static [(usize, Kappa)],
}

use Kappa::{Minus as M, Plus as P};

const fn t(coeff: i32, phase: Phase, factors: &'static [(usize, Kappa)]) -> Term {
    Term {
        coeff,
        imaginary: false,
        phase,
        factors,
    }
}

const fn ti(coeff: i32, phase: Phase, factors: &'static [(usize, Kappa)]) -> Term {
    Term {
        coeff,
        imaginary: true,
        phase,
        factors,
    }
}

const ONE: Phase = Phase::One;
const fn e(thirds: u8, kappa: Kappa) -> Phase {
    Phase::Tau { thirds, kappa }
}

pub const T11_TERMS: [Term; 13] = [
    t(1, e(6, P), &[]),
    t(4, e(4, M), &[(0, M), (0, P)]),
    t(4, e(4, P), &[(1, P), (0, M)]),
    t(4, ONE, &[(2, P), (0, M)]),
    t(4, e(4, P), &[(2, P), (1, M)]),
    t(4, e(4, P), &[(2, M), (0, P)]),
    t(4, ONE, &[(1, M), (0, P)]),
    t(16, e(2, P), &[(2, M), (2, P), (1, M), (0, P)]),
    t(16, e(2, P), &[(2, M), (1, P), (0, M), (0, P)]),
    t(16, e(2, P), &[(2, P), (1, M), (1, P), (0, M)]),
    t(16, e(2, M), &[(2, M), (2, P), (0, M), (0, P)]),
    t(16, e(2, M), &[(1, M), (1, P), (0, M), (0, P)]),
    t(64, ONE, &[(2, M), (2, P), (1, M), (1, P), (0, M), (0, P)]),
];

/// Multiplied by `(2 s0)^{(τ(1) - τ(-1))/3}`.
pub const T12_TERMS: [Term; 8] = [
    ti(2, e(2, M), &[(2, P)]),
    ti(2, e(2, P), &[(1, P)]),
    ti(2, e(6, M), &[(0, P)]),
    ti(8, e(4, M), &[(2, M), (2, P), (0, P)]),
    ti(8, ONE, &[(2, M), (1, P), (0, P)]),
    ti(8, e(4, M), &[(1, M), (1, P), (0, P)]),
    ti(8, ONE, &[(2, P), (1, M), (1, P)]),
    ti(32, e(2, M), &[(2, M), (2, P), (1, M), (1, P), (0, P)]),
];

/// Multiplied by `(2 s0)^{(τ(-1) - τ(1))/3}`.
pub const T21_TERMS: [Term; 8] = [
    ti(-2, e(4, M), &[(0, M)]),
    ti(-2, e(4, P), &[(2, M)]),
    ti(-2, ONE, &[(1, M)]),
    ti(-8, e(2, P), &[(2, M), (2, P), (1, M)]),
    ti(-8, e(2, M), &[(2, M), (2, P), (0, M)]),
    ti(-8, e(2, M), &[(1, M), (1, P), (0, M)]),
    ti(-8, e(2, P), &[(2, M), (1, P), (0, M)]),
    ti(-32, ONE, &[(2, M), (2, P), (1, M), (1, P), (0, M)]),
];

pub const T22_TERMS: [Term; 5] = [
    t(1, e(6, M), &[]),
    t(4, e(4, M), &[(2, M), (2, P)]),
    t(4, e(4, M), &[(1, M), (1, P)]),
    t(4, ONE, &[(2, M), (1, P)]),
    t(16, e(2, M), &[(2, M), (2, P), (1, M), (1, P)]),
];

/// `cos(2πω) - cos(2πτ(1))`.
pub const X_TERMS: [Term; 16] = [
    t(2, e(4, M), &[(0, M), (0, P)]),
    t(2, e(4, P), &[(1, P), (0, M)]),
    t(2, ONE, &[(2, P), (0, M)]),
    t(2, e(4, P), &[(2, P), (1, M)]),
    t(2, e(4, P), &[(2, M), (0, P)]),
    t(2, ONE, &[(1, M), (0, P)]),
    t(2, e(4, M), &[(2, M), (2, P)]),
    t(2, e(4, M), &[(1, M), (1, P)]),
    t(2, ONE, &[(2, M), (1, P)]),
    t(8, e(2, M), &[(2, M), (2, P), (1, M), (1, P)]),
    t(8, e(2, P), &[(2, M), (2, P), (1, M), (0, P)]),
    t(8, e(2, P), &[(2, M), (1, P), (0, M), (0, P)]),
    t(8, e(2, P), &[(2, P), (1, M), (1, P), (0, M)]),
    t(8, e(2, M), &[(2, M), (2, P), (0, M), (0, P)]),
    t(8, e(2, M), &[(1, M), (1, P), (0, M), (0, P)]),
    t(32, ONE, &[(2, M), (2, P), (1, M), (1, P), (0, M), (0, P)]),
];

/// Everything needed to evaluate the term lists.
pub struct TermContext<'a> {
    pub prec: u32,
    pub tau: [&'a Float; 2],
    pub sigma: &'a [[Complex; 2]; 3],
}

impl<'a> TermContext<'a> {
    pub fn new(frame: &'a Frame, sigma: &'a [[Complex; 2]; 3]) -> Self {
        TermContext {
            prec: frame.prec(),
            tau: [frame.tau(Kappa::Plus), frame.tau(Kappa::Minus)],
            sigma,
        }
    }

    pub fn phase(&self, p: Phase) -> Complex {
        match p {
            Phase::One => Complex::one(self.prec),
            Phase::Tau { thirds, kappa } => {
                let x = Float::with_val(self.prec, self.tau[kappa.index()] * thirds as u32) / 3u32;
                Complex::exp_i_pi(&x)
            }
        }
    }

    pub fn term(&self, term: &Term) -> Complex {
        let mut acc = self.phase(term.phase).scale_i32(term.coeff);
        if term.imaginary {
            acc = acc.mul_i();
        }
        for &(n, k) in term.factors {
            acc = &acc * &self.sigma[n][k.index()];
        }
        acc
    }

    pub fn sum(&self, terms: &[Term]) -> Complex {
        terms
            .iter()
            .fold(Complex::zero(self.prec), |acc, tm| &acc + &self.term(tm))
    }
}

#[derive(Clone, Debug)]
pub struct CircuitMatrix {
    pub t11: Complex,
    pub t12: Complex,
    pub t21: Complex,
    pub t22: Complex,
}

impl CircuitMatrix {
    pub fn det(&self) -> Complex {
        &(&self.t11 * &self.t22) - &(&self.t12 * &self.t21)
    }

    pub fn trace(&self) -> Complex {
        &self.t11 + &self.t22
    }

    pub fn det_deviation(&self) -> Float {
        let one = Complex::one(self.t11.prec());
        (&self.det() - &one).abs()
    }
}

/// `(2 s0)^{(τ(1) - τ(-1))/3}`.
fn off_diagonal_scale(frame: &Frame) -> Float {
    let prec = frame.prec();
    let two_s0 = Float::with_val(prec, frame.s0() * 2u32);
    let ex = Float::with_val(prec, frame.tau(Kappa::Plus) - frame.tau(Kappa::Minus)) / 3u32;
    mp::pow_real(&two_s0, &ex)
}

pub fn circuit_from_sigmas(frame: &Frame, sigma: &[[Complex; 2]; 3]) -> CircuitMatrix {
    let ctx = TermContext::new(frame, sigma);
    let up = off_diagonal_scale(frame);
    let down = Float::with_val(frame.prec(), up.recip_ref());
    CircuitMatrix {
        t11: ctx.sum(&T11_TERMS),
        t12: ctx.sum(&T12_TERMS).scale(&up),
        t21: ctx.sum(&T21_TERMS).scale(&down),
        t22: ctx.sum(&T22_TERMS),
    }
}

pub fn circuit_matrix(frame: &Frame, stokes: &StokesSet) -> CircuitMatrix {
    circuit_from_sigmas(frame, &stokes.sigma)
}

#[derive(Clone, Debug)]
pub struct FloquetResult {
    /// `cos(2πτ(1)) + X`.
    pub cos_two_pi_omega: Complex,
    pub x: Complex,
    /// Half the trace of the circuit matrix; equals `cos_two_pi_omega` when
    /// the term lists are consistent.
    pub half_trace: Complex,
    /// `acos(Re cos(2πω)) / 2π`, principal branch, so `Re ω ∈ [0, 1/2]`.
    pub omega: Complex,
    /// `(exp(-2πiω), exp(2πiω))`.
    pub multipliers: (Complex, Complex),
    pub circuit: CircuitMatrix,
    pub det_deviation: Float,
}

impl FloquetResult {
    /// `|cos(2πω) - (T11 + T22)/2|`.
    pub fn route_gap(&self) -> Float {
        (&self.cos_two_pi_omega - &self.half_trace).abs()
    }
}

/// `X` alone from a multiplier assignment.
pub fn x_from_sigmas(frame: &Frame, sigma: &[[Complex; 2]; 3]) -> Complex {
    TermContext::new(frame, sigma).sum(&X_TERMS)
}

/// `cos(2πω)` from the multipliers; `im_tol` bounds the allowed imaginary part.
pub fn characteristic_exponent(
    frame: &Frame,
    stokes: &StokesSet,
    im_tol: f64,
) -> Result<FloquetResult> {
    exponent_from_sigmas(frame, &stokes.sigma, im_tol)
}

pub fn exponent_from_sigmas(
    frame: &Frame,
    sigma: &[[Complex; 2]; 3],
    im_tol: f64,
) -> Result<FloquetResult> {
    let prec = frame.prec();
    let x = x_from_sigmas(frame, sigma);
    let two_pi_tau = Float::with_val(prec, frame.tau(Kappa::Plus) * 2u32);
    let base = Complex::exp_i_pi(&two_pi_tau).re;
    let cos = &Complex::from_real(base) + &x;
    if cos.im.clone().abs() > im_tol {
        return Err(Error::Inconsistency(format!(
            "cos(2πω) has imaginary part {:e}",
            cos.im.to_f64()
        )));
    }
    let circuit = circuit_from_sigmas(frame, sigma);
    let mut half_trace = circuit.trace();
    half_trace.re /= 2u32;
    half_trace.im /= 2u32;
    let omega = omega_from_cos(&cos.re);
    let multipliers = multipliers_from_omega(&omega);
    let det_deviation = circuit.det_deviation();
    Ok(FloquetResult {
        cos_two_pi_omega: cos,
        x,
        half_trace,
        omega,
        multipliers,
        circuit,
        det_deviation,
    })
}

/// Principal `acos(w)/(2π)` of a real `w`.
pub fn omega_from_cos(w: &Float) -> Complex {
    let prec = w.prec();
    let a = Complex::from_real(w.clone()).acos();
    let two_pi = mp::pi(prec) * 2u32;
    Complex::new(
        Float::with_val(prec, &a.re / &two_pi),
        Float::with_val(prec, &a.im / &two_pi),
    )
}

pub fn multipliers_from_omega(omega: &Complex) -> (Complex, Complex) {
    let prec = omega.prec();
    let two_pi_i_omega = omega.scale(&(mp::pi(prec) * 2u32)).mul_i();
    ((-&two_pi_i_omega).exp(), two_pi_i_omega.exp())
}

#[derive(Clone, Debug)]
pub struct MultiplicativeSolutions {
    /// `(α, β)` with `f_p = α f_∞1 + β f_∞2`, for `p1` and `p2`.
    pub pairs: [(Complex, Complex); 2],
    pub degenerate: bool,
}

/// Coefficient pairs from the lower row of the eigen-relation.
pub fn solution_pairs(t: &CircuitMatrix, p1: &Complex, p2: &Complex) -> MultiplicativeSolutions {
    let pair = |p: &Complex| (&t.t22 - p, -&t.t12);
    let close = (p1 - p2).abs() < DEGENERACY_TOL;
    let pairs = if close {
        [pair(p1), pair(p1)]
    } else {
        [pair(p1), pair(p2)]
    };
    let vanishing = pairs
        .iter()
        .any(|(a, b)| Float::with_val(a.prec(), a.abs() + b.abs()) < DEGENERACY_TOL);
    MultiplicativeSolutions {
        pairs,
        degenerate: close || vanishing,
    }
}

pub fn multiplicative_solutions(
    t: &CircuitMatrix,
    result: &FloquetResult,
) -> MultiplicativeSolutions {
    solution_pairs(t, &result.multipliers.0, &result.multipliers.1)
}
