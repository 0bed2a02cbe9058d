//! Equation parameters and the exponent bookkeeping derived from them.

use rug::Float;

use crate::error::{Error, Result};
use crate::mp;

/// Distance from an integer below which μ is considered degenerate.
pub const MU_GUARD: f64 = 1e-6;

/// Which of the two formal solutions at infinity (and the matching singular
/// point of the integral representation) a quantity belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kappa {
    Plus,
    Minus,
}

impl Kappa {
    pub const BOTH: [Kappa; 2] = [Kappa::Plus, Kappa::Minus];

    pub fn sign(self) -> i32 {
        match self {
            Kappa::Plus => 1,
            Kappa::Minus => -1,
        }
    }

    pub fn opposite(self) -> Kappa {
        match self {
            Kappa::Plus => Kappa::Minus,
            Kappa::Minus => Kappa::Plus,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Kappa::Plus => 0,
            Kappa::Minus => 1,
        }
    }

    /// `sign^n`.
    pub fn pow_sign(self, n: usize) -> i32 {
        if self == Kappa::Minus && n % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

impl std::fmt::Display for Kappa {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kappa::Plus => "+1",
            Kappa::Minus => "-1",
        })
    }
}

/// The thirteen real parameters: `D[m-1]` multiplies `z^{-m}`, `B[m-1]`
/// multiplies `z^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationParams {
    pub d: [f64; 6],
    pub l: f64,
    pub b: [f64; 6],
}

impl EquationParams {
    pub fn new(d: [f64; 6], l: f64, b: [f64; 6]) -> Result<Self> {
        let p = EquationParams { d, l, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d.iter().chain(self.b.iter()).any(|x| !x.is_finite()) || !self.l.is_finite() {
            return Err(Error::InvalidParameters("parameters must be finite".into()));
        }
        if self.b[5] <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "B6 must be positive, got {}",
                self.b[5]
            )));
        }
        if self.l < 0.0 {
            return Err(Error::InvalidParameters(format!(
                "L must be non-negative, got {}",
                self.l
            )));
        }
        Ok(())
    }

    pub fn d_is_zero(&self) -> bool {
        self.d.iter().all(|&x| x == 0.0)
    }

    /// True when the b-recurrence collapses to two terms along `n1 = n2 = 0`.
    pub fn has_two_term_reduction(&self) -> bool {
        self.d[2] == 0.0 && self.d[5] == 0.0
    }
}

/// Exponent data shared by all downstream modules, stored at working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    prec: u32,
    params: EquationParams,
    d: [Float; 6],
    b: [Float; 6],
    l: Float,
    pub p1: Float,
    pub p2: Float,
    pub p3: Float,
    tau: [Float; 2],
    mu: [Float; 2],
    lambda: Float,
}

impl Frame {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn params(&self) -> &EquationParams {
        &self.params
    }

    /// Coefficient of `z^{-m}`, `m = 1..=6`.
    pub fn d(&self, m: usize) -> &Float {
        &self.d[m - 1]
    }

    /// Coefficient of `z^m`, `m = 1..=6`.
    pub fn b(&self, m: usize) -> &Float {
        &self.b[m - 1]
    }

    pub fn l(&self) -> &Float {
        &self.l
    }

    /// Singular-point coordinate `s0 = p3`.
    pub fn s0(&self) -> &Float {
        &self.p3
    }

    /// `t10 = p2`.
    pub fn t10(&self) -> &Float {
        &self.p2
    }

    /// `t20 = p1`.
    pub fn t20(&self) -> &Float {
        &self.p1
    }

    pub fn tau(&self, k: Kappa) -> &Float {
        &self.tau[k.index()]
    }

    pub fn mu(&self, k: Kappa) -> &Float {
        &self.mu[k.index()]
    }

    pub fn lambda(&self) -> &Float {
        &self.lambda
    }

    pub fn nu1(&self) -> u32 {
        1
    }

    pub fn nu2(&self) -> u32 {
        1
    }

    /// Same equation at a different λ.
    pub fn with_lambda(&self, lambda: &Float) -> Result<Frame> {
        derive_frame(&self.params, lambda, self.prec)
    }
}

fn exponents(params: &EquationParams, prec: u32) -> (Float, Float, Float, [Float; 2]) {
    let b = |i: usize| Float::with_val(prec, params.b[i - 1]);
    let p3 = Float::with_val(prec, b(6).sqrt()) / 3;
    let p2 = Float::with_val(prec, b(5) / Float::with_val(prec, &p3 * 12));
    let p1 = (b(4) - Float::with_val(prec, p2.square_ref()) * 4) / Float::with_val(prec, &p3 * 6);
    let mut tau = [Float::new(prec), Float::new(prec)];
    for k in Kappa::BOTH {
        let kp3 = Float::with_val(prec, &p3 * k.sign());
        let t_b3 = b(3) / Float::with_val(prec, &kp3 * 6);
        let t_pp = Float::with_val(prec, &p1 * &p2) * 2 / Float::with_val(prec, &kp3 * 3);
        tau[k.index()] = Float::with_val(prec, 1.5) - t_b3 + t_pp;
    }
    (p1, p2, p3, tau)
}

fn mu_of(lambda: &Float, tau: &Float) -> Float {
    let prec = tau.prec();
    (Float::with_val(prec, lambda + tau) - 3) / 3
}

/// True when μ sits on an integer, or when `1 + μ + j/3` can hit a
/// non-positive integer for some `j ≥ 0` (a vanishing Pochhammer factor).
fn mu_hazard(mu: &Float) -> bool {
    if mp::distance_to_integer(mu) < MU_GUARD {
        return true;
    }
    let three_mu = Float::with_val(mu.prec(), mu * 3);
    *mu <= -1.0 + MU_GUARD && mp::distance_to_integer(&three_mu) < 3.0 * MU_GUARD
}

pub fn derive_frame(params: &EquationParams, lambda: &Float, prec: u32) -> Result<Frame> {
    params.validate()?;
    if !lambda.is_finite() {
        return Err(Error::InvalidParameters("lambda must be finite".into()));
    }
    let (p1, p2, p3, tau) = exponents(params, prec);
    let lambda = Float::with_val(prec, lambda);
    let mu = [mu_of(&lambda, &tau[0]), mu_of(&lambda, &tau[1])];
    for k in Kappa::BOTH {
        let m = &mu[k.index()];
        if mp::distance_to_integer(m) < MU_GUARD {
            return Err(Error::LambdaDegenerate {
                kappa: k.sign(),
                mu: m.to_f64(),
                guard: MU_GUARD,
            });
        }
    }
    let fl = |x: f64| Float::with_val(prec, x);
    Ok(Frame {
        prec,
        params: params.clone(),
        d: params.d.map(fl),
        b: params.b.map(fl),
        l: fl(params.l),
        p1,
        p2,
        p3,
        tau,
        mu,
        lambda,
    })
}

/// λ = L unless that puts μ(±1) on a hazard, in which case L is shifted by
/// multiples of 1/π until both μ's are clear.
pub fn choose_lambda(params: &EquationParams, prec: u32) -> Float {
    let (_, _, _, tau) = exponents(params, prec);
    let offset = Float::with_val(prec, mp::pi(prec).recip_ref());
    let mut lambda = Float::with_val(prec, params.l);
    for _ in 0..16 {
        if !tau.iter().any(|t| mu_hazard(&mu_of(&lambda, t))) {
            break;
        }
        lambda += &offset;
    }
    lambda
}

/// Whether [`choose_lambda`] had to move away from λ = L.
pub fn lambda_was_shifted(params: &EquationParams, lambda: &Float) -> bool {
    *lambda != params.l
}
