//! Leading large-`n` behaviour of the formal-solution coefficients `a_n(κ)`
//! predicted from the Stokes multipliers.

use rug::Float;

use crate::error::{Error, Result};
use crate::frame::{Frame, Kappa};
use crate::mp::{self, Complex};
use crate::stokes::StokesSet;

#[derive(Clone, Debug)]
pub struct LateTermModel {
    pub kappa: Kappa,
    prec: u32,
    s0: Float,
    t10: Float,
    t20: Float,
    eta: Complex,
    tau: Float,
    tau_other: Float,
    sigma: [Complex; 3],
}

impl LateTermModel {
    pub fn new(frame: &Frame, stokes: &StokesSet, kappa: Kappa) -> Self {
        let sigma = [0, 1, 2].map(|n| stokes.sigma(n, kappa).clone());
        Self::from_sigmas(frame, sigma, kappa)
    }

    pub fn from_sigmas(frame: &Frame, sigma: [Complex; 3], kappa: Kappa) -> Self {
        LateTermModel {
            kappa,
            prec: frame.prec(),
            s0: frame.s0().clone(),
            t10: frame.t10().clone(),
            t20: frame.t20().clone(),
            eta: crate::stokes::eta(frame.prec()),
            tau: frame.tau(kappa).clone(),
            tau_other: frame.tau(kappa.opposite()).clone(),
            sigma,
        }
    }

    fn eta_pow(&self, j: i64) -> Complex {
        self.eta.powi(j.rem_euclid(6))
    }

    /// `(2κ s0)^{-j/3}`, with `(-1)^{-1/3}` read as `η`.
    pub fn frac_power(&self, j: i64) -> Complex {
        let two_s0 = Float::with_val(self.prec, &self.s0 * 2u32);
        let ex = Float::with_val(self.prec, -j) / 3u32;
        let mag = Complex::from_real(mp::pow_real(&two_s0, &ex));
        match self.kappa {
            Kappa::Plus => mag,
            Kappa::Minus => &mag * &self.eta_pow(j),
        }
    }

    /// The two exponents `(n/3)^{2/3} (2κs0)^{-2/3} (-2κ t10)` and
    /// `(n/3)^{1/3} (2κs0)^{-1/3} (-2κ t20)`.
    pub fn exponents(&self, n: usize) -> (Complex, Complex) {
        let prec = self.prec;
        let k = self.kappa.sign();
        let third = Float::with_val(prec, n as u32) / 3u32;
        let two_thirds_pow = mp::pow_real(&third, &(Float::with_val(prec, 2) / 3u32));
        let one_third_pow = mp::pow_real(&third, &(Float::with_val(prec, 1) / 3u32));
        let u = self
            .frac_power(2)
            .scale(&two_thirds_pow)
            .scale(&Float::with_val(prec, &self.t10 * (-2 * k)));
        let v = self
            .frac_power(1)
            .scale(&one_third_pow)
            .scale(&Float::with_val(prec, &self.t20 * (-2 * k)));
        (u, v)
    }

    /// `EX_0(n), EX_1(n), EX_2(n)`.
    pub fn ex(&self, n: usize) -> [Complex; 3] {
        let (u, v) = self.exponents(n);
        let f = |a: i64, b: i64| (&(&self.eta_pow(a) * &u) + &(&self.eta_pow(b) * &v)).exp();
        [f(0, 0), f(4, 2), f(2, 4)]
    }

    /// `L_0(n), L_1(n), L_2(n)`: the combinations isolating the constant and
    /// the two linear terms of the exponential expansions.
    pub fn l_functions(&self, n: usize) -> [Complex; 3] {
        let ex = self.ex(n);
        let comb = |a: i64, b: i64| {
            let s = &(&ex[0] + &(&self.eta_pow(a) * &ex[1])) + &(&self.eta_pow(b) * &ex[2]);
            let three = Float::with_val(self.prec, 3);
            Complex::new(s.re / &three, s.im / &three)
        };
        [comb(0, 0), comb(2, 4), comb(4, 2)]
    }

    /// `η^{2n}, η^{4n}` weights on `σ_1, σ_2`, and 1 on `σ_0`.
    pub fn phase_weights(&self, n: usize) -> [Complex; 3] {
        [
            Complex::one(self.prec),
            self.eta_pow(2 * n as i64),
            self.eta_pow(4 * n as i64),
        ]
    }

    /// `-(1/3π) (2κs0)^{-n/3} Γ((τ(κ) - τ(-κ) + n)/3)`.
    pub fn prefactor(&self, n: usize) -> Result<Complex> {
        let prec = self.prec;
        let mut arg = Float::with_val(prec, &self.tau - &self.tau_other);
        arg += n as u32;
        arg /= 3u32;
        let g = mp::gamma(&arg)?;
        let c = -(g / (mp::pi(prec) * 3u32));
        Ok(self.frac_power(n as i64).scale(&c))
    }

    pub fn prediction(&self, n: usize) -> Result<Complex> {
        let ex = self.ex(n);
        let w = self.phase_weights(n);
        let mut s = Complex::zero(self.prec);
        for j in 0..3 {
            s = &s + &(&(&w[j] * &self.sigma[j]) * &ex[j]);
        }
        Ok(&self.prefactor(n)? * &s)
    }

    /// Size of the prediction with the oscillating sum replaced by the sum of
    /// magnitudes; the natural scale for comparing `a_n` near zeros.
    pub fn envelope(&self, n: usize) -> Result<Float> {
        let ex = self.ex(n);
        let mut s = Float::with_val(self.prec, 0);
        for j in 0..3 {
            s += (&self.sigma[j] * &ex[j]).abs();
        }
        Ok(self.prefactor(n)?.abs() * s)
    }

    /// `|a_n - prediction| / envelope`.
    pub fn deviation(&self, n: usize, a_n: &Float) -> Result<Float> {
        let p = self.prediction(n)?;
        let d = (&Complex::from_real(a_n.clone()) - &p).abs();
        Ok(d / self.envelope(n)?)
    }
}

pub fn late_coeff_prediction(model: &LateTermModel, n: usize) -> Result<Complex> {
    if n == 0 {
        return Err(Error::Precondition(
            "late-term prediction needs n ≥ 1".into(),
        ));
    }
    model.prediction(n)
}
