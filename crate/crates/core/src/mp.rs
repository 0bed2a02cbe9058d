//! Multiprecision helpers on top of [`rug::Float`]: a small complex type,
//! signed log-gamma, gamma ratios, Pochhammer products and decimal output.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Extra bits carried through log-gamma differences.
const GUARD_BITS: u32 = 32;

pub fn real(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Number of significant decimal digits carried by `prec` bits.
pub fn decimal_digits(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).ceil() as usize
}

pub fn to_decimal(x: &Float) -> String {
    x.to_string_radix(10, Some(decimal_digits(x.prec())))
}

/// Distance from `x` to the nearest integer.
pub fn distance_to_integer(x: &Float) -> Float {
    let r = Float::with_val(x.prec(), x.round_ref());
    (r - x).abs()
}

/// `ln|Γ(x)|` together with the sign of `Γ(x)`. Poles are reported as errors.
pub fn ln_gamma_signed(x: &Float) -> Result<(Float, i32)> {
    if x.is_integer() && *x <= 0 {
        return Err(Error::GammaPole(x.to_f64()));
    }
    let (v, sign) = Float::with_val(x.prec(), x).ln_abs_gamma();
    let s = if sign == Ordering::Less { -1 } else { 1 };
    Ok((v, s))
}

/// `Γ(x)` evaluated through its logarithm.
pub fn gamma(x: &Float) -> Result<Float> {
    gamma_ratio(&[x], &[])
}

/// `Π Γ(num) / Π Γ(den)` evaluated as an exponentiated log-gamma difference
/// with separate sign tracking. A pole in the denominator yields zero.
pub fn gamma_ratio(num: &[&Float], den: &[&Float]) -> Result<Float> {
    let prec = num
        .iter()
        .chain(den.iter())
        .map(|x| x.prec())
        .max()
        .unwrap_or(64);
    let work = prec + GUARD_BITS;
    let mut acc = Float::with_val(work, 0);
    let mut sign = 1;
    for x in num {
        let (v, s) = ln_gamma_signed(&Float::with_val(work, *x))?;
        acc += v;
        sign *= s;
    }
    for x in den {
        if x.is_integer() && **x <= 0 {
            return Ok(Float::with_val(prec, 0));
        }
        let (v, s) = ln_gamma_signed(&Float::with_val(work, *x))?;
        acc -= v;
        sign *= s;
    }
    let mut out = Float::with_val(prec, acc.exp());
    if !out.is_finite() {
        return Err(Error::PrecisionExhausted(
            "gamma ratio overflows the exponent range".into(),
        ));
    }
    if sign < 0 {
        out = -out;
    }
    Ok(out)
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)`.
pub fn pochhammer(x: &Float, n: usize) -> Float {
    let mut acc = Float::with_val(x.prec(), 1);
    let mut t = x.clone();
    for _ in 0..n {
        acc *= &t;
        t += 1;
    }
    acc
}

/// `(x)_0, (x)_1, ..., (x)_n`.
pub fn pochhammer_table(x: &Float, n: usize) -> Vec<Float> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Float::with_val(x.prec(), 1);
    out.push(acc.clone());
    let mut t = x.clone();
    for _ in 0..n {
        acc *= &t;
        t += 1;
        out.push(acc.clone());
    }
    out
}

/// `0!, 1!, ..., n!`.
pub fn factorials(prec: u32, n: usize) -> Vec<Float> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Float::with_val(prec, 1);
    out.push(acc.clone());
    for k in 1..=n {
        acc *= k as u32;
        out.push(acc.clone());
    }
    out
}

/// `x^d / d!` for `d = 0..=n`.
pub fn exp_terms(x: &Float, n: usize) -> Vec<Float> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Float::with_val(x.prec(), 1);
    out.push(acc.clone());
    for d in 1..=n {
        acc *= x;
        acc /= d as u32;
        out.push(acc.clone());
    }
    out
}

/// Complex number with multiprecision parts.
#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {:+}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::with_val(re.prec(), 0);
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex::new(Float::with_val(prec, 0), Float::with_val(prec, 0))
    }

    pub fn one(prec: u32) -> Self {
        Complex::new(Float::with_val(prec, 1), Float::with_val(prec, 0))
    }

    pub fn i(prec: u32) -> Self {
        Complex::new(Float::with_val(prec, 0), Float::with_val(prec, 1))
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Complex::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// `exp(iπx)` for real `x`.
    pub fn exp_i_pi(x: &Float) -> Self {
        let prec = x.prec();
        let arg = Float::with_val(prec, x * pi(prec));
        let (s, c) = arg.sin_cos(Float::new(prec));
        Complex::new(c, s)
    }

    /// `exp(iθ)` for real `θ`.
    pub fn cis(theta: &Float) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        Complex::new(c, s)
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), Float::with_val(self.prec(), -&self.im))
    }

    pub fn norm_sqr(&self) -> Float {
        let mut n = Float::with_val(self.prec(), self.re.square_ref());
        n += Float::with_val(self.prec(), self.im.square_ref());
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn scale(&self, s: &Float) -> Self {
        Complex::new(
            Float::with_val(self.prec(), &self.re * s),
            Float::with_val(self.prec(), &self.im * s),
        )
    }

    pub fn scale_i32(&self, s: i32) -> Self {
        Complex::new(
            Float::with_val(self.prec(), &self.re * s),
            Float::with_val(self.prec(), &self.im * s),
        )
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Complex::new(Float::with_val(self.prec(), -&self.im), self.re.clone())
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Complex::new(
            Float::with_val(self.prec(), &self.re / &n),
            Float::with_val(self.prec(), -&self.im) / &n,
        )
    }

    pub fn div(&self, rhs: &Complex) -> Self {
        self * &rhs.recip()
    }

    pub fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Complex::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let m = Float::with_val(self.prec(), self.re.exp_ref());
        Complex::cis(&self.im).scale(&m)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let prec = self.prec();
        let r = Float::with_val(prec, self.abs().ln_ref());
        let t = Float::with_val(prec, self.im.atan2_ref(&self.re));
        Complex::new(r, t)
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        if self.re.is_zero() && self.im.is_zero() {
            return Complex::zero(prec);
        }
        let r = self.abs();
        let mut u = r + Float::with_val(prec, self.re.abs_ref());
        u /= 2;
        u.sqrt_mut();
        let mut v = Float::with_val(prec, self.im.abs_ref());
        v /= 2;
        v /= &u;
        if self.re >= 0 {
            let im = if self.im.is_sign_negative() { -v } else { v };
            Complex::new(u, im)
        } else {
            let im = if self.im.is_sign_negative() { -u } else { u };
            Complex::new(v, im)
        }
    }

    /// Principal inverse cosine, `acos(w) = -i ln(w + i sqrt(1 - w^2))`.
    pub fn acos(&self) -> Self {
        let prec = self.prec();
        let one = Complex::one(prec);
        let root = (&one - &(self * self)).sqrt();
        let inner = self + &root.mul_i();
        let l = inner.ln();
        // -i * l
        Complex::new(l.im, Float::with_val(prec, -&l.re))
    }

    pub fn cos(&self) -> Self {
        let iz = self.mul_i();
        let a = iz.exp();
        let b = (-&iz).exp();
        let mut s = &a + &b;
        s.re /= 2;
        s.im /= 2;
        s
    }

    pub fn to_decimal(&self) -> (String, String) {
        (to_decimal(&self.re), to_decimal(&self.im))
    }
}

impl<'a> Add<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn add(self, rhs: &'a Complex) -> Complex {
        Complex::new(
            Float::with_val(self.prec(), &self.re + &rhs.re),
            Float::with_val(self.prec(), &self.im + &rhs.im),
        )
    }
}

impl<'a> Sub<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn sub(self, rhs: &'a Complex) -> Complex {
        Complex::new(
            Float::with_val(self.prec(), &self.re - &rhs.re),
            Float::with_val(self.prec(), &self.im - &rhs.im),
        )
    }
}

impl<'a> Mul<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn mul(self, rhs: &'a Complex) -> Complex {
        let prec = self.prec();
        let re =
            Float::with_val(prec, &self.re * &rhs.re) - Float::with_val(prec, &self.im * &rhs.im);
        let im =
            Float::with_val(prec, &self.re * &rhs.im) + Float::with_val(prec, &self.im * &rhs.re);
        Complex::new(re, im)
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(
            Float::with_val(self.prec(), -&self.re),
            Float::with_val(self.prec(), -&self.im),
        )
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, rhs: Complex) -> Complex {
        &self + &rhs
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, rhs: Complex) -> Complex {
        &self - &rhs
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        &self * &rhs
    }
}

/// `x^y` for real positive `x`.
pub fn pow_real(x: &Float, y: &Float) -> Float {
    Float::with_val(x.prec(), x.pow(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn gamma_half_squared_is_pi() {
        let half = Float::with_val(P, 0.5);
        let g = gamma(&half).unwrap();
        let d = Float::with_val(P, g.square_ref()) - pi(P);
        assert!(d.abs() < 1e-70);
    }

    #[test]
    fn gamma_sign_on_negative_axis() {
        let x = Float::with_val(P, -2.5);
        let g = gamma(&x).unwrap();
        // Γ(-2.5) = -8√π/15
        let expected = -8.0 * std::f64::consts::PI.sqrt() / 15.0;
        assert!(close(&g, expected, 1e-14));
    }

    #[test]
    fn gamma_pole_is_an_error() {
        let x = Float::with_val(P, -3);
        assert!(matches!(gamma(&x), Err(Error::GammaPole(_))));
    }

    #[test]
    fn gamma_ratio_large_arguments() {
        // Γ(200.5)/Γ(200) ≈ sqrt(200) (1 - 1/1600 + ...)
        let a = Float::with_val(P, 200.5);
        let b = Float::with_val(P, 200);
        let r = gamma_ratio(&[&a], &[&b]).unwrap();
        let direct = Float::with_val(P, a.gamma_ref()) / Float::with_val(P, b.gamma_ref());
        let rel = (Float::with_val(P, &r - &direct) / &direct).abs();
        assert!(rel < 1e-70, "rel = {}", rel);
    }

    #[test]
    fn denominator_pole_gives_zero() {
        let a = Float::with_val(P, 1.5);
        let b = Float::with_val(P, -1);
        assert!(gamma_ratio(&[&a], &[&b]).unwrap().is_zero());
    }

    #[test]
    fn pochhammer_matches_gamma_ratio() {
        let x = Float::with_val(P, 0.37);
        let p = pochhammer(&x, 7);
        let xn = Float::with_val(P, &x + 7);
        let g = gamma_ratio(&[&xn], &[&x]).unwrap();
        let rel = (Float::with_val(P, &p - &g) / &g).abs();
        assert!(rel < 1e-70);
        assert_eq!(pochhammer_table(&x, 7)[7], p);
    }

    #[test]
    fn complex_acos_inverts_cos() {
        for (re, im) in [(0.3, 0.0), (-0.9, 0.0), (2.5, 0.0), (-3.0, 0.0), (0.4, 0.7)] {
            let w = Complex::from_f64(P, re, im);
            let back = w.acos().cos();
            let d = (&back - &w).abs();
            assert!(d < 1e-70, "acos round trip failed for {re}+{im}i");
        }
        let w = Complex::from_f64(P, 0.5, 0.0);
        let a = w.acos();
        assert!(close(&a.re, std::f64::consts::FRAC_PI_3, 1e-15));
        assert!(a.im.is_zero() || a.im.clone().abs() < 1e-70);
    }

    #[test]
    fn complex_sqrt_branches() {
        let w = Complex::from_f64(P, -4.0, 0.0);
        let r = w.sqrt();
        assert!(close(&r.re, 0.0, 1e-30) && close(&r.im, 2.0, 1e-30));
        let w = Complex::from_f64(P, -4.0, -0.0);
        let r = w.sqrt();
        assert!(close(&r.im, -2.0, 1e-30));
        let w = Complex::from_f64(P, 3.0, 4.0);
        let r = w.sqrt();
        assert!(close(&r.re, 2.0, 1e-30) && close(&r.im, 1.0, 1e-30));
    }

    #[test]
    fn powi_negative_exponent() {
        let w = Complex::from_f64(P, 0.0, 2.0);
        let r = w.powi(-2);
        assert!(close(&r.re, -0.25, 1e-30) && close(&r.im, 0.0, 1e-30));
    }
}
