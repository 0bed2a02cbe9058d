//! Independent checks on the characteristic exponent: the circuit matrix from
//! direct integration around `|z| = r`, and the smallest singular value of the
//! truncated two-sided recurrence for the Floquet coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::frame::EquationParams;
use crate::mp::{self, Complex};

/// Row normalizers smaller than this are replaced by `1 + n²`.
pub const HILL_NORMALIZER_TOL: f64 = 1e-12;
pub const HILL_DEFAULT_N: usize = 80;

#[derive(Clone, Debug)]
pub struct OdeSettings {
    /// Taylor order per step.
    pub order: usize,
    /// Working precision in bits; `None` picks one from the growth of the
    /// solutions around the circle.
    pub prec: Option<u32>,
    pub initial_steps: usize,
    pub max_steps: usize,
    /// Traverse the circle in the positive sense instead.
    pub reverse: bool,
}

impl Default for OdeSettings {
    fn default() -> Self {
        OdeSettings {
            order: 28,
            prec: None,
            initial_steps: 32,
            max_steps: 1 << 14,
            reverse: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MonodromySample {
    pub radius: f64,
    pub steps: usize,
    pub prec: u32,
    pub trace: Complex,
    pub matrix: [[Complex; 2]; 2],
    pub error_estimate: f64,
}

impl MonodromySample {
    pub fn det(&self) -> Complex {
        let m = &self.matrix;
        &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
    }

    /// `trace / 2`, which equals `cos 2πω`.
    pub fn half_trace(&self) -> Complex64 {
        self.trace.to_c64() / 2.0
    }
}

/// Coefficients `c_m` of `Q(z) = Σ c_m z^m`, `m = -6..=6`, indexed by `m + 6`.
fn q_coefficients(params: &EquationParams) -> [f64; 13] {
    let mut c = [0.0; 13];
    for m in 1..=6 {
        c[6 - m] = params.d[m - 1];
        c[6 + m] = params.b[m - 1];
    }
    c[6] = params.l * params.l;
    c
}

/// Bits lost to the growth of `|f|` around the circle, from `max |Q|`.
fn growth_bits(params: &EquationParams, radius: f64) -> f64 {
    let c = q_coefficients(params);
    let qmax: f64 = (0..13)
        .map(|i| c[i].abs() * radius.powi(i as i32 - 6))
        .sum();
    2.0 * std::f64::consts::PI * qmax.sqrt() / std::f64::consts::LN_2
}

fn default_prec(params: &EquationParams, radius: f64) -> u32 {
    let bits = 128.0 + 2.0 * growth_bits(params, radius);
    (bits / 32.0).ceil() as u32 * 32
}

/// Circuit matrix of `Y = (f, z f')` along `z = r e^{-iθ}`, `θ: 0 → 2π`,
/// with `steps` equal Taylor steps. Columns start from the identity.
pub fn integrate_circuit(
    params: &EquationParams,
    radius: f64,
    steps: usize,
    order: usize,
    prec: u32,
    reverse: bool,
) -> [[Complex; 2]; 2] {
    let c = q_coefficients(params);
    let sense = if reverse { -1 } else { 1 };
    let two_pi = Float::with_val(prec, mp::pi(prec) * 2u32);
    let h: Float = Float::with_val(prec, &two_pi / steps as u32) * sense;
    let r = Float::with_val(prec, radius);
    let factorial_recip: Vec<Float> = mp::factorials(prec, order)
        .iter()
        .map(|f| Float::with_val(prec, 1) / f)
        .collect();
    let hpow: Vec<Float> = (0..=order)
        .map(|k| Float::with_val(prec, (&h).pow(k as u32)))
        .collect();
    let coeffs: Vec<Float> = c.iter().map(|&x| Float::with_val(prec, x)).collect();
    // dY/dθ = -i [[0, 1], [Q, 0]] Y; the reversed circuit runs θ backwards.
    let minus_i = Complex::from_f64(prec, 0.0, -1.0);

    let mut y = [
        [Complex::one(prec), Complex::zero(prec)],
        [Complex::zero(prec), Complex::one(prec)],
    ];
    for s in 0..steps {
        let theta = Float::with_val(prec, &h * s as u32);
        let z0 = Complex::cis(&Float::with_val(prec, -&theta)).scale(&r);
        // Taylor coefficients of Q(z(θ0 + t)) in t.
        let mut q = vec![Complex::zero(prec); order + 1];
        let mut zpow = z0.powi(-6);
        for (idx, cm) in coeffs.iter().enumerate() {
            let m = idx as i32 - 6;
            if *cm != 0 {
                // z^m e^{-imt} = z^m Σ (-imt)^k / k!
                let mut term = zpow.scale(cm);
                let step = minus_i.scale_i32(m);
                for (k, qk) in q.iter_mut().enumerate() {
                    if k > 0 {
                        term = &term * &step;
                    }
                    *qk = &*qk + &term.scale(&factorial_recip[k]);
                }
            }
            zpow = &zpow * &z0;
        }
        for col in 0..2 {
            let mut f = vec![y[0][col].clone()];
            let mut w = vec![y[1][col].clone()];
            for k in 0..order {
                let inv = Float::with_val(prec, 1) / (k as u32 + 1);
                f.push((&minus_i * &w[k]).scale(&inv));
                let mut acc = Complex::zero(prec);
                for j in 0..=k {
                    acc = &acc + &(&q[j] * &f[k - j]);
                }
                w.push((&minus_i * &acc).scale(&inv));
            }
            let mut fs = Complex::zero(prec);
            let mut ws = Complex::zero(prec);
            for k in 0..=order {
                fs = &fs + &f[k].scale(&hpow[k]);
                ws = &ws + &w[k].scale(&hpow[k]);
            }
            y[0][col] = fs;
            y[1][col] = ws;
        }
    }
    y
}

/// Fundamental circuit matrix and its trace `2 cos 2πω`, doubling the step
/// count until two successive traces agree to `target_err`.
pub fn monodromy_trace_ode(
    params: &EquationParams,
    radius: f64,
    target_err: f64,
) -> Result<MonodromySample> {
    monodromy_trace_ode_with(params, radius, target_err, &OdeSettings::default())
}

pub fn monodromy_trace_ode_with(
    params: &EquationParams,
    radius: f64,
    target_err: f64,
    settings: &OdeSettings,
) -> Result<MonodromySample> {
    params.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Precondition(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if settings.order < 1 || settings.initial_steps < 1 {
        return Err(Error::Precondition(
            "Taylor order and step count must be positive".into(),
        ));
    }
    let prec = settings
        .prec
        .unwrap_or_else(|| default_prec(params, radius));
    let trace = |m: &[[Complex; 2]; 2]| &m[0][0] + &m[1][1];
    let mut steps = settings.initial_steps;
    let mut prev = integrate_circuit(
        params,
        radius,
        steps,
        settings.order,
        prec,
        settings.reverse,
    );
    let mut best_err = f64::INFINITY;
    let mut best = trace(&prev).to_c64();
    while steps * 2 <= settings.max_steps {
        steps *= 2;
        let cur = integrate_circuit(
            params,
            radius,
            steps,
            settings.order,
            prec,
            settings.reverse,
        );
        let tr = trace(&cur);
        let err = (&tr - &trace(&prev)).abs().to_f64();
        best_err = err;
        best = tr.to_c64();
        if err <= target_err {
            return Ok(MonodromySample {
                radius,
                steps,
                prec,
                trace: tr,
                matrix: cur,
                error_estimate: err,
            });
        }
        prev = cur;
    }
    Err(Error::AccuracyNotReached {
        steps,
        estimate: best_err,
        best_re: best.re,
        best_im: best.im,
    })
}

#[derive(Clone, Debug)]
pub struct HillResidual {
    pub n: usize,
    pub value: f64,
    /// Rows whose normalizer vanished and were divided by `1 + n²` instead.
    pub shifted_rows: Vec<i64>,
}

/// Smallest singular value of the `(2N+1)`-dimensional truncation of the
/// recurrence for the coefficients `c_n` of `z^ω Σ c_n z^n`, with each row
/// divided by its diagonal `(ω + n - L)(ω + n + L)`.
pub fn hill_residual(params: &EquationParams, omega: Complex64, n: usize) -> Result<HillResidual> {
    params.validate()?;
    if n < 20 {
        return Err(Error::Precondition(format!(
            "truncation N must be at least 20, got {n}"
        )));
    }
    let (a, shifted_rows) = hill_matrix(params, omega, n);
    let value = a
        .singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Ok(HillResidual {
        n,
        value,
        shifted_rows,
    })
}

/// Row-normalized truncation acting on `(c_{-N}, ..., c_N)`.
fn hill_matrix(
    params: &EquationParams,
    omega: Complex64,
    n: usize,
) -> (DMatrix<Complex64>, Vec<i64>) {
    let dim = 2 * n + 1;
    let l = params.l;
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    let mut shifted_rows = Vec::new();
    for row in 0..dim {
        let k = row as i64 - n as i64;
        let diag = (omega + k as f64 - l) * (omega + k as f64 + l);
        let norm = if diag.norm() < HILL_NORMALIZER_TOL {
            shifted_rows.push(k);
            Complex64::new(1.0 + (k * k) as f64, 0.0)
        } else {
            diag
        };
        a[(row, row)] = diag / norm;
        for m in 1..=6usize {
            if row >= m && params.b[m - 1] != 0.0 {
                a[(row, row - m)] = -params.b[m - 1] / norm;
            }
            if row + m < dim && params.d[m - 1] != 0.0 {
                a[(row, row + m)] = -params.d[m - 1] / norm;
            }
        }
    }
    (a, shifted_rows)
}

/// Residuals at `N` and `2N`.
pub fn hill_residual_checked(
    params: &EquationParams,
    omega: Complex64,
    n: usize,
) -> Result<(HillResidual, HillResidual)> {
    Ok((
        hill_residual(params, omega, n)?,
        hill_residual(params, omega, 2 * n)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(d: [f64; 6], l: f64, b: [f64; 6]) -> EquationParams {
        EquationParams::new(d, l, b).unwrap()
    }

    #[test]
    fn vanishing_d_gives_regular_singular_trace() {
        let p = params([0.0; 6], 0.3, [0.5, -1.0, 0.3, 0.8, -0.2, 2.0]);
        let s = monodromy_trace_ode(&p, 1.0, 1e-12).unwrap();
        let expect = 2.0 * (0.6 * PI).cos();
        assert!((s.trace.to_c64() - expect).norm() < 1e-11, "{:?}", s.trace);
        assert!((s.det().to_c64() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn trace_is_independent_of_radius() {
        let p = params(
            [0.4, -0.3, 0.2, 0.1, -0.5, 0.3],
            0.45,
            [0.2, 0.1, -0.4, 0.3, 0.2, 1.5],
        );
        let a = monodromy_trace_ode(&p, 0.7, 1e-12).unwrap();
        let b = monodromy_trace_ode(&p, 1.3, 1e-12).unwrap();
        let diff = (a.trace.to_c64() - b.trace.to_c64()).norm();
        assert!(
            diff <= 1e-11 + a.error_estimate + b.error_estimate,
            "{diff}"
        );
    }

    #[test]
    fn reversed_traversal_keeps_trace() {
        let p = params(
            [0.4, 0.0, 0.2, 0.0, 0.0, 0.3],
            0.2,
            [0.2, 0.0, 0.0, 0.3, 0.0, 1.0],
        );
        let fwd = monodromy_trace_ode(&p, 1.0, 1e-12).unwrap();
        let settings = OdeSettings {
            reverse: true,
            ..OdeSettings::default()
        };
        let back = monodromy_trace_ode_with(&p, 1.0, 1e-12, &settings).unwrap();
        assert!((fwd.trace.to_c64() - back.trace.to_c64()).norm() < 1e-11);
        // The reversed circuit is the inverse matrix.
        let m = &fwd.matrix;
        let inv = [[&m[1][1], &-&m[0][1]], [&-&m[1][0], &m[0][0]]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((back.matrix[i][j].to_c64() - inv[i][j].to_c64()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn halving_the_step_gains_the_nominal_order() {
        let p = params([0.0; 6], 0.3, [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let exact = 2.0 * (0.6 * PI).cos();
        let order = 4;
        let err = |steps| {
            let m = integrate_circuit(&p, 1.0, steps, order, 128, false);
            ((&m[0][0] + &m[1][1]).to_c64() - exact).norm()
        };
        let (e1, e2) = (err(256), err(512));
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn step_cap_reports_best_estimate() {
        let p = params([0.0; 6], 0.3, [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let settings = OdeSettings {
            order: 2,
            initial_steps: 4,
            max_steps: 16,
            ..Default::default()
        };
        match monodromy_trace_ode_with(&p, 1.0, 1e-14, &settings) {
            Err(Error::AccuracyNotReached {
                steps, estimate, ..
            }) => {
                assert_eq!(steps, 16);
                assert!(estimate > 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn one_sided_system_is_singular_at_regular_exponent() {
        let p = params([0.0; 6], 0.3, [0.5, -1.0, 0.3, 0.8, -0.2, 2.0]);
        let r = hill_residual(&p, Complex64::new(0.3, 0.0), 60).unwrap();
        assert!(r.value < 1e-10, "{}", r.value);
        assert_eq!(r.shifted_rows, vec![0]);
    }

    /// Builds the one-sided solution `c_0 = 1`, `c_{n<0} = 0` by forward
    /// substitution and checks it is a null vector of the truncation.
    #[test]
    fn one_sided_solution_is_a_null_vector() {
        let b = [0.5, -1.0, 0.3, 0.8, -0.2, 2.0];
        let l = 0.3;
        let n = 60usize;
        let p = params([0.0; 6], l, b);
        let mut c = vec![0.0f64; n + 1];
        c[0] = 1.0;
        for k in 1..=n {
            let s: f64 = (1..=6.min(k)).map(|m| b[m - 1] * c[k - m]).sum();
            c[k] = s / (k as f64 * (k as f64 + 2.0 * l));
        }
        let mut v = nalgebra::DVector::<Complex64>::zeros(2 * n + 1);
        for k in 0..=n {
            v[n + k] = Complex64::new(c[k], 0.0);
        }
        let (a, _) = hill_matrix(&p, Complex64::new(l, 0.0), n);
        let r = (&a * &v).norm() / v.norm();
        assert!(r < 1e-14, "{r}");
    }

    #[test]
    fn generic_exponent_stays_away_from_zero() {
        let p = params(
            [0.4, -0.3, 0.2, 0.1, -0.5, 0.3],
            0.45,
            [0.2, 0.1, -0.4, 0.3, 0.2, 1.5],
        );
        let om = Complex64::new(0.123, 0.0);
        let (a, b) = hill_residual_checked(&p, om, 40).unwrap();
        assert!(a.value > 1e-4 && b.value > 1e-4);
        assert!((a.value - b.value).abs() < 1e-3 * a.value.max(b.value));
    }

    #[test]
    fn ode_and_recurrence_agree() {
        let p = params(
            [0.4, -0.3, 0.2, 0.1, -0.5, 0.3],
            0.45,
            [0.2, 0.1, -0.4, 0.3, 0.2, 1.5],
        );
        let s = monodromy_trace_ode(&p, 1.0, 1e-13).unwrap();
        let half = s.half_trace();
        let omega = half.acos() / (2.0 * PI);
        let at = hill_residual(&p, omega, HILL_DEFAULT_N).unwrap().value;
        for shift in [-0.05, 0.05] {
            let off = hill_residual(&p, omega + shift, HILL_DEFAULT_N)
                .unwrap()
                .value;
            assert!(at * 1e3 < off, "{at} vs {off}");
        }
    }

    #[test]
    fn small_truncation_rejected() {
        let p = params([0.0; 6], 0.3, [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(hill_residual(&p, Complex64::new(0.1, 0.0), 19).is_err());
    }
}
