//! End-to-end solve: frame, b-tables, adaptive connection-coefficient grids,
//! Stokes multipliers, circuit matrix and characteristic exponent.

use rug::Float;

use crate::coeffs::BTable;
use crate::error::{Error, Result, Warning};
use crate::frame::{choose_lambda, derive_frame, lambda_was_shifted, EquationParams, Frame, Kappa};
use crate::monodromy::{
    characteristic_exponent, exponent_from_sigmas, multiplicative_solutions, FloquetResult,
    MultiplicativeSolutions,
};
use crate::stokes::{
    e_values, level_cut, level_sums, sigmas_from_sums, stokes_multipliers, tables_for, EGrid,
    LevelValues, StokesSet, M_STEP,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MChoice {
    /// Increase from `start` in steps of 10 until the level sums settle, up to `max`.
    Adaptive {
        start: usize,
        max: usize,
    },
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaChoice {
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSettings {
    pub prec: u32,
    pub m: MChoice,
    pub k_order: usize,
    /// Highest level computed; the level sums stop earlier once converged.
    pub lmax: usize,
    pub lambda: LambdaChoice,
    /// Relative size of two consecutive level contributions that ends the sums.
    pub level_tol: f64,
    /// Change in the scaled level sums between `m - 10` and `m` that ends
    /// the search over `m`.
    pub m_tol: f64,
    /// Largest accepted `|Im cos(2πω)|`.
    pub im_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            prec: 256,
            m: MChoice::Adaptive {
                start: 40,
                max: 200,
            },
            k_order: 10,
            lmax: 36,
            lambda: LambdaChoice::Auto,
            level_tol: 1e-16,
            m_tol: 1e-15,
            im_tol: 1e-6,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.prec < 64 {
            return Err(Error::Usage(format!(
                "precision must be at least 64 bits, got {}",
                self.prec
            )));
        }
        if self.k_order == 0 || self.lmax < 2 {
            return Err(Error::Usage("K must be ≥ 1 and Lmax ≥ 2".into()));
        }
        let m_min = M_STEP + 1;
        match self.m {
            MChoice::Fixed(m) if m < m_min => {
                return Err(Error::Usage(format!("m must be at least {m_min}, got {m}")))
            }
            MChoice::Adaptive { start, max } if start < m_min || max < start => {
                return Err(Error::Usage(format!(
                    "invalid adaptive m range {start}..{max}"
                )))
            }
            _ => {}
        }
        if let LambdaChoice::Fixed(x) = self.lambda {
            if !x.is_finite() {
                return Err(Error::Usage("lambda must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Grids for one κ: the accepted solve and its two companions.
#[derive(Clone, Debug)]
pub struct KappaSolve {
    pub kappa: Kappa,
    pub m: usize,
    pub m_converged: bool,
    /// Scaled level-sum change over the final `m` step.
    pub m_change: f64,
    pub main: LevelValues,
    pub lower_k: LevelValues,
    pub lower_m: LevelValues,
}

/// `(S0, c1 S1, c2 S2)` with `c_r = (2 s0)^{-r/3}`: the sizes that enter the
/// multipliers.
fn scaled_sums(frame: &Frame, kappa: Kappa, values: &LevelValues, cut: usize) -> [f64; 3] {
    let s = level_sums(frame, kappa, values, cut);
    let two_s0 = (frame.s0().to_f64() * 2.0).max(f64::MIN_POSITIVE);
    [0, 1, 2].map(|r| s[r].to_f64() * two_s0.powf(-(r as f64) / 3.0))
}

fn sums_change(frame: &Frame, kappa: Kappa, a: &LevelValues, b: &LevelValues, cut: usize) -> f64 {
    let x = scaled_sums(frame, kappa, a, cut);
    let y = scaled_sums(frame, kappa, b, cut);
    let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    x.iter()
        .zip(y.iter())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
        / scale
}

pub fn solve_kappa(frame: &Frame, kappa: Kappa, settings: &SolverSettings) -> Result<KappaSolve> {
    let k = settings.k_order;
    let lmax = settings.lmax;
    let (start, max) = match settings.m {
        MChoice::Adaptive { start, max } => (start, max),
        MChoice::Fixed(m) => (m, m),
    };
    let (mut own, other): (BTable, BTable) = tables_for(frame, kappa, start, k, lmax);
    let mut m = start;
    let mut main = e_values(frame, kappa, &own, &other, m, k, lmax)?;
    let mut lower_m = None;
    let mut converged = false;
    let mut change = f64::NAN;
    while m + M_STEP <= max {
        own.extend(frame, m + M_STEP);
        let next = e_values(frame, kappa, &own, &other, m + M_STEP, k, lmax)?;
        let cut = level_cut(frame, &next, settings.level_tol).cut;
        change = sums_change(frame, kappa, &main, &next, cut);
        m += M_STEP;
        lower_m = Some(std::mem::replace(&mut main, next));
        if change <= settings.m_tol {
            converged = true;
            break;
        }
    }
    if matches!(settings.m, MChoice::Fixed(_)) {
        converged = true;
    }
    let lower_m = match lower_m {
        Some(v) => v,
        None => e_values(frame, kappa, &own, &other, m - M_STEP, k, lmax)?,
    };
    if change.is_nan() {
        let cut = level_cut(frame, &main, settings.level_tol).cut;
        change = sums_change(frame, kappa, &lower_m, &main, cut);
    }
    let lower_k = e_values(frame, kappa, &own, &other, m, k - 1, lmax)?;
    Ok(KappaSolve {
        kappa,
        m,
        m_converged: converged,
        m_change: change,
        main,
        lower_k,
        lower_m,
    })
}

/// Spread of `cos(2πω)` over the companion solves, used as its error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBudget {
    /// Change when the correction order drops to `K - 1`.
    pub k_order: f64,
    /// Change when `m` drops by 10.
    pub m_order: f64,
    /// Change when the last two included levels are dropped.
    pub levels: f64,
    /// Rounding floor from the working precision.
    pub rounding: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.k_order.max(self.m_order) + self.levels + self.rounding
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub frame: Frame,
    pub lambda_shifted: bool,
    pub solves: [KappaSolve; 2],
    pub grids: [EGrid; 2],
    pub stokes: StokesSet,
    pub result: FloquetResult,
    pub solutions: MultiplicativeSolutions,
    pub budget: ErrorBudget,
    pub warnings: Vec<Warning>,
}

impl Solution {
    /// Estimated absolute error of `cos(2πω)`.
    pub fn cos_error(&self) -> f64 {
        self.budget.total()
    }

    pub fn cos_two_pi_omega(&self) -> f64 {
        self.result.cos_two_pi_omega.re.to_f64()
    }
}

fn frame_for(params: &EquationParams, settings: &SolverSettings) -> Result<(Frame, bool)> {
    let prec = settings.prec;
    let lambda = match settings.lambda {
        LambdaChoice::Auto => choose_lambda(params, prec),
        LambdaChoice::Fixed(x) => Float::with_val(prec, x),
    };
    let shifted = settings.lambda == LambdaChoice::Auto && lambda_was_shifted(params, &lambda);
    Ok((derive_frame(params, &lambda, prec)?, shifted))
}

fn cos_from_sums(frame: &Frame, sums: &[[Float; 3]; 2]) -> Result<Float> {
    let sg = sigmas_from_sums(frame, sums);
    Ok(exponent_from_sigmas(frame, &sg, f64::INFINITY)?
        .cos_two_pi_omega
        .re)
}

pub fn solve(params: &EquationParams, settings: &SolverSettings) -> Result<Solution> {
    settings.validate()?;
    params.validate()?;
    let (frame, lambda_shifted) = frame_for(params, settings)?;
    let (plus, minus) = rayon::join(
        || solve_kappa(&frame, Kappa::Plus, settings),
        || solve_kappa(&frame, Kappa::Minus, settings),
    );
    let solves = [plus?, minus?];
    let grids = solves.clone().map(|s| {
        EGrid::assemble(
            s.kappa,
            s.m,
            settings.k_order,
            s.main,
            &s.lower_k,
            &s.lower_m,
        )
    });
    let stokes = stokes_multipliers(&frame, &grids[0], &grids[1], settings.level_tol);
    let result = characteristic_exponent(&frame, &stokes, settings.im_tol)?;
    let solutions = multiplicative_solutions(&result.circuit, &result);

    let cuts = [stokes.cuts[0].cut, stokes.cuts[1].cut];
    let sums_of = |pick: &dyn Fn(&KappaSolve) -> &LevelValues, drop: usize| {
        [Kappa::Plus, Kappa::Minus].map(|k| {
            let s = &solves[k.index()];
            level_sums(&frame, k, pick(s), cuts[k.index()].saturating_sub(drop))
        })
    };
    let cos = &result.cos_two_pi_omega.re;
    let spread = |sums: [[Float; 3]; 2]| -> Result<f64> {
        let c = cos_from_sums(&frame, &sums)?;
        Ok(Float::with_val(frame.prec(), &c - cos).abs().to_f64())
    };
    let budget = ErrorBudget {
        k_order: spread(sums_of(&|s| &s.lower_k, 0))?,
        m_order: spread(sums_of(&|s| &s.lower_m, 0))?,
        levels: spread(sums_of(&|s| &s.main, 2))?,
        rounding: (1.0 + cos.to_f64().abs()) * 2f64.powi(-(settings.prec as i32) + 40),
    };

    let mut warnings = Vec::new();
    if lambda_shifted {
        warnings.push(Warning::new(
            "frame",
            format!(
                "lambda moved off L to {} to keep mu clear of integers",
                frame.lambda().to_f64()
            ),
        ));
    }
    for k in Kappa::BOTH {
        let s = &solves[k.index()];
        if !s.m_converged {
            warnings.push(Warning::new(
                "stokes",
                format!(
                    "kappa {k}: level sums still changing by {:e} at m = {}",
                    s.m_change, s.m
                ),
            ));
        }
        if !stokes.cuts[k.index()].converged {
            warnings.push(Warning::new(
                "stokes",
                format!(
                    "kappa {k}: level contributions not below tolerance by level {}",
                    settings.lmax
                ),
            ));
        }
    }
    if solutions.degenerate {
        warnings.push(Warning::new(
            "monodromy",
            "multipliers p1 and p2 coincide or a solution pair vanishes",
        ));
    }
    if result.det_deviation > 1e-8 {
        warnings.push(Warning::new(
            "monodromy",
            format!("|det T - 1| = {:e}", result.det_deviation.to_f64()),
        ));
    }
    Ok(Solution {
        frame,
        lambda_shifted,
        solves,
        grids,
        stokes,
        result,
        solutions,
        budget,
        warnings,
    })
}
