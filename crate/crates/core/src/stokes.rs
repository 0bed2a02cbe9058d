//! Connection coefficients `e(-κ; n1, n2)` from the large-`m` behaviour of
//! the b-table, their level sums `S_r(κ)` and the six Stokes multipliers.

use rug::ops::Pow;
use rug::Float;

use crate::coeffs::{b_table, BTable};
use crate::error::{Error, Result};
use crate::frame::{Frame, Kappa};
use crate::mp::{self, Complex};

/// Absolute size below which the diagonal bracket makes the level solve
/// ill-conditioned.
pub const BRACKET_TOL: f64 = 1e-8;

/// Level grading of `(n1, n2)`.
pub fn level(n1: usize, n2: usize) -> usize {
    2 * n1 + n2
}

/// `H(-κ; k, l1, l2; q1, q2)`: the correction coefficient built from the
/// opposite table. `b_other` must be the table for `-κ`.
pub fn h_coeff(
    frame: &Frame,
    kappa: Kappa,
    k: usize,
    l1: usize,
    l2: usize,
    q1: usize,
    q2: usize,
    b_other: &BTable,
) -> Result<Float> {
    let prec = frame.prec();
    let mut acc = Float::with_val(prec, 0);
    if l1 + l2 > k {
        return Ok(acc);
    }
    let mu = frame.mu(kappa);
    let a = shifted_base(frame, kappa, level(q1, q2));
    let fact = mp::factorials(prec, k);
    let step = Float::with_val(prec, frame.s0() * (-2 * kappa.sign()));
    for j in l1 + l2..=k {
        let pj = mp::pochhammer(&a, j);
        if pj.is_zero() {
            return Err(Error::DegenerateMu {
                level: level(q1, q2),
                j,
            });
        }
        let mut t = mp::pochhammer(mu, k - j);
        t /= &fact[k - j];
        t /= &pj;
        t *= Float::with_val(prec, (&step).pow(j as u32));
        t *= b_other.value(j, l1, l2)?;
        acc += t;
    }
    Ok(acc)
}

/// `1 + μ(-κ) + gq/3`.
fn shifted_base(frame: &Frame, kappa: Kappa, gq: usize) -> Float {
    let prec = frame.prec();
    let mut a = Float::with_val(prec, frame.mu(kappa.opposite()) + 1u32);
    a += Float::with_val(prec, gq as u32) / 3u32;
    a
}

/// Values of `e(-κ; n1, n2)` stored level by level: `values[l][n1]` with
/// `n2 = l - 2 n1`.
pub type LevelValues = Vec<Vec<Float>>;

/// Solves the connection relation at fixed `m` and correction order `k_order`
/// for every `(n1, n2)` with `2 n1 + n2 ≤ lmax`, in increasing level.
pub fn e_values(
    frame: &Frame,
    kappa: Kappa,
    b_self: &BTable,
    b_other: &BTable,
    m: usize,
    k_order: usize,
    lmax: usize,
) -> Result<LevelValues> {
    let prec = frame.prec();
    let k = kappa.sign();
    let n1_max = lmax / 2;
    let mu = frame.mu(kappa);
    let mu_other = frame.mu(kappa.opposite());

    let two_k_s0 = Float::with_val(prec, frame.s0() * (2 * k));
    let j1 = mp::exp_terms(&Float::with_val(prec, frame.t10() * (-2 * k)), n1_max);
    let j2 = mp::exp_terms(&Float::with_val(prec, frame.t20() * (-2 * k)), lmax);
    let fact = mp::factorials(prec, k_order);
    // (μ)_i / i!
    let mu_terms: Vec<Float> = mp::pochhammer_table(mu, k_order)
        .into_iter()
        .zip(fact.iter())
        .map(|(p, f)| p / f)
        .collect();
    // (-2κ s0)^j
    let step = Float::with_val(prec, -&two_k_s0);
    let mut step_pow = Vec::with_capacity(k_order + 1);
    step_pow.push(Float::with_val(prec, 1));
    for j in 1..=k_order {
        step_pow.push(Float::with_val(prec, &step_pow[j - 1] * &step));
    }
    let l1_cap = k_order.min(n1_max);
    let l2_cap = k_order.min(lmax);
    // c_j b(-κ; j, l1, l2), indexed [l1][l2][j]
    let mut weighted = vec![vec![Vec::new(); l2_cap + 1]; l1_cap + 1];
    for l1 in 0..=l1_cap {
        for l2 in 0..=l2_cap.min(k_order - l1) {
            let mut row = Vec::with_capacity(k_order + 1);
            for j in 0..=k_order {
                if j < l1 + l2 {
                    row.push(Float::with_val(prec, 0));
                } else {
                    row.push(Float::with_val(
                        prec,
                        &step_pow[j] * b_other.value(j, l1, l2)?,
                    ));
                }
            }
            weighted[l1][l2] = row;
        }
    }

    // bracket[gq][d1][d2]
    let mut bracket: Vec<Vec<Vec<Float>>> = Vec::with_capacity(lmax + 1);
    for gq in 0..=lmax {
        let a = shifted_base(frame, kappa, gq);
        let poch_a = mp::pochhammer_table(&a, k_order);
        if let Some(j) = poch_a.iter().position(|p| p.is_zero()) {
            return Err(Error::DegenerateMu { level: gq, j });
        }
        let a_minus_m = Float::with_val(prec, &a - m as u32);
        let poch_am = mp::pochhammer_table(&a_minus_m, k_order);
        if let Some(j) = poch_am.iter().position(|p| p.is_zero()) {
            return Err(Error::DegenerateMu { level: gq, j });
        }
        let ratio: Vec<Float> = poch_a
            .iter()
            .zip(poch_am.iter())
            .map(|(x, y)| Float::with_val(prec, x / y))
            .collect();
        // R[j] = Σ_{k ≥ j} ratio_k (μ)_{k-j}/(k-j)!, already divided by (a)_j
        let r: Vec<Float> = (0..=k_order)
            .map(|j| {
                let mut s = Float::with_val(prec, 0);
                for kk in j..=k_order {
                    s += Float::with_val(prec, &ratio[kk] * &mu_terms[kk - j]);
                }
                s / &poch_a[j]
            })
            .collect();
        // G[l1][l2] = Σ_k ratio_k H(k, l1, l2)
        let mut g = vec![vec![Float::with_val(prec, 0); l2_cap + 1]; l1_cap + 1];
        for l1 in 0..=l1_cap {
            for l2 in 0..=l2_cap.min(k_order - l1) {
                let mut s = Float::with_val(prec, 0);
                for j in l1 + l2..=k_order {
                    s += Float::with_val(prec, &r[j] * &weighted[l1][l2][j]);
                }
                g[l1][l2] = s;
            }
        }
        let span = lmax - gq;
        let d1_max = span / 2;
        // T[l2][d1] = Σ_{l1} G[l1][l2] J1[d1 - l1]
        let mut t = vec![vec![Float::with_val(prec, 0); d1_max + 1]; l2_cap + 1];
        for (l2, row) in t.iter_mut().enumerate() {
            for (d1, cell) in row.iter_mut().enumerate() {
                for l1 in 0..=d1.min(l1_cap) {
                    if l1 + l2 > k_order {
                        break;
                    }
                    *cell += Float::with_val(prec, &g[l1][l2] * &j1[d1 - l1]);
                }
            }
        }
        let mut br = Vec::with_capacity(d1_max + 1);
        for d1 in 0..=d1_max {
            let d2_max = span - 2 * d1;
            let mut row = Vec::with_capacity(d2_max + 1);
            for d2 in 0..=d2_max {
                let mut s = Float::with_val(prec, 0);
                for l2 in 0..=d2.min(l2_cap) {
                    s += Float::with_val(prec, &t[l2][d1] * &j2[d2 - l2]);
                }
                row.push(s);
            }
            br.push(row);
        }
        bracket.push(br);
    }

    // ln|Γ(-μ(-κ) - gq/3 + m)| with sign
    let mut lg = Vec::with_capacity(lmax + 1);
    for gq in 0..=lmax {
        let mut x = Float::with_val(prec, m as u32) - mu_other;
        x -= Float::with_val(prec, gq as u32) / 3u32;
        lg.push(mp::ln_gamma_signed(&x)?);
    }
    // -π Γ(1+m)/Γ(1+μ+m) (2κ s0)^m, as log and sign
    let (lg_m, _) = mp::ln_gamma_signed(&Float::with_val(prec, m as u32 + 1))?;
    let (lg_mu, sg_mu) = mp::ln_gamma_signed(&Float::with_val(prec, mu + (m as u32 + 1)))?;
    let two_s0 = Float::with_val(prec, frame.s0() * 2u32);
    let mut ln_pref = Float::with_val(prec, mp::pi(prec).ln_ref());
    ln_pref += lg_m;
    ln_pref -= lg_mu;
    ln_pref += Float::with_val(prec, two_s0.ln_ref()) * m as u32;
    let sign_pref = -sg_mu * kappa.pow_sign(m);

    let gamma_shift = |gq: usize, gn: usize| -> Float {
        let mut v = Float::with_val(prec, &lg[gq].0 - &lg[gn].0).exp();
        if lg[gq].1 * lg[gn].1 < 0 {
            v = -v;
        }
        v
    };

    let mut values: LevelValues = Vec::with_capacity(lmax + 1);
    for lev in 0..=lmax {
        let mut row = Vec::with_capacity(lev / 2 + 1);
        let mut first_scale = Float::with_val(prec, &ln_pref - &lg[lev].0).exp();
        if sign_pref * lg[lev].1 < 0 {
            first_scale = -first_scale;
        }
        let diag = &bracket[lev][0][0];
        for n1 in 0..=lev / 2 {
            let n2 = lev - 2 * n1;
            if diag.clone().abs() < BRACKET_TOL {
                return Err(Error::IllConditioned {
                    n1,
                    n2,
                    value: diag.to_f64(),
                });
            }
            let mut rhs = Float::with_val(prec, &first_scale * b_self.value(m, n1, n2)?);
            for q1 in 0..=n1 {
                for q2 in 0..=n2 {
                    if (q1, q2) == (n1, n2) {
                        continue;
                    }
                    let gq = level(q1, q2);
                    let e_q = &values[gq][q1];
                    if e_q.is_zero() {
                        continue;
                    }
                    let mut t = gamma_shift(gq, lev);
                    t *= e_q;
                    t *= &bracket[gq][n1 - q1][n2 - q2];
                    rhs -= t;
                }
            }
            row.push(rhs / diag);
        }
        values.push(row);
    }
    Ok(values)
}

/// Finite-`m` evaluation of the leading-order limit formula for
/// `e(-κ; n1, n2)`; a sanity cross-check on [`e_values`].
pub fn e_limit_estimate(
    frame: &Frame,
    kappa: Kappa,
    n1: usize,
    n2: usize,
    m: usize,
    b_tab: &BTable,
) -> Result<Float> {
    let prec = frame.prec();
    let k = kappa.sign();
    let j1 = mp::exp_terms(&Float::with_val(prec, frame.t10() * (2 * k)), n1);
    let j2 = mp::exp_terms(&Float::with_val(prec, frame.t20() * (2 * k)), n2);
    let mut sum = Float::with_val(prec, 0);
    for a in 0..=n1 {
        for b in 0..=n2 {
            let v = b_tab.value(m, a, b)?;
            sum += Float::with_val(prec, v * &j1[n1 - a]) * &j2[n2 - b];
        }
    }
    let mf = m as u32;
    let top = Float::with_val(prec, mf + 1);
    let den1 = Float::with_val(prec, frame.mu(kappa) + (mf + 1));
    let mut den2 = Float::with_val(prec, mf) - frame.mu(kappa.opposite());
    den2 -= Float::with_val(prec, level(n1, n2) as u32) / 3u32;
    let g = mp::gamma_ratio(&[&top], &[&den1, &den2])?;
    let two_k_s0 = Float::with_val(prec, frame.s0() * (2 * k));
    let pw = Float::with_val(prec, (&two_k_s0).pow(mf));
    Ok(-(mp::pi(prec) * g * pw * sum))
}

/// Grid of `e(-κ; n1, n2)` with per-entry error estimates. `kappa_source`
/// is the κ of the b-table that generated it.
#[derive(Clone, Debug)]
pub struct EGrid {
    pub kappa_source: Kappa,
    pub m_used: usize,
    pub k_used: usize,
    pub lmax: usize,
    values: LevelValues,
    errors: LevelValues,
}

impl EGrid {
    /// Combines the main solve with the `K-1` and `m - Δ` companions.
    pub fn assemble(
        kappa_source: Kappa,
        m_used: usize,
        k_used: usize,
        main: LevelValues,
        lower_k: &LevelValues,
        lower_m: &LevelValues,
    ) -> EGrid {
        let lmax = main.len() - 1;
        let errors = main
            .iter()
            .enumerate()
            .map(|(l, row)| {
                row.iter()
                    .enumerate()
                    .map(|(n1, v)| {
                        let a = Float::with_val(v.prec(), v - &lower_k[l][n1]).abs();
                        let b = Float::with_val(v.prec(), v - &lower_m[l][n1]).abs();
                        a.max(&b)
                    })
                    .collect()
            })
            .collect();
        EGrid {
            kappa_source,
            m_used,
            k_used,
            lmax,
            values: main,
            errors,
        }
    }

    /// The κ labelling the coefficients themselves, `-kappa_source`.
    pub fn kappa_target(&self) -> Kappa {
        self.kappa_source.opposite()
    }

    pub fn get(&self, n1: usize, n2: usize) -> Option<&Float> {
        self.values.get(level(n1, n2)).and_then(|r| r.get(n1))
    }

    pub fn error(&self, n1: usize, n2: usize) -> Option<&Float> {
        self.errors.get(level(n1, n2)).and_then(|r| r.get(n1))
    }

    pub fn levels(&self) -> &LevelValues {
        &self.values
    }

    /// `(n1, n2, value, error)` in increasing level.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Float, &Float)> {
        self.values.iter().enumerate().flat_map(move |(l, row)| {
            row.iter()
                .enumerate()
                .map(move |(n1, v)| (n1, l - 2 * n1, v, &self.errors[l][n1]))
        })
    }
}

/// Builds the two b-tables needed for one κ: the own table to `m` with
/// columns covering `lmax`, the opposite one to `k_order`.
pub fn tables_for(
    frame: &Frame,
    kappa: Kappa,
    m: usize,
    k_order: usize,
    lmax: usize,
) -> (BTable, BTable) {
    let own = b_table(frame, kappa, m, lmax / 2, lmax);
    let other = b_table(
        frame,
        kappa.opposite(),
        k_order,
        k_order.min(lmax / 2),
        k_order.min(lmax),
    );
    (own, other)
}

/// Step in `m` used for the asymptotic-order error estimate.
pub const M_STEP: usize = 10;

/// Fixed-`m` grid with error estimates from `(m, K-1)` and `(m - 10, K)`.
pub fn e_grid(frame: &Frame, kappa: Kappa, lmax: usize, m: usize, k_order: usize) -> Result<EGrid> {
    if m < M_STEP + 1 || k_order == 0 {
        return Err(Error::Precondition(format!(
            "e_grid needs m > {M_STEP} and K ≥ 1 (got m={m}, K={k_order})"
        )));
    }
    let (own, other) = tables_for(frame, kappa, m, k_order, lmax);
    let main = e_values(frame, kappa, &own, &other, m, k_order, lmax)?;
    let lower_k = e_values(frame, kappa, &own, &other, m, k_order - 1, lmax)?;
    let lower_m = e_values(frame, kappa, &own, &other, m - M_STEP, k_order, lmax)?;
    Ok(EGrid::assemble(kappa, m, k_order, main, &lower_k, &lower_m))
}

/// `η = exp(iπ/3)`.
pub fn eta(prec: u32) -> Complex {
    Complex::exp_i_pi(&(Float::with_val(prec, 1) / 3u32))
}

/// Truncation decision for the level sums of one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelCut {
    /// Highest level included.
    pub cut: usize,
    pub converged: bool,
    /// `(2 s0)^{-l/3} |Σ_{2n1+n2=l} e|` for every available level.
    pub contributions: Vec<f64>,
}

/// Stops after the first pair of consecutive levels whose contributions are
/// below `tol` times the largest contribution seen.
pub fn level_cut(frame: &Frame, values: &LevelValues, tol: f64) -> LevelCut {
    let prec = frame.prec();
    let two_s0 = Float::with_val(prec, frame.s0() * 2u32);
    let w = Float::with_val(prec, two_s0.ln_ref()) / -3i32;
    let contributions: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(l, row)| {
            let mut s = Float::with_val(prec, 0);
            for v in row {
                s += v;
            }
            let scale = Float::with_val(prec, &w * l as u32).exp();
            (s.abs() * scale).to_f64()
        })
        .collect();
    let mut peak = 0.0f64;
    for (l, c) in contributions.iter().enumerate() {
        peak = peak.max(*c);
        if l >= 2 && *c <= tol * peak && contributions[l - 1] <= tol * peak {
            return LevelCut {
                cut: l,
                converged: true,
                contributions,
            };
        }
    }
    LevelCut {
        cut: values.len() - 1,
        converged: false,
        contributions,
    }
}

/// `S_0, S_1, S_2` for one κ from the grid generated by that κ, summing
/// levels `0..=cut`.
pub fn level_sums(frame: &Frame, kappa: Kappa, values: &LevelValues, cut: usize) -> [Float; 3] {
    let prec = frame.prec();
    let inv = Float::with_val(prec, frame.s0() * (2 * kappa.sign())).recip();
    let mut out = [
        Float::with_val(prec, 0),
        Float::with_val(prec, 0),
        Float::with_val(prec, 0),
    ];
    let mut weight = Float::with_val(prec, 1);
    for (lp, chunk) in values[..=cut].chunks(3).enumerate() {
        if lp > 0 {
            weight *= &inv;
        }
        for (r, row) in chunk.iter().enumerate() {
            let mut s = Float::with_val(prec, 0);
            for v in row {
                s += v;
            }
            out[r] += s * &weight;
        }
    }
    out
}

/// The six multipliers `σ_n(κ)`, indexed `[n][κ.index()]`, from the sums
/// `s[κ.index()][r]`.
pub fn sigmas_from_sums(frame: &Frame, s: &[[Float; 3]; 2]) -> [[Complex; 2]; 3] {
    let prec = frame.prec();
    let eta = eta(prec);
    let eta_pow: Vec<Complex> = (0..6).map(|j| eta.powi(j)).collect();
    let two_s0 = Float::with_val(prec, frame.s0() * 2u32);
    let c1 = mp::pow_real(&two_s0, &(Float::with_val(prec, -1) / 3u32));
    let c2 = mp::pow_real(&two_s0, &(Float::with_val(prec, -2) / 3u32));
    // (η power on S1, η power on S2) for σ_n(+1) and σ_n(-1)
    const PHASES: [[(i64, i64); 2]; 3] = [[(0, 0), (1, 2)], [(2, 4), (3, 0)], [(4, 2), (5, 4)]];
    let build = |n: usize, k: usize| -> Complex {
        let (e1, e2) = PHASES[n][k];
        let [s0, s1, s2] = &s[k];
        let t1 = eta_pow[e1 as usize].scale(&Float::with_val(prec, &c1 * s1));
        let t2 = eta_pow[e2 as usize].scale(&Float::with_val(prec, &c2 * s2));
        &(&Complex::from_real(s0.clone()) + &t1) + &t2
    };
    [
        [build(0, 0), build(0, 1)],
        [build(1, 0), build(1, 1)],
        [build(2, 0), build(2, 1)],
    ]
}

#[derive(Clone, Debug)]
pub struct StokesSet {
    /// `S_r(κ)` as `s[κ.index()][r]`.
    pub s: [[Float; 3]; 2],
    /// `σ_n(κ)` as `sigma[n][κ.index()]`.
    pub sigma: [[Complex; 2]; 3],
    pub eta: Complex,
    pub cuts: [LevelCut; 2],
    /// Bound on the level-sum errors inherited from the e-grid estimates.
    pub sum_errors: [[Float; 3]; 2],
}

impl StokesSet {
    pub fn sigma(&self, n: usize, k: Kappa) -> &Complex {
        &self.sigma[n][k.index()]
    }

    pub fn sum(&self, k: Kappa, r: usize) -> &Float {
        &self.s[k.index()][r]
    }

    pub fn converged(&self) -> bool {
        self.cuts.iter().all(|c| c.converged)
    }
}

/// Level sums and multipliers from the two grids. `grid_plus` is the grid
/// generated by κ = +1 (holding `e(-1; ·)`), which feeds `S_r(+1)`.
pub fn stokes_multipliers(
    frame: &Frame,
    grid_plus: &EGrid,
    grid_minus: &EGrid,
    tol: f64,
) -> StokesSet {
    let prec = frame.prec();
    let grids = [grid_plus, grid_minus];
    let cuts = [
        level_cut(frame, grid_plus.levels(), tol),
        level_cut(frame, grid_minus.levels(), tol),
    ];
    let s = [
        level_sums(frame, Kappa::Plus, grid_plus.levels(), cuts[0].cut),
        level_sums(frame, Kappa::Minus, grid_minus.levels(), cuts[1].cut),
    ];
    let sum_errors = [
        level_sums(
            frame,
            Kappa::Plus,
            &abs_levels(&grids[0].errors),
            cuts[0].cut,
        ),
        level_sums(
            frame,
            Kappa::Minus,
            &abs_levels(&grids[1].errors),
            cuts[1].cut,
        ),
    ]
    .map(|a| a.map(|x| x.abs()));
    let sigma = sigmas_from_sums(frame, &s);
    StokesSet {
        s,
        sigma,
        eta: eta(prec),
        cuts,
        sum_errors,
    }
}

fn abs_levels(v: &LevelValues) -> LevelValues {
    v.iter()
        .map(|r| r.iter().map(|x| x.clone().abs()).collect())
        .collect()
}
