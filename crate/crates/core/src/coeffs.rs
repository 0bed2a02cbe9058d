//! Recurrence-defined coefficient families: the formal-solution
//! coefficients `a_n(κ)` and the triangular table `b(κ; m, n1, n2)`.

use std::io::{self, Write};

use rug::Float;

use crate::error::{Error, Result};
use crate::frame::{Frame, Kappa};
use crate::mp;

/// `a_0(κ), ..., a_N(κ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSeries {
    pub kappa: Kappa,
    pub values: Vec<Float>,
}

impl CoeffSeries {
    pub fn get(&self, n: usize) -> Option<&Float> {
        self.values.get(n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Coefficients of the formal solution at infinity for the given κ.
pub fn a_series(frame: &Frame, kappa: Kappa, n_max: usize) -> CoeffSeries {
    let prec = frame.prec();
    let k = kappa.sign();
    let tau = frame.tau(kappa);
    let (p1, p2, p3) = (&frame.p1, &frame.p2, &frame.p3);
    let p1sq = Float::with_val(prec, p1.square_ref());
    let lsq = Float::with_val(prec, frame.l().square_ref());
    let denom_unit = Float::with_val(prec, p3 * (6 * k));

    let mut a: Vec<Float> = Vec::with_capacity(n_max + 1);
    a.push(Float::with_val(prec, 1));
    for n in 1..=n_max {
        let at = |i: isize| -> Option<&Float> {
            if i < 0 {
                None
            } else {
                Some(&a[i as usize])
            }
        };
        let n_i = n as isize;
        let tn = Float::with_val(prec, tau + n as u32);
        let mut r = Float::with_val(prec, 0);
        if let Some(v) = at(n_i - 1) {
            // -4κ p2 (τ+n-2) + p1² - B2
            let mut c = Float::with_val(prec, &tn - 2u32);
            c *= p2;
            c *= -4 * k;
            c += &p1sq;
            c -= frame.b(2);
            r += c * v;
        }
        if let Some(v) = at(n_i - 2) {
            // -2κ p1 (τ+n-5/2) - B1
            let mut c = Float::with_val(prec, &tn - 2.5f64);
            c *= p1;
            c *= -2 * k;
            c -= frame.b(1);
            r += c * v;
        }
        if let Some(v) = at(n_i - 3) {
            // (τ+n-3)² - L²
            let mut c = Float::with_val(prec, &tn - 3u32);
            c.square_mut();
            c -= &lsq;
            r += c * v;
        }
        for m in 1..=6 {
            if let Some(v) = at(n_i - m as isize - 3) {
                r -= Float::with_val(prec, frame.d(m) * v);
            }
        }
        r /= Float::with_val(prec, &denom_unit * n as u32);
        a.push(r);
    }
    CoeffSeries { kappa, values: a }
}

/// Dense table of `b(κ; m, n1, n2)` for `m ≤ max_m`, `n1 ≤ n1_cap`,
/// `n2 ≤ n2_cap`. Entries outside the support `n1 + n2 ≤ m` are stored as zero.
#[derive(Clone, Debug)]
pub struct BTable {
    kappa: Kappa,
    prec: u32,
    max_m: usize,
    n1_cap: usize,
    n2_cap: usize,
    values: Vec<Float>,
    zero: Float,
}

impl BTable {
    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn caps(&self) -> (usize, usize, usize) {
        (self.max_m, self.n1_cap, self.n2_cap)
    }

    fn slab(&self) -> usize {
        (self.n1_cap + 1) * (self.n2_cap + 1)
    }

    fn idx(&self, m: usize, n1: usize, n2: usize) -> usize {
        m * self.slab() + n1 * (self.n2_cap + 1) + n2
    }

    pub fn covers(&self, m: usize, n1: usize, n2: usize) -> bool {
        m <= self.max_m && n1 <= self.n1_cap && n2 <= self.n2_cap
    }

    /// Entry lookup. Negative indices are exact zeros; indices beyond the caps
    /// give `None`.
    pub fn get(&self, m: i64, n1: i64, n2: i64) -> Option<&Float> {
        if m < 0 || n1 < 0 || n2 < 0 {
            return Some(&self.zero);
        }
        let (m, n1, n2) = (m as usize, n1 as usize, n2 as usize);
        if !self.covers(m, n1, n2) {
            return None;
        }
        Some(&self.values[self.idx(m, n1, n2)])
    }

    pub fn value(&self, m: usize, n1: usize, n2: usize) -> Result<&Float> {
        self.get(m as i64, n1 as i64, n2 as i64)
            .ok_or(Error::IncompleteTable { m, n1, n2 })
    }

    /// Grows the table in `m`, keeping the column caps.
    pub fn extend(&mut self, frame: &Frame, new_max_m: usize) {
        if new_max_m <= self.max_m && !self.values.is_empty() {
            return;
        }
        let start = if self.values.is_empty() {
            0
        } else {
            self.max_m + 1
        };
        let slab = self.slab();
        self.values
            .resize((new_max_m + 1) * slab, Float::with_val(self.prec, 0));
        self.max_m = new_max_m;
        let coef = RowCoefficients::new(frame, self.kappa);
        for m in start..=new_max_m {
            for n1 in 0..=self.n1_cap.min(m) {
                for n2 in 0..=self.n2_cap.min(m - n1) {
                    let v = self.compute(&coef, frame, m, n1, n2);
                    let i = self.idx(m, n1, n2);
                    self.values[i] = v;
                }
            }
        }
    }

    fn compute(&self, c: &RowCoefficients, frame: &Frame, m: usize, n1: usize, n2: usize) -> Float {
        let prec = self.prec;
        if m == 0 {
            return Float::with_val(prec, if n1 == 0 && n2 == 0 { 1 } else { 0 });
        }
        let g = 3 * m as i64 - 2 * n1 as i64 - n2 as i64;
        if g == 0 {
            return Float::with_val(prec, 0);
        }
        let (m, n1, n2) = (m as i64, n1 as i64, n2 as i64);
        let at =
            |mm: i64, a: i64, b: i64| self.get(mm, a, b).expect("recurrence stays inside caps");
        let gt = Float::with_val(prec, &c.tau + g);
        let mut r = Float::with_val(prec, 0);

        let v = at(m - 1, n1, n2);
        if !v.is_zero() {
            let mut t = Float::with_val(prec, &gt - 3u32);
            t.square_mut();
            t -= &c.lsq;
            r += t * v;
        }
        let v = at(m - 1, n1 - 1, n2);
        if !v.is_zero() {
            let mut t = Float::with_val(prec, &gt - 2u32);
            t *= &c.m4kt10;
            t += &c.c_n1;
            r += t * v;
        }
        let v = at(m - 1, n1, n2 - 1);
        if !v.is_zero() {
            let mut t = Float::with_val(prec, &gt - 2.5f64);
            t *= &c.m2kt20;
            t -= frame.b(1);
            r += t * v;
        }
        let shifts: [(i64, i64, i64, usize); 6] = [
            (2, 1, 0, 1),
            (2, 0, 1, 2),
            (2, 0, 0, 3),
            (3, 1, 0, 4),
            (3, 0, 1, 5),
            (3, 0, 0, 6),
        ];
        for (dm, d1, d2, j) in shifts {
            let dj = frame.d(j);
            if dj.is_zero() {
                continue;
            }
            let v = at(m - dm, n1 - d1, n2 - d2);
            if !v.is_zero() {
                r -= Float::with_val(prec, dj * v);
            }
        }
        r /= Float::with_val(prec, &c.six_k_s0 * g);
        r
    }

    /// Writes `m n1 n2 value` lines for every stored entry inside the support.
    pub fn dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        for m in 0..=self.max_m {
            for n1 in 0..=self.n1_cap.min(m) {
                for n2 in 0..=self.n2_cap.min(m - n1) {
                    let v = &self.values[self.idx(m, n1, n2)];
                    writeln!(out, "{m} {n1} {n2} {}", mp::to_decimal(v))?;
                }
            }
        }
        Ok(())
    }
}

/// Index-independent pieces of the b-recurrence.
struct RowCoefficients {
    tau: Float,
    lsq: Float,
    /// -4κ t10
    m4kt10: Float,
    /// t20² - B2
    c_n1: Float,
    /// -2κ t20
    m2kt20: Float,
    six_k_s0: Float,
}

impl RowCoefficients {
    fn new(frame: &Frame, kappa: Kappa) -> Self {
        let prec = frame.prec();
        let k = kappa.sign();
        RowCoefficients {
            tau: frame.tau(kappa).clone(),
            lsq: Float::with_val(prec, frame.l().square_ref()),
            m4kt10: Float::with_val(prec, frame.t10() * (-4 * k)),
            c_n1: Float::with_val(prec, frame.t20().square_ref()) - frame.b(2),
            m2kt20: Float::with_val(prec, frame.t20() * (-2 * k)),
            six_k_s0: Float::with_val(prec, frame.s0() * (6 * k)),
        }
    }
}

pub fn b_table(frame: &Frame, kappa: Kappa, max_m: usize, n1_cap: usize, n2_cap: usize) -> BTable {
    let prec = frame.prec();
    let mut t = BTable {
        kappa,
        prec,
        max_m: 0,
        n1_cap,
        n2_cap,
        values: Vec::new(),
        zero: Float::with_val(prec, 0),
    };
    t.extend(frame, max_m);
    t
}

/// `a_n` as the sum of `b(κ; m, n1, n2)` over `3m - 2n1 - n2 = n`, `n1 + n2 ≤ m`.
pub fn a_from_b(table: &BTable, n: usize) -> Result<Float> {
    let mut acc = Float::with_val(table.prec, 0);
    for m in n.div_ceil(3)..=n {
        for n1 in 0..=m {
            let n2 = 3 * m as i64 - 2 * n1 as i64 - n as i64;
            if n2 < 0 || n1 as i64 + n2 > m as i64 {
                continue;
            }
            acc += table.value(m, n1, n2 as usize)?;
        }
    }
    Ok(acc)
}

/// Two-term closed form of `b(κ; m, 0, 0)` valid when `D3 = D6 = 0`:
/// `(2κ s0)^{-m} ((τ-L)/3)_m ((τ+L)/3)_m / m!`.
pub fn b_closed_form(frame: &Frame, kappa: Kappa, m: usize) -> Result<Float> {
    if !frame.params().has_two_term_reduction() {
        return Err(Error::Precondition(
            "closed form for b(m,0,0) requires D3 = D6 = 0".into(),
        ));
    }
    let prec = frame.prec();
    let tau = frame.tau(kappa);
    let x = (Float::with_val(prec, tau - frame.l())) / 3;
    let y = (Float::with_val(prec, tau + frame.l())) / 3;
    let mut acc = mp::pochhammer(&x, m) * mp::pochhammer(&y, m);
    let two_k_s0 = Float::with_val(prec, frame.s0() * (2 * kappa.sign()));
    for j in 1..=m {
        acc /= &two_k_s0;
        acc /= j as u32;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{choose_lambda, derive_frame, EquationParams};
    use proptest::prelude::*;

    const P: u32 = 256;

    fn frame_for(d: [f64; 6], l: f64, b: [f64; 6]) -> Frame {
        let p = EquationParams::new(d, l, b).unwrap();
        let lam = choose_lambda(&p, P);
        derive_frame(&p, &lam, P).unwrap()
    }

    fn sextic() -> Frame {
        frame_for([0.0; 6], 0.0, [0.0, 0.0, 0.0, 0.0, 0.0, 9.0])
    }

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(P, a - b).abs();
        let s = Float::with_val(P, b.abs_ref());
        if s.is_zero() {
            d.to_f64()
        } else {
            (d / s).to_f64()
        }
    }

    #[test]
    fn a_series_pure_sextic() {
        let fr = sextic();
        let a = a_series(&fr, Kappa::Plus, 6);
        assert_eq!(a.values[0], 1);
        assert_eq!(a.values[1], 0);
        assert_eq!(a.values[2], 0);
        assert_eq!(a.values[3], 0.125);
        let a = a_series(&fr, Kappa::Minus, 6);
        assert_eq!(a.values[3], -0.125);
    }

    #[test]
    fn b_table_examples() {
        let fr = sextic();
        let t = b_table(&fr, Kappa::Plus, 6, 4, 4);
        assert_eq!(*t.value(0, 0, 0).unwrap(), 1);
        assert_eq!(*t.value(2, 3, 0).unwrap(), 0);
        assert_eq!(*t.value(1, 0, 0).unwrap(), 0.125);
        assert!(matches!(
            t.value(7, 0, 0),
            Err(Error::IncompleteTable { .. })
        ));
        let mut out = Vec::new();
        t.dump(&mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("0 0 0 1"));
    }

    #[test]
    fn a_from_b_examples() {
        let fr = sextic();
        let t = b_table(&fr, Kappa::Plus, 6, 6, 6);
        assert_eq!(a_from_b(&t, 0).unwrap(), 1);
        assert_eq!(a_from_b(&t, 3).unwrap(), 0.125);
        let small = b_table(&fr, Kappa::Plus, 6, 1, 1);
        assert!(matches!(
            a_from_b(&small, 5),
            Err(Error::IncompleteTable { .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        let fr = sextic();
        assert_eq!(b_closed_form(&fr, Kappa::Plus, 0).unwrap(), 1);
        assert_eq!(b_closed_form(&fr, Kappa::Plus, 1).unwrap(), 0.125);
        assert_eq!(b_closed_form(&fr, Kappa::Minus, 1).unwrap(), -0.125);
        let fr = frame_for(
            [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            0.0,
            [0.0, 0.0, 0.0, 0.0, 0.0, 9.0],
        );
        assert!(matches!(
            b_closed_form(&fr, Kappa::Plus, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn table_extension_matches_direct_build() {
        let fr = frame_for(
            [0.3, -1.0, 0.0, 0.5, 0.2, 0.0],
            0.4,
            [1.0, -2.0, 0.5, 1.5, -0.7, 4.0],
        );
        let mut t = b_table(&fr, Kappa::Minus, 10, 5, 8);
        t.extend(&fr, 25);
        let u = b_table(&fr, Kappa::Minus, 25, 5, 8);
        for m in 0..=25 {
            for n1 in 0..=5 {
                for n2 in 0..=8 {
                    assert_eq!(t.value(m, n1, n2).unwrap(), u.value(m, n1, n2).unwrap());
                }
            }
        }
    }

    fn box_params() -> impl Strategy<Value = EquationParams> {
        (
            prop::array::uniform6(-4.0..4.0f64),
            0.0..2.0f64,
            prop::array::uniform5(-4.0..4.0f64),
            1.0..16.0f64,
        )
            .prop_map(|(d, l, b5, b6)| {
                EquationParams::new(d, l, [b5[0], b5[1], b5[2], b5[3], b5[4], b6]).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn decomposition_identity(p in box_params()) {
            let lam = choose_lambda(&p, P);
            let fr = derive_frame(&p, &lam, P).unwrap();
            for k in Kappa::BOTH {
                let a = a_series(&fr, k, 24);
                let t = b_table(&fr, k, 24, 24, 24);
                for n in 0..=24 {
                    let v = a_from_b(&t, n).unwrap();
                    prop_assert!(rel(&v, &a.values[n]) < 1e-25, "n={} k={}", n, k);
                }
            }
        }

        #[test]
        fn support_and_grading_zeros(p in box_params()) {
            let lam = choose_lambda(&p, P);
            let fr = derive_frame(&p, &lam, P).unwrap();
            let t = b_table(&fr, Kappa::Plus, 12, 12, 12);
            for m in 0..=12usize {
                for n1 in 0..=12usize {
                    for n2 in 0..=12usize {
                        let v = t.value(m, n1, n2).unwrap();
                        let graded_zero = 3 * m == 2 * n1 + n2 && (m, n1, n2) != (0, 0, 0);
                        if n1 + n2 > m || graded_zero {
                            prop_assert!(v.is_zero());
                        }
                    }
                }
            }
        }

        #[test]
        fn closed_form_regression(
            d in prop::array::uniform6(-4.0..4.0f64),
            l in 0.0..2.0f64,
            b5 in prop::array::uniform5(-4.0..4.0f64),
            b6 in 1.0..16.0f64,
        ) {
            let d = [d[0], d[1], 0.0, d[3], d[4], 0.0];
            let fr = frame_for(d, l, [b5[0], b5[1], b5[2], b5[3], b5[4], b6]);
            for k in Kappa::BOTH {
                let t = b_table(&fr, k, 60, 0, 0);
                for m in 0..=60 {
                    let c = b_closed_form(&fr, k, m).unwrap();
                    prop_assert!(rel(t.value(m, 0, 0).unwrap(), &c) < 1e-25);
                }
            }
        }
    }
}
