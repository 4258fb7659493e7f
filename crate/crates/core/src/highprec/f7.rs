//! The very-well-poised series `F7(b)` dual to the cellular integrals.
//!
//! Each term is a rational function of the summation index `mu`, so the
//! series is evaluated exactly by partial fractions as a linear form in
//! `1, zeta(2), ..., zeta(7)`; a direct partial sum with a tail bound
//! serves as the second route.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{bits_for_digits, ten_pow_neg, HpReal};
use crate::params::{to_symmetric, ParamVec8, SymParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum F7Error {
    #[error("dual parameters are not integers")]
    NonIntegral,
    #[error("negative dual parameter b{0}")]
    Negative(usize),
    #[error("series diverges: decay exponent {0} <= 1")]
    Divergent(i64),
    #[error("negative factorial in the normalising prefactor")]
    NegativeFactorial,
    #[error("tail bound not reached within {0} terms")]
    TailBudget(u64),
    #[error("simple-pole residues do not cancel")]
    Residues,
}

/// `(b0; b1, ..., b7)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualParams {
    pub b: [i64; 8],
}

impl DualParams {
    /// `b0 >= 2 b_i` for all `i`.
    pub fn well_poised(&self) -> bool {
        self.b[1..].iter().all(|&x| self.b[0] >= 2 * x)
    }

    /// Polynomial decay exponent of the terms: `6 b0 - 2 sum b_i + 5`.
    pub fn decay(&self) -> i64 {
        6 * self.b[0] - 2 * self.b[1..].iter().sum::<i64>() + 5
    }

    pub fn scale(&self, n: i64) -> Self {
        DualParams { b: self.b.map(|x| x * n) }
    }
}

pub fn dual_params(a: &ParamVec8) -> DualParams {
    let [a1, a2, a3, a4, a5, a6, a7, a8] = a.0;
    DualParams {
        b: [
            a2 + a3 + a4,
            -a1 + a3 + a4,
            a2,
            a4,
            a2 + a3 - a5,
            a2 + a3 - a8,
            a4 - a6 + a8,
            a2 + a3 + a6 - a7 - a8,
        ],
    }
}

/// `b = (2 s0; s0 - s1, ..., s0 - s7)`.
pub fn dual_from_symmetric(s: &SymParams) -> Result<DualParams, F7Error> {
    let t = s.two_s;
    let mut b = [t[0]; 8];
    for i in 1..8 {
        let d = t[0] - t[i];
        if d % 2 != 0 {
            return Err(F7Error::NonIntegral);
        }
        b[i] = d / 2;
    }
    Ok(DualParams { b })
}

/// Convenience: the dual parameters through the symmetric form.
pub fn dual_params_via_symmetric(a: &ParamVec8) -> Result<DualParams, F7Error> {
    dual_from_symmetric(&to_symmetric(a))
}

fn factorial(n: i64) -> Result<Integer, F7Error> {
    if n < 0 {
        return Err(F7Error::NegativeFactorial);
    }
    Ok(Integer::from(Integer::factorial(n as u32)))
}

/// The normalising factor turning the series into `F7(b)`.
pub fn prefactor(b: &DualParams) -> Result<Rational, F7Error> {
    let [b0, b1, b2, b3, b4, b5, b6, b7] = b.b;
    let mut num = Integer::from(1);
    for e in [b0 - b1 - b6, b0 - b1 - b7, b0 - b2 - b7, b0 - b3 - b5, b0 - b4 - b5, b0 - b4 - b6] {
        num *= factorial(e)?;
    }
    Ok(Rational::from((num, factorial(b2)? * factorial(b3)?)))
}

/// Term of the series as `c * (2 mu + b0 + 2) * prod (mu + i)^{e_i}`.
#[derive(Clone, Debug)]
struct TermShape {
    b0: i64,
    /// `e_i` for `i = 1, 2, ...` (index `i - 1`).
    exps: Vec<i64>,
}

impl TermShape {
    fn new(b: &DualParams) -> Result<Self, F7Error> {
        for (i, &x) in b.b.iter().enumerate() {
            if x < 0 {
                return Err(F7Error::Negative(i));
            }
        }
        let b0 = b.b[0];
        let top = b.b.iter().map(|&x| x.max(b0 + 1)).max().unwrap_or(0) as usize + 2;
        let mut exps = vec![0i64; top];
        let mut bump = |lo: i64, hi: i64, d: i64| {
            for i in lo..=hi {
                exps[(i - 1) as usize] += d;
            }
        };
        // Gamma(b0 + mu + 2) / mu!
        bump(1, b0 + 1, 1);
        for &bj in &b.b[1..] {
            // Gamma(bj + mu + 1) / Gamma(b0 - bj + mu + 2)
            if bj < b0 - bj + 1 {
                bump(bj + 1, b0 - bj + 1, -1);
            } else {
                bump(b0 - bj + 2, bj, 1);
            }
        }
        Ok(TermShape { b0, exps })
    }

    fn eval_float(&self, mu: u64, bits: u32) -> Float {
        let mut num = Float::with_val(bits, 2 * mu + self.b0 as u64 + 2);
        let mut den = Float::with_val(bits, 1);
        for (k, &e) in self.exps.iter().enumerate() {
            let f = Float::with_val(bits, mu + k as u64 + 1);
            if e > 0 {
                num *= f.pow(e as u32);
            } else if e < 0 {
                den *= f.pow((-e) as u32);
            }
        }
        num / den
    }
}

/// Truncated power series with rational coefficients.
type Series = Vec<Rational>;

fn series_mul(a: &Series, b: &Series, len: usize) -> Series {
    let mut out = vec![Rational::new(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.cmp0().is_eq() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += Rational::from(x * y);
        }
    }
    out
}

/// `(t + c)^e` as a series in `t` truncated to `len` terms, any integer
/// `e`, `c != 0` when `e < 0`.
fn shifted_power(c: &Rational, e: i64, len: usize) -> Series {
    // (t + c)^e = c^e (1 + t/c)^e = c^e sum_r binom(e, r) (t/c)^r
    let mut out = Vec::with_capacity(len);
    let mut coef = if e >= 0 {
        Rational::from(c.clone().pow(e as u32))
    } else {
        Rational::from(c.clone().pow(e as i32))
    };
    let cinv = if c.cmp0().is_eq() { Rational::new() } else { Rational::from(c.recip_ref()) };
    for r in 0..len as i64 {
        if c.cmp0().is_eq() {
            // only (t)^e with e >= 0
            out.push(if r == e { Rational::from(1) } else { Rational::new() });
            continue;
        }
        out.push(coef.clone());
        // binom(e, r+1)/binom(e, r) = (e - r)/(r + 1)
        coef *= Rational::from((e - r, r + 1));
        coef *= &cinv;
    }
    out
}

/// `sum_{mu >= 0} term(mu) = constant + sum_s zeta[s] * zeta(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaForm {
    pub constant: Rational,
    /// Index `s` holds the coefficient of `zeta(s)`; entries 0 and 1 are zero.
    pub zeta: Vec<Rational>,
}

impl ZetaForm {
    pub fn scale(&self, c: &Rational) -> ZetaForm {
        ZetaForm {
            constant: Rational::from(&self.constant * c),
            zeta: self.zeta.iter().map(|z| Rational::from(z * c)).collect(),
        }
    }

    pub fn coeff(&self, s: usize) -> Rational {
        self.zeta.get(s).cloned().unwrap_or_default()
    }

    /// Numeric value with `digits` correct significant digits; the
    /// working precision grows until cancellation is absorbed.
    pub fn eval(&self, digits: u32) -> HpReal {
        let bits = bits_for_digits(digits);
        let mut work = bits + 16;
        loop {
            let mut acc = Float::with_val(work, &self.constant);
            let mut abs = Float::with_val(work, &self.constant).abs();
            for (s, c) in self.zeta.iter().enumerate() {
                if s < 2 || c.cmp0().is_eq() {
                    continue;
                }
                let t = Float::with_val(work, Float::zeta_u(s as u32)) * c;
                abs += Float::with_val(work, t.abs_ref());
                acc += t;
            }
            // a few roundings per term, relative to the largest term
            let err = abs >> (work as i32 - 8);
            let lost = if acc.is_zero() {
                work
            } else {
                let ratio = Float::with_val(64, &err / Float::with_val(work, acc.abs_ref()));
                (ratio.log2().to_f64() + f64::from(bits)).ceil().max(0.0) as u32
            };
            if lost == 0 || acc.is_zero() && work > 64 * bits {
                let value = Float::with_val(bits, &acc);
                let err = Float::with_val(bits, &err) + super::ulp(&value);
                return HpReal::new(value, err, digits);
            }
            work += lost + 16;
        }
    }
}

/// Exact value of the (un-normalised) series.
pub fn series_exact(b: &DualParams) -> Result<ZetaForm, F7Error> {
    let delta = b.decay();
    if delta <= 1 {
        return Err(F7Error::Divergent(delta));
    }
    let shape = TermShape::new(b)?;
    let b0 = shape.b0;
    let n = shape.exps.len();
    let mut zeta = vec![Rational::new(); 2];
    let mut constant = Rational::new();
    let mut simple = Rational::new();
    // harmonic numbers H_{i-1}^{(s)} built incrementally
    let max_order = shape.exps.iter().map(|&e| (-e).max(0)).max().unwrap_or(0) as usize;
    let mut harm = vec![Rational::new(); max_order + 1];
    for i in 1..=n as i64 {
        let d = -shape.exps[(i - 1) as usize];
        if d > 0 {
            let d = d as usize;
            // g(t) = R(t - i) t^d
            let lin = vec![Rational::from(b0 + 2 - 2 * i), Rational::from(2)];
            let mut g: Series = lin;
            g.resize(d, Rational::new());
            g.truncate(d);
            for (k0, &e) in shape.exps.iter().enumerate() {
                let k = k0 as i64 + 1;
                if k == i || e == 0 {
                    continue;
                }
                let c = Rational::from(k - i);
                g = series_mul(&g, &shifted_power(&c, e, d), d);
            }
            for s in 1..=d {
                let c = &g[d - s];
                if s == 1 {
                    simple += c;
                } else {
                    if zeta.len() <= s {
                        zeta.resize(s + 1, Rational::new());
                    }
                    zeta[s] += c;
                }
                constant -= Rational::from(c * &harm[s]);
            }
        }
        for (s, h) in harm.iter_mut().enumerate().skip(1) {
            *h += Rational::from((1, Integer::from(i).pow(s as u32)));
        }
    }
    if simple.cmp0().is_ne() {
        return Err(F7Error::Residues);
    }
    Ok(ZetaForm { constant, zeta })
}

/// `F7(b) = prefactor(b) * series`, exactly.
pub fn f7_exact(b: &DualParams) -> Result<ZetaForm, F7Error> {
    Ok(series_exact(b)?.scale(&prefactor(b)?))
}

/// `F7(b)` to `digits` digits through the exact form.
pub fn eval_f7(b: &DualParams, digits: u32) -> Result<HpReal, F7Error> {
    Ok(f7_exact(b)?.eval(digits))
}

/// `F7(b)` by direct summation, stopping once the integral-comparison tail
/// bound `t_N N / (delta - 1)` is below the target; the bound is folded
/// into the error.
pub fn eval_f7_direct(b: &DualParams, digits: u32, max_terms: u64) -> Result<HpReal, F7Error> {
    let delta = b.decay();
    if delta <= 1 {
        return Err(F7Error::Divergent(delta));
    }
    let shape = TermShape::new(b)?;
    let bits = bits_for_digits(digits) + 16;
    let target = ten_pow_neg(digits as i32 + 2, bits);
    let mut sum = Float::with_val(bits, 0);
    // terms are monotone once mu passes every pole and zero
    let start = shape.exps.len() as u64;
    for mu in 0..max_terms {
        let t = shape.eval_float(mu, bits);
        sum += &t;
        if mu >= start && mu > 0 {
            let tail = Float::with_val(bits, &t * mu) / (delta - 1) * 2u32;
            if tail <= Float::with_val(bits, sum.abs_ref()) * &target {
                let pre = prefactor(b)?;
                let value = Float::with_val(bits, &sum * &pre);
                let err = tail * &pre + Float::with_val(bits, super::ulp(&value) * (mu + 1));
                return Ok(HpReal::new(value, err, digits));
            }
        }
    }
    Err(F7Error::TailBudget(max_terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::highprec::zeta_constants;

    #[test]
    fn zero_is_two_zeta_five() {
        let f = f7_exact(&DualParams { b: [0; 8] }).unwrap();
        assert_eq!(f.constant, 0);
        assert_eq!(f.coeff(5), 2);
        for s in [2, 3, 4, 6, 7] {
            assert_eq!(f.coeff(s), 0);
        }
        let z = zeta_constants(bits_for_digits(40));
        let v = eval_f7(&DualParams { b: [0; 8] }, 40).unwrap();
        let d = Float::with_val(200, &v.value - Float::with_val(200, &z.z5 * 2u32)).abs();
        assert!(d < ten_pow_neg(38, 64));
    }

    #[test]
    fn symmetric_dual() {
        let a = ParamVec8::constant(3);
        assert_eq!(dual_params(&a).b, [9, 3, 3, 3, 3, 3, 3, 3]);
        let ex = ParamVec8([8, 16, 10, 15, 12, 16, 18, 13]);
        assert_eq!(dual_params(&ex).b[0], 41);
        assert_eq!(dual_params_via_symmetric(&ex).unwrap(), dual_params(&ex));
    }

    #[test]
    fn odd_zeta_form() {
        let b = DualParams { b: [3, 1, 1, 1, 1, 1, 1, 1] };
        let f = f7_exact(&b).unwrap();
        for s in [2, 4, 6, 7] {
            assert_eq!(f.coeff(s), 0, "zeta({s})");
        }
        assert!(f.coeff(5).is_integer());
    }

    #[test]
    fn routes_agree() {
        for b in [[3, 1, 1, 1, 1, 1, 1, 1], [12, 4, 4, 4, 4, 4, 4, 4], [10, 2, 3, 4, 5, 1, 0, 2]] {
            let b = DualParams { b };
            let e = eval_f7(&b, 30).unwrap();
            let d = eval_f7_direct(&b, 30, 200_000).unwrap();
            let gap = Float::with_val(200, &e.value - &d.value).abs();
            let scale = Float::with_val(200, e.value.abs_ref());
            assert!(gap <= scale * ten_pow_neg(25, 64), "{:?}: {} vs {}", b, e.value, d.value);
        }
    }

    #[test]
    fn slow_decay_exhausts_budget() {
        let r = eval_f7_direct(&DualParams { b: [0; 8] }, 30, 1000);
        assert!(matches!(r, Err(F7Error::TailBudget(1000))));
    }
}
