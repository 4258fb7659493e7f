//! Numerical evaluation of the five-fold integral through its nested
//! one-dimensional form, and of the three-fold Beukers-type integral.
//!
//! For fixed `y3 = u` each pair `(y1, y2)` collapses to one variable
//! `v = y1 y2` whose kernel is an explicit polynomial plus log times
//! polynomial.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use std::sync::Mutex;
use thiserror::Error;

use super::quad::{integrate01, integrate01_vec, Node, QuadConfig, QuadError};
use super::{bits_for_digits, HpReal};
use crate::exact::binom;
use crate::params::{a_to_pq, ParamVec12, ParamVec8};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegralError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("exponent {0} makes the integral divergent")]
    Divergent(&'static str),
}

/// `K(v) = v^p2 int_v^1 y^(p1-p2-q2-1) (1-y)^q1 (y-v)^q2 dy
///       = poly(v) + log(v) * log_poly(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub poly: Vec<Rational>,
    pub log_poly: Vec<Rational>,
}

fn add_at(v: &mut Vec<Rational>, k: usize, c: Rational) {
    if v.len() <= k {
        v.resize(k + 1, Rational::new());
    }
    v[k] += c;
}

impl Kernel {
    pub fn new(p1: i64, q1: i64, p2: i64, q2: i64) -> Result<Self, IntegralError> {
        if p1 < 0 || p2 < 0 || q1 < 0 || q2 < 0 {
            return Err(IntegralError::Divergent("p1, p2, q1, q2"));
        }
        let e = p1 - p2 - q2 - 1;
        let mut poly = Vec::new();
        let mut log_poly = Vec::new();
        for l in 0..=q1 {
            for k in 0..=q2 {
                let mut c = Rational::from(binom(q1, l).expect("q1 >= 0") * binom(q2, k).expect("q2 >= 0"));
                if (l + q2 - k) % 2 == 1 {
                    c = -c;
                }
                let m = e + k + l;
                let low = (p2 + q2 - k) as usize;
                if m == -1 {
                    add_at(&mut log_poly, low, -c);
                } else {
                    let c = c / Rational::from(m + 1);
                    add_at(&mut poly, low, c.clone());
                    add_at(&mut poly, (p1 + l) as usize, -c);
                }
            }
        }
        Ok(Kernel { poly, log_poly })
    }

    /// Guard bits absorbing the cancellation in [`Kernel::eval`]: the
    /// largest coefficient against the size of `K`, measured by its exact
    /// integral.
    pub fn magnitude_bits(&self) -> u32 {
        let lg = |c: &Rational| c.numer().significant_bits() as i64 - c.denom().significant_bits() as i64 + 1;
        let top = self.poly.iter().chain(&self.log_poly).map(lg).max().unwrap_or(0);
        let total = self.total();
        let small = if total.cmp0().is_gt() { -lg(&total) + 1 } else { 0 };
        (top + small).max(0) as u32 + 8
    }

    /// `K(v)` given `v` and `log v`.
    pub fn eval(&self, v: &Float, ln_v: &Float, bits: u32) -> Float {
        let horner = |cs: &[Rational]| {
            let mut acc = Float::with_val(bits, 0);
            for c in cs.iter().rev() {
                acc *= v;
                acc += c;
            }
            acc
        };
        let mut out = horner(&self.poly);
        if !self.log_poly.is_empty() {
            out += horner(&self.log_poly) * ln_v;
        }
        out
    }

    /// `int_0^1 K = B(p1+1, q1+1) B(p2+1, q2+1)`: the exact integral over
    /// the unit square.
    pub fn total(&self) -> Rational {
        let mut s = Rational::new();
        for (j, c) in self.poly.iter().enumerate() {
            s += Rational::from(c / (j as u32 + 1));
        }
        for (j, c) in self.log_poly.iter().enumerate() {
            // int v^j log v = -1/(j+1)^2
            let d = Integer::from(j as u32 + 1).square();
            s -= Rational::from(c / d);
        }
        s
    }
}

/// Beta function of positive integers as an exact rational.
pub fn beta_int(a: i64, b: i64) -> Rational {
    let f = |n: i64| Integer::from(Integer::factorial(n as u32));
    Rational::from((f(a - 1) * f(b - 1), f(a + b - 1)))
}

/// `G(u) = int int y1^p1 (1-y1)^q1 y2^p2 (1-y2)^q2 / (1 - u(1 - y1 y2))^(p0+1)`.
pub struct Inner {
    kernel: Kernel,
    m: u32,
    // order of vanishing of the right piece as u -> 1/2
    vanish: u32,
    // K(v)/v^m grows like v^-(growth + 1) towards v = 0
    growth: i64,
    bits: u32,
    rel_bits: u32,
}

impl Inner {
    pub fn new(p0: i64, p1: i64, q1: i64, p2: i64, q2: i64, bits: u32, rel_bits: u32) -> Result<Self, IntegralError> {
        if p0 < 0 {
            return Err(IntegralError::Divergent("p0"));
        }
        let kernel = Kernel::new(p1, q1, p2, q2)?;
        let bits = bits + kernel.magnitude_bits();
        Ok(Inner { kernel, m: (p0 + 1) as u32, vanish: (q1 + q2 + 2) as u32, growth: p0 - p1.min(p2), bits, rel_bits })
    }

    /// Value and relative error bound at the outer node `u`.
    pub fn eval(&self, u: &Node) -> Result<(Float, Float), QuadError> {
        let bits = self.bits;
        let cfg = QuadConfig::new(bits, self.rel_bits);
        let uu = Float::with_val(bits, &u.x);
        let uc = Float::with_val(bits, &u.xc);
        let m = self.m;
        let half = uu <= uc;
        let r = if half {
            // (1 - u(1-v)) = uc + u v, v in (0,1)
            integrate01(
                |n| {
                    let v = Float::with_val(bits, &n.x);
                    let k = self.kernel.eval(&v, &n.ln_x, bits);
                    let d = Float::with_val(bits, &uu * &v) + &uc;
                    k / d.pow(m)
                },
                cfg,
            )?
        } else {
            // split at v0 = uc/u: v = v0 x on [0, v0], v = e^{-s} beyond
            let v0 = Float::with_val(bits, &uc / &uu);
            let ln_v0 = Float::with_val(bits, u.ln_xc.clone() - &u.ln_x);
            let big_l = Float::with_val(bits, -&ln_v0);
            let uc_m = Float::with_val(bits, uc.clone().pow(m));
            let left = integrate01(
                |n| {
                    let v = Float::with_val(bits, &v0 * &n.x);
                    let ln_v = Float::with_val(bits, &ln_v0 + &n.ln_x);
                    let k = self.kernel.eval(&v, &ln_v, bits);
                    let d = Float::with_val(bits, 1 + &n.x).pow(m) * &uc_m;
                    k * &v0 / d
                },
                cfg,
            )?;
            // the right piece shrinks like L^vanish as u -> 1/2; its
            // tolerance is relaxed so that the absolute target stays fixed
            let shrink = (self.vanish as f64 * -big_l.to_f64().log2()).max(0.0).ceil() as u32;
            let rcfg = QuadConfig::new(bits, self.rel_bits - shrink.min(self.rel_bits - 16));
            let right = if self.growth > 0 {
                // w = 1/v linear on [1, u/uc]: the mass sits near v = v0
                let span = Float::with_val(bits, &uu - &uc) / &uc;
                integrate01(
                    |n| {
                        let w = Float::with_val(bits, &span * &n.x) + 1u32;
                        let v = Float::with_val(bits, w.recip_ref());
                        let ln_v = -Float::with_val(bits, w.ln_ref());
                        let k = self.kernel.eval(&v, &ln_v, bits);
                        let d = Float::with_val(bits, &uu * &v) + &uc;
                        k * &span / d.pow(m) / w.square()
                    },
                    rcfg,
                )?
            } else {
                integrate01(
                    |n| {
                        let s = Float::with_val(bits, &big_l * &n.x);
                        let v = Float::with_val(bits, -&s).exp();
                        let k = self.kernel.eval(&v, &Float::with_val(bits, -&s), bits);
                        let d = Float::with_val(bits, &uu * &v) + &uc;
                        k * &v * &big_l / d.pow(m)
                    },
                    rcfg,
                )?
            };
            super::quad::QuadResult {
                value: Float::with_val(bits, &left.value + &right.value),
                err: Float::with_val(bits, &left.err + &right.err),
                levels: left.levels.max(right.levels),
                evaluations: left.evaluations + right.evaluations,
            }
        };
        let rel = if r.value.is_zero() {
            Float::with_val(bits, 0)
        } else {
            Float::with_val(bits, &r.err / Float::with_val(bits, r.value.abs_ref()))
        };
        Ok((r.value, rel))
    }
}

/// Accuracy settings shared by the integral evaluators.
#[derive(Clone, Copy, Debug)]
pub struct EvalConfig {
    pub digits: u32,
    pub parallel: bool,
}

impl EvalConfig {
    pub fn new(digits: u32) -> Self {
        EvalConfig { digits, parallel: true }
    }

    fn bits(&self) -> u32 {
        bits_for_digits(self.digits)
    }

    fn rel_bits(&self) -> u32 {
        bits_for_digits(self.digits) - 24
    }
}

fn upow(x: &Float, e: i64, bits: u32) -> Float {
    Float::with_val(bits, x.pow(e as i32))
}

/// Outer quadrature. `wab` lists weights multiplying `G_A G_B`, `wa`
/// weights multiplying `G_A` alone. Every integrand is nonnegative, so the
/// inner relative error carries over to each component.
fn outer<WAB, WA>(
    ga: &Inner,
    gb: Option<&Inner>,
    wab: WAB,
    wa: WA,
    cfg: EvalConfig,
) -> Result<Vec<HpReal>, IntegralError>
where
    WAB: Fn(&Node, u32) -> Vec<Float> + Sync,
    WA: Fn(&Node, u32) -> Vec<Float> + Sync,
{
    let bits = cfg.bits();
    let probe = {
        let n = Node {
            x: Float::with_val(bits, 0.5),
            xc: Float::with_val(bits, 0.5),
            ln_x: Float::with_val(bits, 0.5f64.ln()),
            ln_xc: Float::with_val(bits, 0.5f64.ln()),
            w: Float::with_val(bits, 0),
        };
        (wab(&n, bits).len(), wa(&n, bits).len())
    };
    let dim = probe.0 + probe.1;
    let qcfg = QuadConfig { parallel: cfg.parallel, ..QuadConfig::new(bits, cfg.rel_bits()) };
    let worst = Mutex::new(Float::with_val(bits, 0));
    let fail = Mutex::new(None);
    let r = integrate01_vec(
        |n| {
            let evals = ga.eval(n).and_then(|a| match (gb, probe.0) {
                (Some(g), k) if k > 0 => g.eval(n).map(|b| (a, Some(b))),
                _ => Ok((a, None)),
            });
            match evals {
                Ok(((va, ra), b)) => {
                    let mut rel = ra.clone();
                    let mut out = Vec::with_capacity(dim);
                    if let Some((vb, rb)) = b {
                        rel += &rb;
                        let g = Float::with_val(bits, &va * &vb);
                        out.extend(wab(n, bits).into_iter().map(|w| w * &g));
                    }
                    out.extend(wa(n, bits).into_iter().map(|w| w * &va));
                    let mut w = worst.lock().expect("poisoned");
                    if rel > *w {
                        *w = rel;
                    }
                    out
                }
                Err(e) => {
                    *fail.lock().expect("poisoned") = Some(e);
                    vec![Float::with_val(bits, 0); dim]
                }
            }
        },
        dim,
        qcfg,
    )?;
    if let Some(e) = fail.into_inner().expect("poisoned") {
        return Err(e.into());
    }
    let rel_inner = worst.into_inner().expect("poisoned");
    Ok(r
        .values
        .into_iter()
        .zip(r.errs)
        .map(|(v, e)| {
            let err = Float::with_val(bits, v.abs_ref()) * &rel_inner + e;
            HpReal::new(v, err, cfg.digits)
        })
        .collect())
}

fn none(_: &Node, _: u32) -> Vec<Float> {
    Vec::new()
}

fn inner_a(pq: &ParamVec12, cfg: EvalConfig) -> Result<Inner, IntegralError> {
    Inner::new(pq.p[0], pq.p[1], pq.q[0], pq.p[2], pq.q[1], cfg.bits(), cfg.rel_bits() + 12)
}

fn inner_b(pq: &ParamVec12, cfg: EvalConfig) -> Result<Inner, IntegralError> {
    Inner::new(pq.p[6], pq.p[4], pq.q[3], pq.p[5], pq.q[4], cfg.bits(), cfg.rel_bits() + 12)
}

/// `J(p; q)`, the five-fold integral.
pub fn eval_j(pq: &ParamVec12, cfg: EvalConfig) -> Result<HpReal, IntegralError> {
    let (p3, q3) = (pq.p[3], pq.q[2]);
    if p3 + 1 < 0 || q3 < 0 {
        return Err(IntegralError::Divergent("p3, q3"));
    }
    let ga = inner_a(pq, cfg)?;
    let gb = inner_b(pq, cfg)?;
    let mut v = outer(&ga, Some(&gb), |n, bits| vec![upow(&n.x, p3 + 1, bits) * upow(&n.xc, q3, bits)], none, cfg)?;
    Ok(v.remove(0))
}

/// `I(a)`, evaluated as `J(p; q)` with `(p; q)` from `a`.
pub fn eval_i(a: &ParamVec8, digits: u32) -> Result<HpReal, IntegralError> {
    eval_j(&a_to_pq(a), EvalConfig::new(digits))
}

/// The three-fold integral with `y3^p3 (1-y3)^q3` and one denominator.
#[allow(clippy::too_many_arguments)]
pub fn eval_j3(p0: i64, p1: i64, p2: i64, p3: i64, q1: i64, q2: i64, q3: i64, digits: u32) -> Result<HpReal, IntegralError> {
    if p3 < 0 || q3 < 0 {
        return Err(IntegralError::Divergent("p3, q3"));
    }
    let cfg = EvalConfig::new(digits);
    let ga = Inner::new(p0, p1, q1, p2, q2, cfg.bits(), cfg.rel_bits() + 12)?;
    let mut v = outer(&ga, None, none, |n, bits| vec![upow(&n.x, p3, bits) * upow(&n.xc, q3, bits)], cfg)?;
    Ok(v.remove(0))
}

/// Terms `(c_k, p3 - k, q3 - p6 + k)` of the finite combination of
/// three-fold integrals giving twice the `zeta(3)` form.
pub fn descent_terms(pq: &ParamVec12) -> Vec<(Integer, i64, i64)> {
    let [_, _, _, p3, p4, p5, p6] = pq.p;
    let [_, _, q3, q4, q5] = pq.q;
    let lo = p4.max(p5).max(p6);
    let hi = (p4 + q4).min(p5 + q5);
    (lo..=hi)
        .filter_map(|k| {
            let c = binom(k, p6).ok()? * binom(q4, k - p4).ok()? * binom(q5, k - p5).ok()?;
            if c == 0 {
                return None;
            }
            let c = if (p4 + p5 + p6 + k) % 2 == 0 { c } else { -c };
            Some((c, p3 - k, q3 - p6 + k))
        })
        .collect()
}

/// `(I, I'')` in one pass: `I = J(p; q)`, and `I''` is half the signed
/// combination of three-fold integrals.
pub fn eval_i_and_second(a: &ParamVec8, digits: u32) -> Result<(HpReal, HpReal), IntegralError> {
    let cfg = EvalConfig::new(digits);
    let pq = a_to_pq(a);
    let (p3, q3) = (pq.p[3], pq.q[2]);
    let terms = descent_terms(&pq);
    if p3 + 1 < 0 || q3 < 0 || terms.iter().any(|(_, e, f)| *e < 0 || *f < 0) {
        return Err(IntegralError::Divergent("p3, q3"));
    }
    let ga = inner_a(&pq, cfg)?;
    let gb = inner_b(&pq, cfg)?;
    let vals = outer(
        &ga,
        Some(&gb),
        |n, bits| vec![upow(&n.x, p3 + 1, bits) * upow(&n.xc, q3, bits)],
        |n, bits| terms.iter().map(|(_, e, f)| upow(&n.x, *e, bits) * upow(&n.xc, *f, bits)).collect(),
        cfg,
    )?;
    let mut it = vals.into_iter();
    let i_val = it.next().expect("first component");
    let mut second = HpReal::exact(Float::with_val(cfg.bits(), 0), cfg.digits);
    for ((c, _, _), t) in terms.iter().zip(it) {
        second = second.add(&t.scale(&Float::with_val(cfg.bits(), c)));
    }
    Ok((i_val, second.scale(&Float::with_val(cfg.bits(), 0.5))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::a_sum;
    use crate::highprec::{ten_pow_neg, zeta_constants};

    fn assert_close(x: &HpReal, y: &Float, digits: i32) {
        let d = Float::with_val(x.prec(), &x.value - y).abs();
        assert!(d < ten_pow_neg(digits, 64), "value {} vs {} (err {})", x.value, y, x.err);
        assert!(x.err < ten_pow_neg(digits - 3, 64), "err {}", x.err);
    }

    #[test]
    fn kernel_integrates_to_beta_product() {
        for (p1, q1, p2, q2) in [(0, 0, 0, 0), (1, 1, 1, 1), (3, 2, 1, 4), (2, 5, 4, 0), (5, 1, 0, 3)] {
            let k = Kernel::new(p1, q1, p2, q2).unwrap();
            assert_eq!(k.total(), beta_int(p1 + 1, q1 + 1) * beta_int(p2 + 1, q2 + 1));
        }
    }

    #[test]
    fn kernel_matches_direct_integral() {
        let bits = 200;
        let k = Kernel::new(2, 3, 1, 2).unwrap();
        let v = Float::with_val(bits, 0.3);
        let direct = integrate01(
            |n| {
                // y in (v, 1)
                let y = Float::with_val(bits, &v + Float::with_val(bits, 1 - &v) * &n.x);
                let g = Float::with_val(bits, &y - &v).pow(2u32) * Float::with_val(bits, 1 - &y).pow(3u32);
                g * Float::with_val(bits, 1 - &v) * Float::with_val(bits, &v * &v).pow(0u32) / y.pow(2u32) * &v
            },
            QuadConfig::new(bits, 150),
        )
        .unwrap();
        let got = k.eval(&v, &Float::with_val(bits, v.ln_ref()), bits);
        assert!(Float::with_val(bits, &got - &direct.value).abs() < 1e-40);
    }

    #[test]
    fn zero_parameters() {
        let digits = 30;
        let bits = bits_for_digits(digits);
        let z = zeta_constants(bits);
        let i0 = eval_i(&ParamVec8::ZERO, digits).unwrap();
        let expect = Float::with_val(bits, &z.z5 * 2u32) + Float::with_val(bits, &z.z3 * &z.z2) * 4u32;
        assert_close(&i0, &expect, 27);
        let j3 = eval_j3(0, 0, 0, 0, 0, 0, 0, digits).unwrap();
        assert_close(&j3, &Float::with_val(bits, &z.z3 * 2u32), 27);
    }

    #[test]
    fn beukers_form_at_one() {
        let digits = 30;
        let bits = bits_for_digits(digits);
        let z = zeta_constants(bits);
        let a = a_sum(1, 1, 1, 1, 1, 1, 1).unwrap();
        assert_eq!(a, 5);
        let j3 = eval_j3(1, 1, 1, 1, 1, 1, 1, digits).unwrap();
        let expect = Float::with_val(bits, &z.z3 * 10u32) - 12u32;
        assert_close(&j3, &expect, 27);
    }

    #[test]
    fn symmetric_one() {
        let digits = 30;
        let bits = bits_for_digits(digits);
        let z = zeta_constants(bits);
        let (i1, second) = eval_i_and_second(&ParamVec8::constant(1), digits).unwrap();
        let form = Float::with_val(bits, &z.z5 + Float::with_val(bits, &z.z3 * &z.z2) * 2u32) * 42u32
            - Float::with_val(bits, &z.z2 * 101u32)
            - Float::with_val(bits, 87) / 2u32;
        assert_close(&i1, &form, 26);
        let sec = Float::with_val(bits, &z.z3 * 21u32) - Float::with_val(bits, 101) / 4u32;
        assert_close(&second, &sec, 26);
    }

    #[test]
    fn growing_inner_near_one() {
        let bits = 200;
        let g = Inner::new(2, 1, 2, 1, 2, bits, 150).unwrap();
        for k in [10, 100, 300] {
            let xc = Float::with_val(bits, 10f64.powi(-k));
            let x = Float::with_val(bits, 1 - &xc);
            let n = Node {
                ln_x: Float::with_val(bits, x.ln_ref()),
                ln_xc: Float::with_val(bits, xc.ln_ref()),
                x,
                xc,
                w: Float::with_val(bits, 0),
            };
            let (v, rel) = g.eval(&n).unwrap();
            assert!(v.is_sign_positive() && rel < 1e-40, "{k}: {rel}");
        }
    }
}
