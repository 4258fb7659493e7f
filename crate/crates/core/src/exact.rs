//! Exact coefficient sums, the totally symmetric recursion, and the
//! denominator quantities `d_n`, `nu_p`, `Phi_n`.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;
use thiserror::Error;

use crate::group::group;
use crate::params::{a_to_pq, hyperplane_values, ParamVec12, ParamVec8, ParamsError, F_SET};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("binomial with negative top argument C({top}, {bottom})")]
    NegativeTop { top: i64, bottom: i64 },
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("p3 + q3 != q1 + q2 in A-sum")]
    Cond1,
    #[error("vanishing leading coefficient at n = {0}")]
    ZeroLeading(i64),
}

/// `C(t, b)`, zero unless `0 <= b <= t`. A negative `t` is an error.
pub fn binom(t: i64, b: i64) -> Result<Integer, ExactError> {
    if t < 0 {
        return Err(ExactError::NegativeTop { top: t, bottom: b });
    }
    if b < 0 || b > t {
        return Ok(Integer::new());
    }
    Ok(Integer::from(Integer::binomial_u(t as u32, b as u32)))
}

fn sign(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The signed double binomial sum giving the `zeta(5)` coefficient.
pub fn q_from_sum(pq: &ParamVec12) -> Result<Integer, ExactError> {
    pq.check_constraints()?;
    let [p0, p1, p2, p3, p4, p5, p6] = pq.p;
    let [q1, q2, q3, q4, q5] = pq.q;
    let k1_lo = p1.max(p2).max(p0);
    let k1_hi = (p1 + q1).min(p2 + q2);
    let k2_lo = p4.max(p5).max(p6);
    let k2_hi = (p4 + q4).min(p5 + q5);
    let mut total = Integer::new();
    for k1 in k1_lo..=k1_hi {
        let outer = binom(k1, p0)? * binom(q1, k1 - p1)? * binom(q2, k1 - p2)?;
        if outer == 0 {
            continue;
        }
        for k2 in k2_lo..=k2_hi {
            let t = binom(k2, p6)?
                * binom(k1 + k2 + q3 - p0 - p6, p3 + q3 - p0 - p6)?
                * binom(q4, k2 - p4)?
                * binom(q5, k2 - p5)?;
            total += &outer * t;
        }
    }
    if sign(pq.p.iter().sum()) < 0 {
        total = -total;
    }
    Ok(total)
}

/// `Q_n` in the totally symmetric case from its closed double sum.
pub fn q_totsym(n: u32) -> Integer {
    let c = |t: u32, b: u32| Integer::from(Integer::binomial_u(t, b));
    let mut total = Integer::new();
    for k1 in 0..=n {
        let x = c(n + k1, n) * c(n, k1).square();
        for k2 in 0..=n {
            total += Integer::from(&x * c(n + k2, n)) * c(n, k2).square() * c(n + k1 + k2, n);
        }
    }
    total
}

/// The single binomial sum for the `zeta(3)` descent.
pub fn a_sum(p0: i64, p1: i64, p2: i64, p3: i64, q1: i64, q2: i64, q3: i64) -> Result<Integer, ExactError> {
    if p3 + q3 != q1 + q2 {
        return Err(ExactError::Cond1);
    }
    let lo = p1.max(p2).max(p0);
    let hi = (p1 + q1).min(p2 + q2);
    let mut total = Integer::new();
    for k in lo..=hi {
        total += binom(k, p0)? * binom(k + q3 - p0, p3 + q3 - p0)? * binom(q1, k - p1)? * binom(q2, k - p2)?;
    }
    if sign(p0 + p1 + p2 + p3) < 0 {
        total = -total;
    }
    Ok(total)
}

/// `Q` recomputed through the descent: an outer sum of A-sums.
pub fn i3_leading(a: &ParamVec8) -> Result<Integer, ExactError> {
    let pq = a_to_pq(a);
    let [p0, p1, p2, p3, p4, p5, p6] = pq.p;
    let [q1, q2, q3, q4, q5] = pq.q;
    let lo = p4.max(p5).max(p6);
    let hi = (p4 + q4).min(p5 + q5);
    let mut total = Integer::new();
    for k in lo..=hi {
        let w = binom(k, p6)? * binom(q4, k - p4)? * binom(q5, k - p5)?;
        if w == 0 {
            continue;
        }
        let inner = a_sum(p0, p1, p2, p3 - k, q1, q2, q3 - p6 + k)?;
        let term = w * inner;
        if sign(p4 + p5 + p6 + k) < 0 {
            total -= term;
        } else {
            total += term;
        }
    }
    Ok(total)
}

/// Coefficients `(c3, c2, c1, c0)` of
/// `c3 u_{n+1} = c2 u_n + c1 u_{n-1} - c0 u_{n-2}`.
pub fn recursion_coefficients(n: i64) -> [Integer; 4] {
    let n = Integer::from(n);
    let poly = |cs: &[i64]| {
        let mut acc = Integer::new();
        for &c in cs {
            acc *= &n;
            acc += c;
        }
        acc
    };
    let pow5 = |x: Integer| Integer::from(x.pow(5u32));
    let c3 = Integer::from(2 * (Integer::from(2 * &n) + 1))
        * poly(&[41218, -48459, 20010, -2871])
        * pow5(Integer::from(&n + 1));
    let c2 = poly(&[
        97604224, 178061760, 72005308, -48634688, -39076836, 2622730, 7581006, 920112, -543402, -120582,
    ]);
    let c1 = Integer::from(2 * &n)
        * poly(&[3874492, -2617900, -3144314, 2947148, 647130, -1182926, 115771, 170716, -44541]);
    let c0 = Integer::from(&n * poly(&[41218, 75195, 46746, 9898])) * pow5(Integer::from(&n - 1));
    [c3, c2, c1, c0]
}

/// One forward step of the recursion from `(u_{n-2}, u_{n-1}, u_n)`.
pub fn recursion_step(n: i64, u: [&Rational; 3]) -> Result<Rational, ExactError> {
    let [c3, c2, c1, c0] = recursion_coefficients(n);
    if c3 == 0 {
        return Err(ExactError::ZeroLeading(n));
    }
    let num = Rational::from(&c2 * u[2]) + Rational::from(&c1 * u[1]) - Rational::from(&c0 * u[0]);
    Ok(num / c3)
}

/// `c3 u_{n+1} - c2 u_n - c1 u_{n-1} + c0 u_{n-2}` for a sequence slice.
pub fn recursion_residual(u: &[Rational], n: usize) -> Rational {
    let [c3, c2, c1, c0] = recursion_coefficients(n as i64);
    Rational::from(&c3 * &u[n + 1]) - Rational::from(&c2 * &u[n]) - Rational::from(&c1 * &u[n - 1])
        + Rational::from(&c0 * &u[n - 2])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceTriple {
    pub n: u32,
    pub q: Rational,
    pub phat: Rational,
    pub p: Rational,
}

#[derive(Serialize)]
struct SequenceRow {
    n: u32,
    #[serde(rename = "Q")]
    q: String,
    #[serde(rename = "Phat")]
    phat: String,
    #[serde(rename = "P")]
    p: String,
}

impl Serialize for SequenceTriple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SequenceRow { n: self.n, q: self.q.to_string(), phat: self.phat.to_string(), p: self.p.to_string() }
            .serialize(s)
    }
}

pub const INITIAL_Q: [(i64, i64); 3] = [(1, 1), (21, 1), (2989, 1)];
pub const INITIAL_PHAT: [(i64, i64); 3] = [(0, 1), (101, 4), (344923, 96)];
pub const INITIAL_P: [(i64, i64); 3] = [(0, 1), (87, 4), (1190161, 384)];

fn run(init: [(i64, i64); 3], n_max: u32) -> Result<Vec<Rational>, ExactError> {
    let mut u: Vec<Rational> = init.iter().map(|&(a, b)| Rational::from((a, b))).collect();
    for n in 2..n_max as i64 {
        let k = n as usize;
        let next = recursion_step(n, [&u[k - 2], &u[k - 1], &u[k]])?;
        u.push(next);
    }
    u.truncate(n_max as usize + 1);
    Ok(u)
}

/// `(Q_n, Phat_n, P_n)` for `0 <= n <= n_max` from the printed initial data.
pub fn totsym_sequences(n_max: u32) -> Result<Vec<SequenceTriple>, ExactError> {
    let q = run(INITIAL_Q, n_max)?;
    let ph = run(INITIAL_PHAT, n_max)?;
    let p = run(INITIAL_P, n_max)?;
    Ok(q.into_iter()
        .zip(ph)
        .zip(p)
        .enumerate()
        .map(|(n, ((q, phat), p))| SequenceTriple { n: n as u32, q, phat, p })
        .collect())
}

/// `lcm(1, ..., n)`.
pub fn lcm_d(n: u64) -> Integer {
    let mut d = Integer::from(1);
    for p in primes_up_to(n) {
        let mut pk = p;
        while pk * p <= n {
            pk *= p;
        }
        d *= pk;
    }
    d
}

/// Result of checking the scaled denominators of one sequence triple.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralityRow {
    pub n: u32,
    pub q_integral: bool,
    /// Denominator left in `d_n^2 d_{2n} Phat_n`.
    pub phat_residual_den: String,
    /// Denominator left in `d_n^5 P_n`.
    pub p_residual_den: String,
}

impl IntegralityRow {
    pub fn holds(&self) -> bool {
        self.q_integral && self.phat_residual_den == "1" && self.p_residual_den == "1"
    }
}

pub fn integrality(t: &SequenceTriple) -> IntegralityRow {
    let n = t.n as u64;
    let dn = lcm_d(n);
    let scale2 = Integer::from(dn.square_ref()) * lcm_d(2 * n);
    let sp = Rational::from(&t.phat * &scale2);
    let s5 = Rational::from(&t.p * &Integer::from((&dn).pow(5u32)));
    IntegralityRow {
        n: t.n,
        q_integral: *t.q.denom() == 1,
        phat_residual_den: sp.denom().to_string(),
        p_residual_den: s5.denom().to_string(),
    }
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
}

/// `ord_p(N!)` by Legendre's formula.
pub fn legendre(mut big_n: u64, p: u64) -> u64 {
    let mut v = 0;
    while big_n > 0 {
        big_n /= p;
        v += big_n;
    }
    v
}

/// The F-values along the orbit, deduplicated, with the base values first.
pub struct OrbitProfile {
    pub base: [i64; 17],
    pub images: Vec<[i64; 17]>,
    /// Largest of the 28 hyperplane values.
    pub m1: i64,
}

impl OrbitProfile {
    pub fn new(a: &ParamVec8) -> Self {
        let h = hyperplane_values(a);
        let base = h.f_values();
        let mut images: Vec<[i64; 17]> =
            group().elements.iter().map(|g| hyperplane_values(&g.apply(a)).f_values()).collect();
        images.sort_unstable();
        images.dedup();
        let m1 = *h.h.iter().max().expect("28 values");
        OrbitProfile { base, images, m1 }
    }

    /// `nu_p` for the scaling `n`.
    pub fn nu_p(&self, n: u64, p: u64) -> i64 {
        let ord = |v: &[i64; 17]| -> i64 {
            v.iter().map(|&x| legendre((x.max(0) as u64) * n, p) as i64).sum()
        };
        let base = ord(&self.base);
        self.images.iter().map(|v| base - ord(v)).max().unwrap_or(0)
    }

    /// `(p, nu_p)` for every prime `p > sqrt(m1 n)` with nonzero `nu_p`.
    pub fn phi_factors(&self, n: u64) -> Vec<(u64, i64)> {
        let top = self.m1.max(0) as u64 * n;
        primes_up_to(top)
            .into_par_iter()
            .filter(|&p| p * p > top)
            .map(|p| (p, self.nu_p(n, p)))
            .filter(|&(_, v)| v != 0)
            .collect()
    }

    pub fn phi_n(&self, n: u64) -> Rational {
        let mut out = Rational::from(1);
        for (p, v) in self.phi_factors(n) {
            let pk = Integer::from(Integer::u_pow_u(p as u32, v.unsigned_abs() as u32));
            if v > 0 {
                out *= pk;
            } else {
                out /= pk;
            }
        }
        out
    }

    /// `log(Phi_n)` as a float, computed from the factorization.
    pub fn log_phi_n(&self, n: u64) -> f64 {
        self.phi_factors(n).iter().map(|&(p, v)| v as f64 * (p as f64).ln()).sum()
    }
}

/// `nu_p` for a single prime; builds the orbit profile each call.
pub fn nu_p(a: &ParamVec8, n: u64, p: u64) -> i64 {
    OrbitProfile::new(a).nu_p(n, p)
}

/// `Phi_n` for the parameter vector `a`.
pub fn phi_n(a: &ParamVec8, n: u64) -> Rational {
    OrbitProfile::new(a).phi_n(n)
}

/// Indices of the factorial arguments, for reference.
pub const FACTORIAL_FORMS: [usize; 17] = F_SET;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamVec12;
    use proptest::prelude::*;

    const EXAMPLE: ParamVec8 = ParamVec8([8, 16, 10, 15, 12, 16, 18, 13]);
    const SECOND: ParamVec8 = ParamVec8([15, 20, 16, 14, 18, 17, 16, 20]);

    fn sym_pq(n: i64) -> ParamVec12 {
        a_to_pq(&ParamVec8::constant(n))
    }

    fn apery(n: u32) -> Integer {
        (0..=n)
            .map(|j| {
                Integer::from(Integer::binomial_u(n + j, j)).square()
                    * Integer::from(Integer::binomial_u(n, j)).square()
            })
            .sum()
    }

    #[test]
    fn q_sum_examples() {
        assert_eq!(q_totsym(0), 1);
        assert_eq!(q_totsym(1), 21);
        assert_eq!(q_totsym(2), 2989);
        assert_eq!(q_from_sum(&sym_pq(0)).unwrap(), 1);
        assert_eq!(q_from_sum(&sym_pq(1)).unwrap(), 21);
        assert_eq!(q_from_sum(&sym_pq(2)).unwrap(), 2989);
    }

    #[test]
    fn q_sum_matches_closed_form() {
        for n in 0..=12 {
            assert_eq!(q_from_sum(&sym_pq(n as i64)).unwrap(), q_totsym(n));
        }
    }

    #[test]
    fn a_sum_gives_apery_numbers() {
        assert_eq!(a_sum(0, 0, 0, 0, 0, 0, 0).unwrap(), 1);
        for n in 0..8 {
            let v = a_sum(n as i64, n as i64, n as i64, n as i64, n as i64, n as i64, n as i64).unwrap();
            assert_eq!(v, apery(n));
        }
        assert_eq!(apery(3), 1445);
        assert_eq!(a_sum(1, 0, 0, 2, 1, 1, 1), Err(ExactError::Cond1));
    }

    #[test]
    fn descent_agrees_with_double_sum() {
        for a in [ParamVec8::ZERO, ParamVec8::constant(1), ParamVec8::constant(4), EXAMPLE, SECOND] {
            assert_eq!(i3_leading(&a).unwrap(), q_from_sum(&a_to_pq(&a)).unwrap(), "{a}");
        }
        assert_eq!(i3_leading(&ParamVec8::constant(1)).unwrap(), 21);
    }

    #[test]
    fn sequences() {
        let s = totsym_sequences(30).unwrap();
        assert_eq!(s.len(), 31);
        assert_eq!(s[2].q, 2989);
        assert_eq!(s[1].phat, Rational::from((101, 4)));
        for t in &s {
            assert_eq!(t.q, q_totsym(t.n));
        }
        let qs: Vec<Rational> = s.iter().map(|t| t.q.clone()).collect();
        let ps: Vec<Rational> = s.iter().map(|t| t.p.clone()).collect();
        for n in 2..30 {
            assert_eq!(recursion_residual(&qs, n), 0);
            assert_eq!(recursion_residual(&ps, n), 0);
        }
    }

    #[test]
    fn sequence_json_row() {
        let s = totsym_sequences(2).unwrap();
        let v = serde_json::to_value(&s[2]).unwrap();
        assert_eq!(v["Q"], "2989");
        assert_eq!(v["Phat"], "344923/96");
        assert_eq!(v["n"], 2);
    }

    #[test]
    fn lcm_values() {
        assert_eq!(lcm_d(0), 1);
        assert_eq!(lcm_d(1), 1);
        assert_eq!(lcm_d(10), 2520);
        assert_eq!(lcm_d(20), 232792560u64);
        let mut d = Integer::from(1);
        for k in 1..=60u32 {
            d.lcm_u_mut(k);
            assert_eq!(lcm_d(k as u64), d);
        }
    }

    #[test]
    fn legendre_matches_factorization() {
        for n in 0..40u32 {
            let f = Integer::from(Integer::factorial(n));
            for p in [2u64, 3, 5, 7, 11] {
                let mut v = 0;
                let mut x = f.clone();
                while x.is_divisible_u(p as u32) {
                    x /= p as u32;
                    v += 1;
                }
                assert_eq!(legendre(n as u64, p), v);
            }
        }
    }

    #[test]
    fn nu_and_phi_examples() {
        let sym = OrbitProfile::new(&ParamVec8::constant(2));
        assert_eq!(sym.images.len(), 1);
        assert_eq!(sym.phi_n(50), 1);
        assert_eq!(phi_n(&EXAMPLE, 0), 1);
        let prof = OrbitProfile::new(&SECOND);
        // n/p has fractional part in [1/19, 1/18)
        let (n, p) = (97u64, 1801u64);
        let frac = (n % p) as f64 / p as f64;
        assert!((1.0 / 19.0..1.0 / 18.0).contains(&frac));
        assert_eq!(prof.nu_p(n, p), 3);
    }

    #[test]
    fn factorial_invariance_of_q() {
        for a in [EXAMPLE, SECOND] {
            let q = Rational::from(q_from_sum(&a_to_pq(&a)).unwrap());
            for k in [1usize, 17, 999, 5039] {
                let g = group().elements[k];
                let qg = q_from_sum(&a_to_pq(&g.apply(&a))).unwrap();
                let r = crate::group::factorial_ratio(&g, &a).unwrap();
                assert_eq!(Rational::from(&q * &r), qg);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn descent_cross_oracle(a in prop::array::uniform8(0i64..5), m in 3i64..6) {
            // shift to make every convergence form nonnegative
            let a = ParamVec8(a);
            let a = ParamVec8(std::array::from_fn(|i| a.0[i] + m));
            prop_assume!(crate::params::convergence_check(&a));
            let pq = a_to_pq(&a);
            let direct = q_from_sum(&pq);
            let descent = i3_leading(&a);
            if let (Ok(x), Ok(y)) = (direct, descent) {
                prop_assert_eq!(x, y);
            }
        }
    }
}
