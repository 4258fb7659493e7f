//! Parameter vectors, the `a <-> (p; q)` coordinate maps, the 28 hyperplane
//! forms and the symmetric `s`-parametrisation.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("(p;q) violates the reduction constraint {0}")]
    ConstraintViolation(&'static str),
    #[error("symmetric parameters do not produce integer exponents ({0})")]
    NonIntegral(String),
    #[error("expected {expected} integers, got {got}")]
    Length { expected: usize, got: usize },
}

/// An integer linear form `c . a` in the eight exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm(pub [i64; 8]);

impl LinearForm {
    pub fn eval(&self, a: &ParamVec8) -> i64 {
        self.0.iter().zip(a.0.iter()).map(|(c, x)| c * x).sum()
    }

    /// The form `a -> self(m a)` for an integer matrix acting on column vectors.
    pub fn compose(&self, m: &[[i64; 8]; 8]) -> LinearForm {
        let mut out = [0i64; 8];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..8).map(|i| self.0[i] * m[i][j]).sum();
        }
        LinearForm(out)
    }

    pub fn neg(&self) -> LinearForm {
        LinearForm(self.0.map(|c| -c))
    }

    /// Renders as e.g. `a1+a5-a3`: positive terms first, then negative ones.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let term = |s: &mut String, c: i64, i: usize, first: bool| {
            let mag = c.unsigned_abs();
            if c < 0 {
                s.push('-');
            } else if !first {
                s.push('+');
            }
            if mag != 1 {
                s.push_str(&mag.to_string());
            }
            s.push_str(&format!("a{}", i + 1));
        };
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c > 0 {
                term(&mut s, c, i, first);
                first = false;
            }
        }
        for (i, &c) in self.0.iter().enumerate() {
            if c < 0 {
                term(&mut s, c, i, first);
                first = false;
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

const fn lf(c: [i64; 8]) -> LinearForm {
    LinearForm(c)
}

/// The 28 forms `h_1, ..., h_28`, in their canonical order.
pub const HYPERPLANES: [LinearForm; 28] = [
    lf([1, 0, 0, 0, 0, 0, 0, 0]),
    lf([0, 1, 0, 0, 0, 0, 0, 0]),
    lf([0, 0, 1, 0, 0, 0, 0, 0]),
    lf([0, 0, 0, 1, 0, 0, 0, 0]),
    lf([0, 0, 0, 0, 1, 0, 0, 0]),
    lf([0, 0, 0, 0, 0, 1, 0, 0]),
    lf([0, 0, 0, 0, 0, 0, 1, 0]),
    lf([0, 0, 0, 0, 0, 0, 0, 1]),
    // h9 = a1+a2-a4
    lf([1, 1, 0, -1, 0, 0, 0, 0]),
    // h10 = a1+a5-a3
    lf([1, 0, -1, 0, 1, 0, 0, 0]),
    // h11 = a1+a8-a3
    lf([1, 0, -1, 0, 0, 0, 0, 1]),
    // h12 = a2+a3-a5
    lf([0, 1, 1, 0, -1, 0, 0, 0]),
    // h13 = a2+a3-a8
    lf([0, 1, 1, 0, 0, 0, 0, -1]),
    // h14 = a3+a6-a8
    lf([0, 0, 1, 0, 0, 1, 0, -1]),
    // h15 = a3+a4-a1
    lf([-1, 0, 1, 1, 0, 0, 0, 0]),
    // h16 = a4+a5-a2
    lf([0, -1, 0, 1, 1, 0, 0, 0]),
    // h17 = a4+a8-a6
    lf([0, 0, 0, 1, 0, -1, 0, 1]),
    // h18 = a4+a8-a2
    lf([0, -1, 0, 1, 0, 0, 0, 1]),
    // h19 = a5+a6-a8
    lf([0, 0, 0, 0, 1, 1, 0, -1]),
    // h20 = a7+a8-a6
    lf([0, 0, 0, 0, 0, -1, 1, 1]),
    // h21 = a1+a2+a6-a4-a8
    lf([1, 1, 0, -1, 0, 1, 0, -1]),
    // h22 = a1+a7+a8-a3-a6
    lf([1, 0, -1, 0, 0, -1, 1, 1]),
    // h23 = a2+a3+a6-a4-a8
    lf([0, 1, 1, -1, 0, 1, 0, -1]),
    // h24 = a2+a3+a6-a7-a8
    lf([0, 1, 1, 0, 0, 1, -1, -1]),
    // h25 = a4+a5+a8-a2-a3
    lf([0, -1, -1, 1, 1, 0, 0, 1]),
    // h26 = a4+a7+a8-a2-a6
    lf([0, -1, 0, 1, 0, -1, 1, 1]),
    // h27 = a4+a7+2a8-a2-a3-a6
    lf([0, -1, -1, 1, 0, -1, 1, 2]),
    // h28 = a4+a5+a7+a8-a2-a3-a6
    lf([0, -1, -1, 1, 1, -1, 1, 1]),
];

/// `a1+a5+a7+a8-a2-a3`, the one extra hyperplane preserved by the group.
pub const EXCEPTIONAL: LinearForm = lf([1, -1, -1, 0, 1, 0, 1, 1]);

/// The 17-element index set (1-based) whose factorials normalise the integral.
pub const F_SET: [usize; 17] = [1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 14, 16, 18, 20, 23, 27, 28];

/// Indices (1-based) of the 21-element orbit of `h_1`.
pub const H_PRIME: [usize; 21] = [
    1, 3, 5, 6, 7, 8, 9, 10, 11, 14, 16, 18, 19, 20, 21, 22, 23, 25, 26, 27, 28,
];

/// Indices (1-based) of the 7-element orbit of `h_2`.
pub const H_DOUBLE_PRIME: [usize; 7] = [2, 4, 12, 13, 15, 17, 24];

/// The seventeen convergence forms, in the order they are usually listed.
/// Checked against `{h_i : i in F_SET}` by [`self_test`].
pub const CONVERGENCE_FORMS: [LinearForm; 17] = [
    lf([1, 0, 0, 0, 0, 0, 0, 0]),
    lf([0, 1, 0, 0, 0, 0, 0, 0]),
    lf([0, 0, 1, 0, 0, 0, 0, 0]),
    lf([0, 0, 0, 1, 0, 0, 0, 0]),
    lf([0, 0, 0, 0, 1, 0, 0, 0]),
    lf([0, 0, 0, 0, 0, 1, 0, 0]),
    lf([0, 0, 0, 0, 0, 0, 1, 0]),
    lf([1, 0, -1, 0, 1, 0, 0, 0]),
    lf([0, 0, 1, 0, 0, 1, 0, -1]),
    lf([0, -1, -1, 1, 1, -1, 1, 1]),
    lf([0, 0, 0, 0, 0, -1, 1, 1]),
    lf([0, -1, 0, 1, 0, 0, 0, 1]),
    lf([0, 1, 1, -1, 0, 1, 0, -1]),
    lf([1, 0, -1, 0, 0, 0, 0, 1]),
    lf([1, 1, 0, -1, 0, 0, 0, 0]),
    lf([0, -1, 0, 1, 1, 0, 0, 0]),
    lf([0, -1, -1, 1, 0, -1, 1, 2]),
];

/// Checks that the listed convergence forms are exactly `{h_i : i in F_SET}`
/// and that the index sets have the expected sizes and overlaps.
pub fn self_test() -> Result<(), String> {
    let mut conv: Vec<_> = CONVERGENCE_FORMS.to_vec();
    let mut from_f: Vec<_> = F_SET.iter().map(|&i| HYPERPLANES[i - 1]).collect();
    conv.sort();
    from_f.sort();
    if conv != from_f {
        return Err("convergence forms differ from {h_i : i in F}".into());
    }
    let mut all: Vec<usize> = H_PRIME.iter().chain(H_DOUBLE_PRIME.iter()).copied().collect();
    all.sort_unstable();
    if all != (1..=28).collect::<Vec<_>>() {
        return Err("h' and h'' do not partition 1..=28".into());
    }
    let in_prime = F_SET.iter().filter(|i| H_PRIME.contains(i)).count();
    let in_dprime = F_SET.iter().filter(|i| H_DOUBLE_PRIME.contains(i)).count();
    if (in_prime, in_dprime) != (15, 2) {
        return Err(format!("|F & h'| = {in_prime}, |F & h''| = {in_dprime}"));
    }
    Ok(())
}

/// The eight integer exponents `a_1, ..., a_8` of the cellular integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVec8(pub [i64; 8]);

impl ParamVec8 {
    pub const ZERO: ParamVec8 = ParamVec8([0; 8]);

    pub fn constant(n: i64) -> Self {
        ParamVec8([n; 8])
    }

    pub fn from_slice(v: &[i64]) -> Result<Self, ParamsError> {
        let arr: [i64; 8] = v
            .try_into()
            .map_err(|_| ParamsError::Length { expected: 8, got: v.len() })?;
        Ok(ParamVec8(arr))
    }

    /// 1-based accessor.
    #[inline]
    pub fn a(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn scale(&self, n: i64) -> Self {
        ParamVec8(self.0.map(|x| x * n))
    }

    pub fn b24(&self) -> i64 {
        self.a(2) + self.a(3) + self.a(6) - self.a(7) - self.a(8)
    }
    pub fn b14(&self) -> i64 {
        self.a(4) + self.a(7) + self.a(8) - self.a(2) - self.a(6)
    }
    pub fn b57(&self) -> i64 {
        self.a(4) + self.a(5) + self.a(8) - self.a(2) - self.a(3)
    }
    pub fn b35(&self) -> i64 {
        self.a(2) + self.a(3) - self.a(8)
    }
    pub fn b36(&self) -> i64 {
        self.a(8)
    }

    pub fn is_totally_symmetric(&self) -> bool {
        self.0.iter().all(|&x| x == self.0[0])
    }
}

impl fmt::Display for ParamVec8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Exponents `(p_0..p_6; q_1..q_5)` of the 12-parameter family.
///
/// `q[0]` holds `q_1`, so use [`ParamVec12::q`] for 1-based access.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParamVec12 {
    pub p: [i64; 7],
    pub q: [i64; 5],
}

impl Serialize for ParamVec12 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<i64> = self.p.iter().chain(self.q.iter()).copied().collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParamVec12 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        ParamVec12::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

impl ParamVec12 {
    pub fn new(p: [i64; 7], q: [i64; 5]) -> Self {
        ParamVec12 { p, q }
    }

    pub fn from_slice(v: &[i64]) -> Result<Self, ParamsError> {
        if v.len() != 12 {
            return Err(ParamsError::Length { expected: 12, got: v.len() });
        }
        let mut p = [0; 7];
        let mut q = [0; 5];
        p.copy_from_slice(&v[..7]);
        q.copy_from_slice(&v[7..]);
        Ok(ParamVec12 { p, q })
    }

    /// `p_i`, `0 <= i <= 6`.
    #[inline]
    pub fn p(&self, i: usize) -> i64 {
        self.p[i]
    }

    /// `q_i`, `1 <= i <= 5`.
    #[inline]
    pub fn q(&self, i: usize) -> i64 {
        self.q[i - 1]
    }

    pub fn scale(&self, n: i64) -> Self {
        ParamVec12 { p: self.p.map(|x| x * n), q: self.q.map(|x| x * n) }
    }

    /// The two conditions `p3+q3 = p0+q4+q5` and `p3+q3 = p6+q1+q2`.
    pub fn cond12(&self) -> bool {
        let s = self.p(3) + self.q(3);
        s == self.p(0) + self.q(4) + self.q(5) && s == self.p(6) + self.q(1) + self.q(2)
    }

    /// `p3 = p1+q1` and `p3 = p5+q5`.
    pub fn cons1(&self) -> bool {
        self.p(3) == self.p(1) + self.q(1) && self.p(3) == self.p(5) + self.q(5)
    }

    /// The four constraints under which the 12-parameter integral reduces to
    /// the 8-parameter one.
    pub fn check_constraints(&self) -> Result<(), ParamsError> {
        let (p, q) = (|i| self.p(i), |i| self.q(i));
        if p(1) != p(0) + q(4) + q(5) - q(1) - q(3) {
            return Err(ParamsError::ConstraintViolation("p1=p0+q4+q5-q1-q3"));
        }
        if p(3) != p(0) + q(4) + q(5) - q(3) {
            return Err(ParamsError::ConstraintViolation("p3=p0+q4+q5-q3"));
        }
        if p(5) != p(0) + q(4) - q(3) {
            return Err(ParamsError::ConstraintViolation("p5=p0+q4-q3"));
        }
        if p(6) != p(0) + q(4) + q(5) - q(1) - q(2) {
            return Err(ParamsError::ConstraintViolation("p6=p0+q4+q5-q1-q2"));
        }
        Ok(())
    }

    /// The involution `y_j -> y_{6-j}` lifted to the 12 parameters.
    pub fn involution(&self) -> Self {
        let p = self.p;
        let q = self.q;
        ParamVec12 {
            p: [p[6], p[5], p[4], p[3], p[2], p[1], p[0]],
            q: [q[4], q[3], q[2], q[1], q[0]],
        }
    }
}

pub fn a_to_pq(a: &ParamVec8) -> ParamVec12 {
    let x = |i| a.a(i);
    let p = [
        x(5) + x(6) - x(8),
        x(2) + x(3) + x(6) - x(4) - x(8),
        x(6),
        x(2) + x(3) + x(6) - x(8),
        x(7),
        x(3) + x(6) - x(8),
        x(1) + x(2) + x(6) - x(4) - x(8),
    ];
    let q = [x(4), x(5), x(1) + x(5) - x(3), x(1), x(2)];
    ParamVec12 { p, q }
}

pub fn pq_to_a(pq: &ParamVec12) -> Result<ParamVec8, ParamsError> {
    pq.check_constraints()?;
    let (p, q) = (|i| pq.p(i), |i| pq.q(i));
    Ok(ParamVec8([
        q(4),
        q(5),
        q(2) + q(4) - q(3),
        q(1),
        q(2),
        p(2),
        p(4),
        p(2) + q(2) - p(0),
    ]))
}

/// Values of the 28 hyperplane forms and of the exceptional form at `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneValues {
    pub h: [i64; 28],
    pub exceptional: i64,
}

impl HyperplaneValues {
    /// `h_i`, 1-based.
    #[inline]
    pub fn get(&self, i: usize) -> i64 {
        self.h[i - 1]
    }

    pub fn sorted(&self) -> Vec<i64> {
        let mut v = self.h.to_vec();
        v.sort_unstable();
        v
    }

    fn sorted_over(&self, idx: &[usize]) -> Vec<i64> {
        let mut v: Vec<i64> = idx.iter().map(|&i| self.get(i)).collect();
        v.sort_unstable();
        v
    }

    pub fn sorted_prime(&self) -> Vec<i64> {
        self.sorted_over(&H_PRIME)
    }

    pub fn sorted_double_prime(&self) -> Vec<i64> {
        self.sorted_over(&H_DOUBLE_PRIME)
    }

    /// The values `h_i` for `i` in [`F_SET`], in index order.
    pub fn f_values(&self) -> [i64; 17] {
        F_SET.map(|i| self.get(i))
    }

    pub fn f_sum(&self) -> i64 {
        self.f_values().iter().sum()
    }

    /// The five largest values `m_1 >= ... >= m_5` of the 28-multiset.
    pub fn five_maxima(&self) -> [i64; 5] {
        let s = self.sorted();
        [s[27], s[26], s[25], s[24], s[23]]
    }

    /// The refined choice: the `l` largest of `h'` followed by the `5 - l`
    /// largest of `h''`, sorted descending.
    pub fn refined_maxima(&self, l: usize) -> Option<[i64; 5]> {
        if !(1..=5).contains(&l) {
            return None;
        }
        let hp = self.sorted_prime();
        let hpp = self.sorted_double_prime();
        let mut m: Vec<i64> = hp.iter().rev().take(l).copied().collect();
        m.extend(hpp.iter().rev().take(5 - l));
        m.sort_unstable_by(|x, y| y.cmp(x));
        m.try_into().ok()
    }
}

pub fn hyperplane_values(a: &ParamVec8) -> HyperplaneValues {
    HyperplaneValues { h: HYPERPLANES.map(|f| f.eval(a)), exceptional: EXCEPTIONAL.eval(a) }
}

/// `true` iff all seventeen convergence forms are non-negative at `a`.
pub fn convergence_check(a: &ParamVec8) -> bool {
    first_violated_form(a).is_none()
}

/// The first convergence form (in listing order) that is negative at `a`.
pub fn first_violated_form(a: &ParamVec8) -> Option<LinearForm> {
    CONVERGENCE_FORMS.iter().copied().find(|f| f.eval(a) < 0)
}

/// Symmetric parameters `s_0, ..., s_7`, stored doubled so half-integers
/// stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymParams {
    pub two_s: [i64; 8],
}

impl SymParams {
    /// `2 s_i`.
    #[inline]
    pub fn twice(&self, i: usize) -> i64 {
        self.two_s[i]
    }

    /// Doubled values of the 28-multiset: `{s_i+s_j : 1<=i<j<=7}` followed by
    /// `{s_0-s_i : 1<=i<=7}`.
    pub fn doubled_multiset(&self) -> Vec<i64> {
        let s = &self.two_s;
        let mut v = Vec::with_capacity(28);
        for i in 1..=7 {
            for j in (i + 1)..=7 {
                v.push(s[i] + s[j]);
            }
        }
        v.extend((1..=7).map(|i| s[0] - s[i]));
        v
    }
}

pub fn to_symmetric(a: &ParamVec8) -> SymParams {
    let x = |i| a.a(i);
    SymParams {
        two_s: [
            x(2) + x(3) + x(4),
            2 * x(1) + x(2) - x(3) - x(4),
            x(3) + x(4) - x(2),
            x(2) + x(3) - x(4),
            2 * x(5) + x(4) - x(2) - x(3),
            2 * x(8) + x(4) - x(2) - x(3),
            2 * x(6) - 2 * x(8) + x(2) + x(3) - x(4),
            2 * x(7) + 2 * x(8) - 2 * x(6) + x(4) - x(2) - x(3),
        ],
    }
}

pub fn from_symmetric(s: &SymParams) -> Result<ParamVec8, ParamsError> {
    let t = &s.two_s;
    let doubled = [
        t[1] + t[2],
        t[0] - t[2],
        t[2] + t[3],
        t[0] - t[3],
        t[3] + t[4],
        t[5] + t[6],
        t[6] + t[7],
        t[3] + t[5],
    ];
    let mut a = [0i64; 8];
    for (i, d) in doubled.iter().enumerate() {
        if d % 2 != 0 {
            return Err(ParamsError::NonIntegral(format!("2 a{} = {d}", i + 1)));
        }
        a[i] = d / 2;
    }
    Ok(ParamVec8(a))
}

/// The symmetric `7 x 7` matrix `H_ii = s_0 - s_i`, `H_ij = s_i + s_j`,
/// stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HMatrix {
    pub twice: [[i64; 7]; 7],
}

impl HMatrix {
    /// Entry `(i, j)` (1-based) when it is an integer.
    pub fn entry(&self, i: usize, j: usize) -> Option<i64> {
        let d = self.twice[i - 1][j - 1];
        (d % 2 == 0).then_some(d / 2)
    }

    /// All entries as integers, if every entry is integral (always the case
    /// for matrices built from an integer `a`).
    pub fn integer_entries(&self) -> Option<[[i64; 7]; 7]> {
        let mut m = [[0; 7]; 7];
        for i in 0..7 {
            for j in 0..7 {
                m[i][j] = self.entry(i + 1, j + 1)?;
            }
        }
        Some(m)
    }
}

pub fn h_matrix(s: &SymParams) -> HMatrix {
    let t = &s.two_s;
    let mut m = [[0i64; 7]; 7];
    for i in 1..=7 {
        for j in 1..=7 {
            m[i - 1][j - 1] = if i == j { t[0] - t[i] } else { t[i] + t[j] };
        }
    }
    HMatrix { twice: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EXAMPLE: ParamVec8 = ParamVec8([8, 16, 10, 15, 12, 16, 18, 13]);

    #[test]
    fn static_tables_are_consistent() {
        self_test().unwrap();
    }

    #[test]
    fn a_to_pq_examples() {
        let n = 7;
        let pq = a_to_pq(&ParamVec8::constant(n));
        assert_eq!(pq.p, [n, n, n, 2 * n, n, n, n]);
        assert_eq!(pq.q, [n; 5]);
        let z = a_to_pq(&ParamVec8::ZERO);
        assert_eq!((z.p, z.q), ([0; 7], [0; 5]));
        let e = a_to_pq(&EXAMPLE);
        assert_eq!(e.p(0), 15);
        assert_eq!(e.q(3), 10);
        assert_eq!(e.p, [15, 14, 16, 29, 18, 13, 12]);
        assert_eq!(e.q, [15, 12, 10, 8, 16]);
    }

    #[test]
    fn pq_to_a_rejects_unconstrained() {
        let mut pq = a_to_pq(&EXAMPLE);
        pq.p[3] += 1;
        assert!(matches!(pq_to_a(&pq), Err(ParamsError::ConstraintViolation(_))));
        let n = 4;
        let sym = ParamVec12::new([n, n, n, 2 * n, n, n, n], [n; 5]);
        assert_eq!(pq_to_a(&sym).unwrap(), ParamVec8::constant(n));
    }

    #[test]
    fn hyperplanes_of_examples() {
        let h = hyperplane_values(&ParamVec8::constant(5));
        assert!(h.h.iter().all(|&v| v == 5));
        assert_eq!(h.exceptional, 10);
        let h = hyperplane_values(&EXAMPLE);
        assert_eq!(
            h.sorted(),
            vec![
                8, 9, 10, 10, 11, 11, 11, 12, 12, 12, 12, 13, 13, 13, 13, 14, 14, 14, 14, 15, 15,
                15, 16, 16, 16, 17, 17, 18
            ]
        );
        assert_eq!(h.five_maxima(), [18, 17, 17, 16, 16]);
        assert_eq!(
            h.sorted_prime(),
            vec![8, 9, 10, 10, 11, 11, 12, 12, 12, 13, 13, 13, 14, 14, 14, 15, 15, 16, 16, 17, 18]
        );
        assert_eq!(h.sorted_double_prime(), vec![11, 12, 13, 14, 15, 16, 17]);
        assert_eq!(h.refined_maxima(3), Some([18, 17, 17, 16, 16]));
        assert_eq!(h.refined_maxima(4), Some([18, 17, 17, 16, 16]));
        assert_eq!(hyperplane_values(&ParamVec8::ZERO).h, [0; 28]);
    }

    #[test]
    fn convergence_examples() {
        assert!(convergence_check(&ParamVec8::constant(3)));
        assert!(convergence_check(&EXAMPLE));
        let bad = ParamVec8([1, 0, 5, 0, 0, 0, 0, 0]);
        assert!(!convergence_check(&bad));
        assert_eq!(first_violated_form(&bad).unwrap().render(), "a1+a5-a3");
    }

    #[test]
    fn symmetric_examples() {
        let n = 3;
        let s = to_symmetric(&ParamVec8::constant(n));
        assert_eq!(s.two_s, [3 * n, n, n, n, n, n, n, n]);
        let h = h_matrix(&to_symmetric(&EXAMPLE)).integer_entries().unwrap();
        let printed = [
            [17, 8, 9, 10, 11, 12, 13],
            [8, 16, 10, 11, 12, 13, 14],
            [9, 10, 15, 12, 13, 14, 15],
            [10, 11, 12, 14, 14, 15, 16],
            [11, 12, 13, 14, 13, 16, 17],
            [12, 13, 14, 15, 16, 12, 18],
            [13, 14, 15, 16, 17, 18, 11],
        ];
        assert_eq!(h, printed);
        let zero = h_matrix(&SymParams { two_s: [0; 8] });
        assert_eq!(zero.twice, [[0; 7]; 7]);
        let sym = h_matrix(&to_symmetric(&ParamVec8::constant(4))).integer_entries().unwrap();
        assert!(sym.iter().flatten().all(|&v| v == 4));
    }

    #[test]
    fn from_symmetric_rejects_mixed_parity() {
        let s = SymParams { two_s: [1, 0, 0, 0, 0, 0, 0, 0] };
        assert!(matches!(from_symmetric(&s), Err(ParamsError::NonIntegral(_))));
    }

    #[test]
    fn json_shapes() {
        let j = serde_json::to_string(&EXAMPLE).unwrap();
        assert_eq!(j, "[8,16,10,15,12,16,18,13]");
        let pq = a_to_pq(&EXAMPLE);
        let j = serde_json::to_string(&pq).unwrap();
        assert_eq!(serde_json::from_str::<ParamVec12>(&j).unwrap(), pq);
        let h = serde_json::to_value(hyperplane_values(&EXAMPLE)).unwrap();
        assert_eq!(h["h"].as_array().unwrap().len(), 28);
        assert!(h["exceptional"].is_i64());
    }

    fn small_vec() -> impl Strategy<Value = ParamVec8> {
        prop::array::uniform8(-40i64..40).prop_map(ParamVec8)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn pq_round_trip(a in small_vec()) {
            let pq = a_to_pq(&a);
            prop_assert!(pq.check_constraints().is_ok());
            prop_assert!(pq.cond12() && pq.cons1());
            prop_assert_eq!(pq_to_a(&pq).unwrap(), a);
            prop_assert_eq!(a_to_pq(&pq_to_a(&pq).unwrap()), pq);
            let inv = pq.involution();
            prop_assert!(inv.check_constraints().is_ok());
        }

        #[test]
        fn symmetric_round_trip(a in small_vec()) {
            let s = to_symmetric(&a);
            prop_assert!(s.two_s.iter().all(|t| (t - s.two_s[0]) % 2 == 0));
            prop_assert_eq!(from_symmetric(&s).unwrap(), a);
        }

        #[test]
        fn multiset_matches_symmetric_description(a in small_vec()) {
            let h = hyperplane_values(&a);
            let s = to_symmetric(&a);
            let mut from_s: Vec<i64> = s.doubled_multiset().iter().map(|d| d / 2).collect();
            from_s.sort_unstable();
            prop_assert_eq!(h.sorted(), from_s);
            let hm = h_matrix(&s);
            let mut from_h: Vec<i64> = (0..7)
                .flat_map(|i| (i..7).map(move |j| (i, j)))
                .map(|(i, j)| hm.twice[i][j] / 2)
                .collect();
            from_h.sort_unstable();
            prop_assert_eq!(h.sorted(), from_h);
        }
    }
}
