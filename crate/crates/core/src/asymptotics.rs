//! Growth rates from the critical-point system, the denominator-gain
//! limit, and the worthiness exponent.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::Serialize;
use thiserror::Error;

use crate::group::group;
use crate::highprec::{bits_for_digits, fmt_float};
use crate::params::{a_to_pq, hyperplane_values, ParamVec12, ParamVec8};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("F1 has no y-dependence; the pencil is degenerate")]
    DegeneratePencil,
    #[error("F(x) is not divisible by x(p3 - x)")]
    NotDivisible,
    #[error("expected a cubic factor, found degree {0}")]
    UnexpectedDegree(usize),
    #[error("root finder did not converge")]
    NoConvergence,
    #[error("two growth rates have equal modulus")]
    ModulusTie,
    #[error("F-sum not constant on the orbit")]
    InvarianceViolation,
    #[error("nonzero step value next to 0")]
    SingularStep,
    #[error("refined split l = {0} is out of range")]
    BadSplit(usize),
}

/// Univariate polynomial with rational coefficients, lowest degree first.
pub type UPoly = Vec<Rational>;

fn trim(p: &mut UPoly) {
    while p.last().is_some_and(|c| *c == 0) {
        p.pop();
    }
}

pub fn upoly_degree(p: &UPoly) -> Option<usize> {
    p.iter().rposition(|c| *c != 0)
}

fn upoly_mul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Rational::from(x * y);
        }
    }
    trim(&mut out);
    out
}

fn upoly_add_assign(a: &mut UPoly, b: &UPoly) {
    if a.len() < b.len() {
        a.resize(b.len(), Rational::new());
    }
    for (i, y) in b.iter().enumerate() {
        a[i] += y;
    }
    trim(a);
}

/// Exact division; `None` if the remainder is nonzero.
pub fn upoly_div_exact(num: &UPoly, den: &UPoly) -> Option<UPoly> {
    let dd = upoly_degree(den)?;
    let mut r = num.clone();
    trim(&mut r);
    let Some(nd) = upoly_degree(&r) else { return Some(Vec::new()) };
    if nd < dd {
        return None;
    }
    let mut q = vec![Rational::new(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = Rational::from(&r[k + dd] / &den[dd]);
        for (j, d) in den.iter().enumerate() {
            r[k + j] -= Rational::from(&c * d);
        }
        q[k] = c;
    }
    trim(&mut r);
    r.is_empty().then_some(q)
}

fn upoly_eval_complex(p: &UPoly, x: &Complex) -> Complex {
    let mut acc = Complex::new(x.prec());
    for c in p.iter().rev() {
        acc *= x;
        acc += Float::with_val(x.prec().0, c);
    }
    acc
}

/// Polynomial in `x, y` with rational coefficients: `c[i][j]` of `x^i y^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePoly {
    c: Vec<Vec<Rational>>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        BivariatePoly { c: Vec::new() }
    }

    /// `cx x + cy y + c0`.
    pub fn linear(cx: i64, cy: i64, c0: i64) -> Self {
        let r = |v: i64| Rational::from(v);
        BivariatePoly { c: vec![vec![r(c0), r(cy)], vec![r(cx), r(0)]] }.normalized()
    }

    fn normalized(mut self) -> Self {
        for row in &mut self.c {
            trim(row);
        }
        while self.c.last().is_some_and(Vec::is_empty) {
            self.c.pop();
        }
        self
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        self.c.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg_x(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg_y(&self) -> Option<usize> {
        self.c.iter().filter_map(|r| r.len().checked_sub(1)).max()
    }

    pub fn add(&self, o: &Self) -> Self {
        let nx = self.c.len().max(o.c.len());
        let mut c = vec![Vec::new(); nx];
        for (i, row) in c.iter_mut().enumerate() {
            let a = self.c.get(i).map_or(&[][..], Vec::as_slice);
            let b = o.c.get(i).map_or(&[][..], Vec::as_slice);
            *row = (0..a.len().max(b.len()))
                .map(|j| {
                    a.get(j).cloned().unwrap_or_default() + b.get(j).cloned().unwrap_or_default()
                })
                .collect();
        }
        BivariatePoly { c }.normalized()
    }

    pub fn neg(&self) -> Self {
        BivariatePoly { c: self.c.iter().map(|r| r.iter().map(|x| Rational::from(-x)).collect()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let ny = self.deg_y().unwrap_or(0) + o.deg_y().unwrap_or(0) + 1;
        let mut c = vec![vec![Rational::new(); ny]; self.c.len() + o.c.len() - 1];
        for (i1, r1) in self.c.iter().enumerate() {
            for (j1, a) in r1.iter().enumerate() {
                if *a == 0 {
                    continue;
                }
                for (i2, r2) in o.c.iter().enumerate() {
                    for (j2, b) in r2.iter().enumerate() {
                        c[i1 + i2][j1 + j2] += Rational::from(a * b);
                    }
                }
            }
        }
        BivariatePoly { c }.normalized()
    }

    pub fn product(fs: &[Self]) -> Self {
        let mut acc = BivariatePoly { c: vec![vec![Rational::from(1)]] };
        for f in fs {
            acc = acc.mul(f);
        }
        acc
    }

    /// The coefficient of `y^j` as a polynomial in `x`.
    pub fn y_coefficient(&self, j: usize) -> UPoly {
        let mut p: UPoly = (0..self.c.len()).map(|i| self.coeff(i, j)).collect();
        trim(&mut p);
        p
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::new();
        for (i, row) in self.c.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let xi = Rational::from(x.clone().pow(i as i32));
                let yj = Rational::from(y.clone().pow(j as i32));
                acc += Rational::from(c * xi) * yj;
            }
        }
        acc
    }
}

/// The two quartics of the critical-point system.
pub fn build_f1f2(pq: &ParamVec12) -> (BivariatePoly, BivariatePoly) {
    let [p0, p1, p2, p3, p4, p5, p6] = pq.p;
    let [q1, q2, q3, q4, q5] = pq.q;
    let l = BivariatePoly::linear;
    let x = l(1, 0, 0);
    let y = l(0, 1, 0);
    let f1 = BivariatePoly::product(&[x.clone(), l(-1, 0, p1 + q1), l(-1, 0, p2 + q2), l(1, 1, q3 - p0 - p6)])
        .sub(&BivariatePoly::product(&[l(1, 0, -p0), l(1, 0, -p1), l(1, 0, -p2), l(1, 1, -p3)]));
    let f2 = BivariatePoly::product(&[l(1, 1, q3 - p0 - p6), l(0, -1, p4 + q4), l(0, -1, p5 + q5), y])
        .sub(&BivariatePoly::product(&[l(1, 1, -p3), l(0, 1, -p4), l(0, 1, -p5), l(0, 1, -p6)]));
    (f1, f2)
}

/// `alpha(x)^d F2(x, -beta/alpha)` where `F1 = alpha y + beta` and `d` is
/// the y-degree of `F2`. This equals the resultant in `y` up to sign.
pub fn eliminate_y(f1: &BivariatePoly, f2: &BivariatePoly) -> Result<UPoly, AsymptoticsError> {
    if f1.deg_y() != Some(1) {
        return Err(AsymptoticsError::DegeneratePencil);
    }
    let alpha = f1.y_coefficient(1);
    let beta_neg: UPoly = f1.y_coefficient(0).iter().map(|c| Rational::from(-c)).collect();
    let d = f2.deg_y().unwrap_or(0);
    let mut out: UPoly = Vec::new();
    for j in 0..=d {
        let mut term = f2.y_coefficient(j);
        for _ in 0..j {
            term = upoly_mul(&term, &beta_neg);
        }
        for _ in j..d {
            term = upoly_mul(&term, &alpha);
        }
        upoly_add_assign(&mut out, &term);
    }
    Ok(out)
}

/// `F(x) / (x (p3 - x))`.
pub fn cubic_factor(pq: &ParamVec12) -> Result<UPoly, AsymptoticsError> {
    let (f1, f2) = build_f1f2(pq);
    let f = eliminate_y(&f1, &f2)?;
    let den = vec![Rational::new(), Rational::from(pq.p[3]), Rational::from(-1)];
    let c = upoly_div_exact(&f, &den).ok_or(AsymptoticsError::NotDivisible)?;
    match upoly_degree(&c) {
        Some(3) => Ok(c),
        Some(k) => Err(AsymptoticsError::UnexpectedDegree(k)),
        None => Err(AsymptoticsError::UnexpectedDegree(0)),
    }
}

/// All complex roots of a polynomial by Weierstrass (Durand-Kerner)
/// iteration at `bits` of precision, followed by Newton polishing.
pub fn poly_roots(p: &UPoly, bits: u32) -> Result<Vec<Complex>, AsymptoticsError> {
    let n = upoly_degree(p).ok_or(AsymptoticsError::NoConvergence)?;
    let lead = &p[n];
    let monic: UPoly = p[..=n].iter().map(|c| Rational::from(c / lead)).collect();
    let bound = 1.0 + monic[..n].iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
    let seed = Complex::with_val(bits, (0.4, 0.9));
    let mut z: Vec<Complex> = (0..n)
        .map(|k| Complex::with_val(bits, seed.clone().pow(k as u32)) * bound)
        .collect();
    let tol = Float::with_val(bits, 1) >> (bits as i32 - 16);
    let mut converged = false;
    for _ in 0..2000 {
        let mut delta_max = Float::with_val(bits, 0);
        for i in 0..n {
            let mut den = Complex::with_val(bits, (1, 0));
            for j in 0..n {
                if i != j {
                    den *= Complex::with_val(bits, &z[i] - &z[j]);
                }
            }
            let step = upoly_eval_complex(&monic, &z[i]) / den;
            let size = Float::with_val(bits, step.abs_ref()) / Float::with_val(bits, z[i].abs_ref()).max(&Float::with_val(bits, 1));
            if size > delta_max {
                delta_max = size;
            }
            z[i] -= step;
        }
        if delta_max < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(AsymptoticsError::NoConvergence);
    }
    let deriv: UPoly = monic.iter().enumerate().skip(1).map(|(k, c)| Rational::from(c * k as u32)).collect();
    for r in &mut z {
        for _ in 0..4 {
            let d = upoly_eval_complex(&deriv, r);
            if d.is_zero() {
                break;
            }
            let step = upoly_eval_complex(&monic, r) / d;
            *r -= step;
        }
    }
    Ok(z)
}

/// One root of the cubic factor and the associated growth rate.
#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub x: Complex,
    pub y: Complex,
    pub log_lambda: Float,
}

#[derive(Clone, Debug)]
pub struct LambdaValues {
    /// Sorted ascending by modulus.
    pub points: Vec<CriticalPoint>,
    /// True when the cubic has a complex-conjugate pair of roots.
    pub complex_pair: bool,
}

impl LambdaValues {
    pub fn log_lambda(&self, k: usize) -> &Float {
        &self.points[k].log_lambda
    }

    pub fn modulus(&self, k: usize) -> Float {
        self.points[k].log_lambda.clone().exp()
    }
}

fn e_log_abs(base: &Complex, e: i64, bits: u32) -> Float {
    if e == 0 {
        return Float::with_val(bits, 0);
    }
    Float::with_val(bits, base.abs_ref()).ln() * e
}

/// `log` of the growth-rate product at the critical point `(x, y)`.
pub fn log_growth(pq: &ParamVec12, x: &Complex, y: &Complex, bits: u32) -> Float {
    let [p0, p1, p2, p3, p4, p5, p6] = pq.p;
    let [q1, q2, q3, q4, q5] = pq.q;
    let c = |v: i64| Complex::with_val(bits, (v, 0));
    let xy = Complex::with_val(bits, x + y);
    let s = q3 - p0 - p6;
    let l = |b: Complex, e: i64| e_log_abs(&b, e, bits);
    let mut v = Float::with_val(bits, 0);
    v += l(Complex::with_val(bits, x - p0), p0);
    v += l(Complex::with_val(bits, x - p1), p1);
    v += l(Complex::with_val(bits, x - p2), p2);
    v += l(Complex::with_val(bits, &xy - p3), p3);
    v -= l(Complex::with_val(bits, p1 + q1 - x.clone()), p1 + q1);
    v -= l(Complex::with_val(bits, p2 + q2 - x.clone()), p2 + q2);
    v -= l(Complex::with_val(bits, &xy + s), -s);
    v += l(Complex::with_val(bits, y - p4), p4);
    v += l(Complex::with_val(bits, y - p5), p5);
    v += l(Complex::with_val(bits, y - p6), p6);
    v -= l(Complex::with_val(bits, p4 + q4 - y.clone()), p4 + q4);
    v -= l(Complex::with_val(bits, p5 + q5 - y.clone()), p5 + q5);
    for q in [q1, q2, q4, q5] {
        v += l(c(q), q);
    }
    for p in [p0, p3 + s, p6] {
        v -= l(c(p), p);
    }
    v
}

/// The three growth rates attached to `a`, at `digits` of precision.
pub fn lambda_values(a: &ParamVec8, digits: u32) -> Result<LambdaValues, AsymptoticsError> {
    let bits = bits_for_digits(digits);
    let pq = a_to_pq(a);
    let cubic = cubic_factor(&pq)?;
    let (f1, _) = build_f1f2(&pq);
    let alpha = f1.y_coefficient(1);
    let beta = f1.y_coefficient(0);
    let roots = poly_roots(&cubic, bits)?;
    let imag_tol = Float::with_val(bits, 1) >> (bits as i32 / 2);
    let complex_pair = roots.iter().any(|r| Float::with_val(bits, r.imag().abs_ref()) > imag_tol);
    let mut points: Vec<CriticalPoint> = roots
        .into_iter()
        .map(|x| {
            let y = -upoly_eval_complex(&beta, &x) / upoly_eval_complex(&alpha, &x);
            let log_lambda = log_growth(&pq, &x, &y, bits);
            CriticalPoint { x, y, log_lambda }
        })
        .collect();
    points.sort_by(|u, v| u.log_lambda.partial_cmp(&v.log_lambda).unwrap_or(Ordering::Equal));
    let tie_tol = Float::with_val(bits, 1) >> (bits as i32 / 2);
    for w in points.windows(2) {
        if Float::with_val(bits, &w[1].log_lambda - &w[0].log_lambda) < tie_tol {
            return Err(AsymptoticsError::ModulusTie);
        }
    }
    Ok(LambdaValues { points, complex_pair })
}

/// Piecewise-constant function on `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    /// `(lo, hi, value)` covering `[0, 1)` in order.
    pub intervals: Vec<(Rational, Rational, i64)>,
}

impl StepFunction {
    /// Value at `t` in `[0, 1)`.
    pub fn value_at(&self, t: &Rational) -> i64 {
        let k = self.intervals.partition_point(|(lo, _, _)| lo <= t);
        self.intervals[k.saturating_sub(1)].2
    }

    pub fn breakpoints(&self) -> Vec<Rational> {
        self.intervals.iter().skip(1).map(|(lo, _, _)| lo.clone()).collect()
    }
}

fn floor_mul(h: i64, num: i64, den: i64) -> i64 {
    (h * num).div_euclid(den)
}

/// `phi(t) = max_g sum_F (floor(h_i(a) t) - floor(h_i(g a) t))`.
pub fn phi_step(a: &ParamVec8) -> Result<StepFunction, AsymptoticsError> {
    let base = hyperplane_values(a).f_values();
    let base_sum: i64 = base.iter().sum();
    let mut images: Vec<[i64; 17]> =
        group().elements.iter().map(|g| hyperplane_values(&g.apply(a)).f_values()).collect();
    images.sort_unstable();
    images.dedup();
    if images.iter().any(|v| v.iter().sum::<i64>() != base_sum) {
        return Err(AsymptoticsError::InvarianceViolation);
    }
    let mut bps: Vec<Rational> = vec![Rational::new(), Rational::from(1)];
    let mut hs: Vec<i64> = images.iter().flatten().copied().filter(|&h| h > 1).collect();
    hs.sort_unstable();
    hs.dedup();
    for &h in &hs {
        for j in 1..h {
            bps.push(Rational::from((j, h)));
        }
    }
    bps.sort();
    bps.dedup();
    let intervals: Vec<(Rational, Rational, i64)> = bps
        .par_windows(2)
        .map(|w| {
            let mid = Rational::from(&w[0] + &w[1]) / 2u32;
            let num = mid.numer().to_i64().expect("small numerator");
            let den = mid.denom().to_i64().expect("small denominator");
            let sum = |v: &[i64; 17]| -> i64 { v.iter().map(|&h| floor_mul(h, num, den)).sum() };
            let b = sum(&base);
            let val = images.iter().map(|v| b - sum(v)).max().unwrap_or(0);
            (w[0].clone(), w[1].clone(), val)
        })
        .collect();
    // merge equal neighbours
    let mut merged: Vec<(Rational, Rational, i64)> = Vec::new();
    for (lo, hi, v) in intervals {
        match merged.last_mut() {
            Some(last) if last.2 == v => last.1 = hi,
            _ => merged.push((lo, hi, v)),
        }
    }
    Ok(StepFunction { intervals: merged })
}

/// `sum value * (psi(hi) - psi(lo))` over the steps.
pub fn phi_limit_of(step: &StepFunction, bits: u32) -> Result<Float, AsymptoticsError> {
    let mut total = Float::with_val(bits, 0);
    for (lo, hi, v) in &step.intervals {
        if *v == 0 {
            continue;
        }
        if *lo == 0 {
            return Err(AsymptoticsError::SingularStep);
        }
        let psi = |r: &Rational| Float::with_val(bits, r).digamma();
        total += (psi(hi) - psi(lo)) * *v;
    }
    Ok(total)
}

/// Limit of `log(Phi_n) / n`.
pub fn phi_limit(a: &ParamVec8, digits: u32) -> Result<Float, AsymptoticsError> {
    phi_limit_of(&phi_step(a)?, bits_for_digits(digits))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct WorthinessOptions {
    /// Use the `h'`/`h''` split with `l` values from `h'`.
    pub refined_l: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct WorthinessReport {
    pub a: ParamVec8,
    pub digits: u32,
    pub lambdas: LambdaValues,
    pub c0: Float,
    pub c1: Float,
    pub c2: Float,
    pub m: [i64; 5],
    pub phi_limit: Float,
    pub gamma: Float,
    /// `|lambda_2| < 1 < |lambda_3|`.
    pub sane: bool,
}

#[derive(Serialize)]
struct ReportJson {
    a: ParamVec8,
    lambda: [String; 3],
    log_lambda: [String; 3],
    complex_pair: bool,
    #[serde(rename = "C0")]
    c0: String,
    #[serde(rename = "C1")]
    c1: String,
    #[serde(rename = "C2")]
    c2: String,
    m: [i64; 5],
    phi_limit: String,
    gamma: String,
    sane: bool,
    prec: u32,
}

impl Serialize for WorthinessReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let d = self.digits;
        let f = |x: &Float| fmt_float(x, d);
        ReportJson {
            a: self.a,
            lambda: std::array::from_fn(|k| f(&self.lambdas.modulus(k))),
            log_lambda: std::array::from_fn(|k| f(self.lambdas.log_lambda(k))),
            complex_pair: self.lambdas.complex_pair,
            c0: f(&self.c0),
            c1: f(&self.c1),
            c2: f(&self.c2),
            m: self.m,
            phi_limit: f(&self.phi_limit),
            gamma: f(&self.gamma),
            sane: self.sane,
            prec: d,
        }
        .serialize(s)
    }
}

pub fn worthiness(a: &ParamVec8, digits: u32) -> Result<WorthinessReport, AsymptoticsError> {
    worthiness_with(a, digits, WorthinessOptions::default())
}

pub fn worthiness_with(
    a: &ParamVec8,
    digits: u32,
    opts: WorthinessOptions,
) -> Result<WorthinessReport, AsymptoticsError> {
    let bits = bits_for_digits(digits);
    let lambdas = lambda_values(a, digits)?;
    let h = hyperplane_values(a);
    let m = match opts.refined_l {
        Some(l) => h.refined_maxima(l).ok_or(AsymptoticsError::BadSplit(l))?,
        None => h.five_maxima(),
    };
    let phi = phi_limit(a, digits)?;
    let c0 = lambdas.log_lambda(1).clone();
    let c1 = lambdas.log_lambda(2).clone();
    let c2 = Float::with_val(bits, m.iter().sum::<i64>()) - &phi;
    let gamma = Float::with_val(bits, &c1 - &c0) / Float::with_val(bits, &c1 + &c2);
    let sane = c0 < 0 && c1 > 0;
    Ok(WorthinessReport { a: *a, digits, lambdas, c0, c1, c2, m, phi_limit: phi, gamma, sane })
}
