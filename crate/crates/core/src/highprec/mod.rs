//! Arbitrary-precision numerics built on MPFR floats.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

pub mod decompose;
pub mod f7;
pub mod integral;
pub mod quad;
pub mod rational;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Serialize, Serializer};

/// Working precision in bits for `digits` decimal digits, with guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

/// Render a float with `digits` significant decimal digits.
pub fn fmt_float(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits.max(1) as usize))
}

/// A float together with a conservative absolute error bound.
#[derive(Clone, Debug)]
pub struct HpReal {
    pub value: Float,
    pub err: Float,
    pub digits: u32,
}

impl HpReal {
    pub fn new(value: Float, err: Float, digits: u32) -> Self {
        HpReal { value, err, digits }
    }

    pub fn exact(value: Float, digits: u32) -> Self {
        let err = Float::with_val(value.prec(), 0);
        HpReal { value, err, digits }
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn add(&self, o: &HpReal) -> HpReal {
        let p = self.prec().max(o.prec());
        let v = Float::with_val(p, &self.value + &o.value);
        let e = Float::with_val(p, &self.err + &o.err) + ulp(&v);
        HpReal::new(v, e, self.digits.min(o.digits))
    }

    pub fn sub(&self, o: &HpReal) -> HpReal {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> HpReal {
        HpReal::new(Float::with_val(self.prec(), -&self.value), self.err.clone(), self.digits)
    }

    /// Multiplication by an exact float.
    pub fn scale(&self, c: &Float) -> HpReal {
        let p = self.prec();
        let v = Float::with_val(p, &self.value * c);
        let e = Float::with_val(p, &self.err * Float::with_val(p, c.abs_ref())) + ulp(&v);
        HpReal::new(v, e, self.digits)
    }

    pub fn mul(&self, o: &HpReal) -> HpReal {
        let p = self.prec().max(o.prec());
        let v = Float::with_val(p, &self.value * &o.value);
        let a = Float::with_val(p, self.value.abs_ref()) * &o.err;
        let b = Float::with_val(p, o.value.abs_ref()) * &self.err;
        let c = Float::with_val(p, &self.err * &o.err);
        let e = a + b + c + ulp(&v);
        HpReal::new(v, e, self.digits.min(o.digits))
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_float(&self.value, self.digits))
    }
}

impl Serialize for HpReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One unit in the last place of `x` (at least the smallest positive value
/// at its precision scale).
pub fn ulp(x: &Float) -> Float {
    let p = x.prec();
    let e = x.get_exp().unwrap_or(0);
    Float::with_val(p, 1) << (e - p as i32 + 1)
}

/// `10^(-k)` at precision `bits`.
pub fn ten_pow_neg(k: i32, bits: u32) -> Float {
    Float::with_val(bits, 10).pow(-k)
}

/// `(zeta(2), zeta(3), zeta(5))` at `bits` of precision.
#[derive(Clone, Debug)]
pub struct ZetaConstants {
    pub z2: Float,
    pub z3: Float,
    pub z5: Float,
}

/// Cached zeta values. Backed by MPFR's `zeta`.
pub fn zeta_constants(bits: u32) -> ZetaConstants {
    static CACHE: OnceLock<Mutex<HashMap<u32, ZetaConstants>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("zeta cache poisoned");
    guard
        .entry(bits)
        .or_insert_with(|| ZetaConstants {
            z2: Float::with_val(bits, Float::zeta_u(2)),
            z3: Float::with_val(bits, Float::zeta_u(3)),
            z5: Float::with_val(bits, Float::zeta_u(5)),
        })
        .clone()
}

pub fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `zeta(3) = 5/2 sum (-1)^(k+1) / (k^3 C(2k,k))`.
    fn zeta3_series(bits: u32) -> Float {
        let mut s = Float::with_val(bits, 0);
        let mut c = rug::Integer::from(1);
        for k in 1..(bits as u64) {
            c *= 2 * (2 * k - 1);
            c /= k;
            let t = Float::with_val(bits, &c) * Float::with_val(bits, k).pow(3u32);
            let t = Float::with_val(bits, t.recip_ref());
            if k % 2 == 1 {
                s += t;
            } else {
                s -= t;
            }
        }
        s * 5u32 / 2u32
    }

    /// `zeta(5)` from the alternating eta series with Cohen-Villegas-Zagier
    /// acceleration.
    fn zeta5_eta(bits: u32) -> Float {
        let n = (bits as f64 / 2.5).ceil() as u64 + 2;
        let three = Float::with_val(bits, 8).sqrt() + 3u32;
        let d = Float::with_val(bits, three.pow(n as u32));
        let d = (Float::with_val(bits, d.recip_ref()) + &d) / 2u32;
        let mut b = Float::with_val(bits, -1);
        let mut c = -d.clone();
        let mut s = Float::with_val(bits, 0);
        for k in 0..n {
            c = Float::with_val(bits, &b - &c);
            let term = Float::with_val(bits, &c / Float::with_val(bits, k + 1).pow(5u32));
            s += term;
            let num = Float::with_val(bits, (k + n) as f64) * (2.0 * ((k as f64) - (n as f64)));
            b = b * num / Float::with_val(bits, (k + 1) as f64 * (2.0 * k as f64 + 1.0));
        }
        let eta = s / d;
        // zeta(5) = eta(5) / (1 - 2^-4)
        eta * 16u32 / 15u32
    }

    #[test]
    fn zeta_values_agree_with_series() {
        let bits = bits_for_digits(60);
        let z = zeta_constants(bits);
        let tol = ten_pow_neg(55, bits);
        let pi2 = Float::with_val(bits, pi(bits).square_ref()) / 6u32;
        assert!(Float::with_val(bits, &z.z2 - &pi2).abs() < tol);
        assert!(Float::with_val(bits, &z.z3 - zeta3_series(bits)).abs() < tol);
        assert!(Float::with_val(bits, &z.z5 - zeta5_eta(bits)).abs() < tol);
        assert!(fmt_float(&z.z5, 13).starts_with("1.036927755143"));
    }

    #[test]
    fn error_propagation_is_monotone() {
        let bits = 128;
        let x = HpReal::new(Float::with_val(bits, 2), Float::with_val(bits, 1e-20), 30);
        let y = HpReal::new(Float::with_val(bits, 3), Float::with_val(bits, 1e-22), 30);
        assert!(x.add(&y).err >= x.err);
        assert!(x.mul(&y).err >= Float::with_val(bits, &x.err * 3u32));
        assert_eq!(x.sub(&x).value, 0);
    }
}
