//! Rational reconstruction from an enclosure.

use rug::{Float, Integer, Rational};
use thiserror::Error;

use super::HpReal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalizeError {
    #[error("error bound too large for denominator bound {bound}: err * bound^2 >= 1/4")]
    Precondition { bound: String },
    #[error("no rational with denominator <= {bound} lies within the error bound")]
    NoCandidate { bound: String },
    #[error("input is not finite")]
    NonFinite,
}

/// The rational of least denominator in the closed interval `[lo, hi]`,
/// via simultaneous continued-fraction expansion of both endpoints.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if lo.cmp0().is_le() && hi.cmp0().is_ge() {
        return Rational::new();
    }
    if hi.cmp0().is_lt() {
        return -simplest_between(&Rational::from(-hi), &Rational::from(-lo));
    }
    // 0 < lo <= hi
    let fl = Integer::from(lo.floor_ref());
    if Rational::from(&fl) == *lo {
        return Rational::from(fl);
    }
    let up = Integer::from(&fl + 1u32);
    if up <= *hi {
        return Rational::from(up);
    }
    // lo and hi share the integer part; recurse on the reciprocals of the
    // fractional parts.
    let flo = Rational::from(lo - &fl);
    let fhi = Rational::from(hi - &fl);
    let inner = simplest_between(&fhi.recip(), &flo.recip());
    inner.recip() + fl
}

/// The unique rational with denominator at most `bound` inside
/// `[x - err, x + err]`.
pub fn rationalize(x: &HpReal, bound: &Integer) -> Result<Rational, RationalizeError> {
    let (lo, hi) = enclosure(x)?;
    let width = Rational::from(&hi - &lo);
    let b2 = Integer::from(bound.square_ref());
    // 2 err * bound^2 < 1/2
    if width * b2 >= Rational::from((1, 2)) {
        return Err(RationalizeError::Precondition { bound: bound.to_string() });
    }
    let r = simplest_between(&lo, &hi);
    if r.denom() > bound {
        return Err(RationalizeError::NoCandidate { bound: bound.to_string() });
    }
    Ok(r)
}

fn enclosure(x: &HpReal) -> Result<(Rational, Rational), RationalizeError> {
    let v = x.value.to_rational().ok_or(RationalizeError::NonFinite)?;
    let e = x.err.to_rational().ok_or(RationalizeError::NonFinite)?.abs();
    Ok((Rational::from(&v - &e), v + e))
}

/// Largest denominator bound `B` with `err * B^2 <= safety`.
pub fn bound_for(err: &Float, safety: f64) -> Integer {
    if err.is_zero() {
        return Integer::from(Integer::u_pow_u(10, 30));
    }
    let p = err.prec().max(64);
    let b = Float::with_val(p, Float::with_val(p, safety) / err).sqrt().floor();
    b.to_integer().unwrap_or_default().max(Integer::from(1))
}
