//! The exact triple `(Q, Phat, P)` with
//! `I = Q (2 zeta5 + 4 zeta3 zeta2) - 4 Phat zeta2 - 2 P`.

use rug::{Float, Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use super::integral::{eval_i_and_second, IntegralError};
use super::rational::{bound_for, rationalize, RationalizeError};
use super::{bits_for_digits, fmt_float, ten_pow_neg, zeta_constants, HpReal};
use crate::exact::{lcm_d, q_from_sum, ExactError};
use crate::params::{a_to_pq, first_violated_form, hyperplane_values, ParamVec8};

/// Reconstruction accepts `B` with `err * B^2 <= SAFETY`; a random real
/// passes with probability about `SAFETY`.
pub const SAFETY: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("inadmissible parameters: {0} < 0")]
    Inadmissible(String),
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("reconstruction of {which} failed: {source}")]
    Ambiguity { which: &'static str, source: RationalizeError },
    #[error("residual {residual} exceeds 1e-{limit}")]
    ResidualTooLarge { residual: String, limit: u32 },
    #[error("reconstruction changed under doubled precision")]
    Unstable,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub a: ParamVec8,
    pub q: Integer,
    pub phat: Rational,
    pub p: Rational,
    /// Bound on `|I - (Q(2 zeta5 + 4 zeta3 zeta2) - 4 Phat zeta2 - 2 P)|`.
    pub residual: Float,
    pub prec: u32,
    pub i_value: HpReal,
    /// `I'' = Q zeta3 - Phat`, as evaluated.
    pub second: HpReal,
    /// `d_{m1} ... d_{m5}` for the five largest hyperplane values.
    pub d_product: Integer,
}

impl Decomposition {
    /// Whether both denominators divide `d_{m1} ... d_{m5}`.
    pub fn den_inclusion(&self) -> bool {
        self.d_product.is_divisible(self.phat.denom()) && self.d_product.is_divisible(self.p.denom())
    }
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Decomposition", 7)?;
        st.serialize_field("a", &self.a.0)?;
        st.serialize_field("Q", &self.q.to_string())?;
        st.serialize_field("Phat", &self.phat.to_string())?;
        st.serialize_field("P", &self.p.to_string())?;
        st.serialize_field("residual", &fmt_float(&self.residual, 6))?;
        st.serialize_field("prec", &self.prec)?;
        st.serialize_field("den_inclusion", &self.den_inclusion())?;
        st.end()
    }
}

fn exact_times(c: &Rational, x: &Float, digits: u32) -> HpReal {
    HpReal::exact(x.clone(), digits).scale(&Float::with_val(x.prec(), c))
}

pub fn decompose(a: &ParamVec8, prec: u32) -> Result<Decomposition, DecomposeError> {
    if let Some(f) = first_violated_form(a) {
        return Err(DecomposeError::Inadmissible(f.render()));
    }
    let bits = bits_for_digits(prec);
    let z = zeta_constants(bits);
    let q = q_from_sum(&a_to_pq(a))?;
    let qr = Rational::from(&q);
    let (i_val, second) = eval_i_and_second(a, prec)?;

    let x_hat = exact_times(&qr, &z.z3, prec).sub(&second);
    let phat = rationalize(&x_hat, &bound_for(&x_hat.err, SAFETY))
        .map_err(|source| DecomposeError::Ambiguity { which: "Phat", source })?;

    // P = Q zeta5 - (I - 4 I'' zeta2) / 2
    let z2 = HpReal::exact(z.z2.clone(), prec);
    let four_sec_z2 = second.mul(&z2).scale(&Float::with_val(bits, 4));
    let x_p = exact_times(&qr, &z.z5, prec).sub(&i_val.sub(&four_sec_z2).scale(&Float::with_val(bits, 0.5)));
    let p = rationalize(&x_p, &bound_for(&x_p.err, SAFETY))
        .map_err(|source| DecomposeError::Ambiguity { which: "P", source })?;

    let form = {
        let z3z2 = Float::with_val(bits, &z.z3 * &z.z2);
        let lead = Float::with_val(bits, &z.z5 * 2u32) + z3z2 * 4u32;
        lead * &q - Float::with_val(bits, &z.z2 * &phat) * 4u32 - Float::with_val(bits, &p) * 2u32
    };
    let residual = Float::with_val(bits, &i_val.value - &form).abs() + &i_val.err;
    let limit = prec.saturating_sub(10);
    if residual > ten_pow_neg(limit as i32, bits) {
        return Err(DecomposeError::ResidualTooLarge { residual: fmt_float(&residual, 6), limit });
    }
    let d_product = hyperplane_values(a)
        .five_maxima()
        .iter()
        .map(|&m| lcm_d(m.max(0) as u64))
        .fold(Integer::from(1), |acc, d| acc * d);
    Ok(Decomposition { a: *a, q, phat, p, residual, prec, i_value: i_val, second, d_product })
}

/// [`decompose`] at `prec` and at `2 prec`; fails unless both agree.
pub fn decompose_verified(a: &ParamVec8, prec: u32) -> Result<Decomposition, DecomposeError> {
    let d = decompose(a, prec)?;
    let d2 = decompose(a, 2 * prec)?;
    if d.phat != d2.phat || d.p != d2.p {
        return Err(DecomposeError::Unstable);
    }
    Ok(d)
}
