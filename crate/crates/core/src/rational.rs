//! Exact rational scalars.
//!
//! Every capacity, profit, slope and breakpoint in the crate is a
//! [`Rational`]; nothing on a solver path is ever rounded.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form (positive denominator,
/// reduced by the gcd).
pub type Rational = BigRational;

/// `num / den` as a canonical rational. Panics when `den == 0`; use
/// [`checked_div`] for data that has not been validated.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn checked_div(num: &Rational, den: &Rational) -> Result<Rational> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(num / den)
}

/// Parses `"n"` or `"n/d"` (optional sign, surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::invalid(format!("malformed rational {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::invalid(format!("malformed rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Closest `f64`, for display only.
pub fn to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Huge numerators and denominators: scale both down before dividing.
    let n_bits = r.numer().bits() as i64;
    let d_bits = r.denom().bits() as i64;
    let shift_n = (n_bits - 60).max(0) as usize;
    let shift_d = (d_bits - 60).max(0) as usize;
    let n = (r.numer().abs() >> shift_n).to_f64().unwrap_or(f64::MAX);
    let d = (r.denom() >> shift_d).to_f64().unwrap_or(f64::MAX);
    let v = n / d * 2f64.powi(shift_n as i32 - shift_d as i32);
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// Nearest integer, halves rounded up.
pub fn round_half_up(r: &Rational) -> BigInt {
    (r + rat(1, 2)).floor().to_integer()
}

pub(crate) fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}
