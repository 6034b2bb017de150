//! Exact rational arithmetic helpers.
//!
//! [`Rational`] is an alias for `num_rational::BigRational`: an exact fraction
//! of arbitrary-size integers, always kept in lowest terms with a positive
//! denominator. Everything terminating in this crate is computed in this type;
//! nothing here ever rounds.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Build `p/q` from machine integers. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Build an integer-valued rational.
pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parse `p/q` or a plain integer string. Whitespace around the number is
/// tolerated; decimal points are rejected so exactness is never silently lost.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if t.contains('.') {
        return Err(Error::Parse(format!(
            "decimal input `{t}` is not accepted; use an exact p/q fraction"
        )));
    }
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in `{t}`")))?;
            let q: BigInt = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in `{t}`")))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{t}`")));
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = t
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational `{t}`")))?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Wire form used in sequence files: always `p/q`, even for integers.
pub fn to_wire(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Integer power with negative exponents allowed. Errors on `0^k` for `k < 0`.
pub fn pow_i64(base: &Rational, k: i64) -> Result<Rational> {
    if base.is_zero() && k < 0 {
        return Err(Error::DivisionByZero);
    }
    if k == 0 {
        return Ok(Rational::one());
    }
    let mut acc = Rational::one();
    let mut b = if k < 0 { base.recip() } else { base.clone() };
    let mut e = k.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    Ok(acc)
}

/// Exact `10^k` for any integer `k`.
pub fn ten_pow(k: i64) -> Rational {
    pow_i64(&rat_int(10), k).expect("base is nonzero")
}

/// True when `r` is an integer `<= 0` (a Pochhammer/Gamma pole site).
pub fn is_nonpositive_integer(r: &Rational) -> bool {
    r.is_integer() && !r.is_positive()
}

/// For integer rationals in `0..=bound`, the value as `usize`.
pub fn as_small_nonneg_integer(r: &Rational, bound: usize) -> Option<usize> {
    if !r.is_integer() || r.is_negative() {
        return None;
    }
    let n = r.numer();
    if n.sign() == Sign::Minus {
        return None;
    }
    let (_, digits) = n.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 if digits[0] <= bound as u64 => Some(digits[0] as usize),
        _ => None,
    }
}

/// Signed integer value of an integer rational, if it fits in `i64`.
pub fn as_i64(r: &Rational) -> Option<i64> {
    use num_traits::ToPrimitive;
    if !r.is_integer() {
        return None;
    }
    r.numer().to_i64()
}
