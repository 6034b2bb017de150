//! Natural logarithm and exponential on [`BigFloat`].
//!
//! `ln` reduces the argument to `[1, 2)` by exponent extraction and sums the
//! atanh series in `t = (f-1)/(f+1) <= 1/3`; `exp` reduces modulo ln 2 and
//! sums the Taylor series of the remainder. Both work at the requested
//! precision plus fixed guard bits.

use num_traits::ToPrimitive;

use super::constants::ln2_bits;
use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};

/// Natural logarithm of a positive value.
pub fn ln(x: &BigFloat, prec: u32) -> Result<BigFloat> {
    if x.is_zero() || x.is_negative() {
        return Err(Error::Domain("ln requires a positive argument".into()));
    }
    let wp = prec + 32;
    let k = x.top_bit() - 1; // x = f * 2^k with f in [1, 2)
    let f = x.mul_pow2(-k);
    let one = BigFloat::one(wp);
    let t = f.sub(&one, wp).div(&f.add(&one, wp), wp)?;
    let mut sum = t.clone();
    if !t.is_zero() {
        let t2 = t.mul(&t, wp);
        let mut pow = t.clone();
        let mut j = 1i64;
        loop {
            pow = pow.mul(&t2, wp);
            let term = pow.div(&BigFloat::from_i64(2 * j + 1, wp), wp)?;
            if term.is_zero() || term.top_bit() < -(wp as i64 + 8) {
                break;
            }
            sum = sum.add(&term, wp);
            j += 1;
        }
    }
    let ln_f = sum.mul_pow2(1);
    if k == 0 {
        return Ok(ln_f.round_to(prec));
    }
    let ln2 = ln2_bits(wp + 16);
    Ok(BigFloat::from_i64(k, wp).mul(&ln2, wp + 16).add(&ln_f, wp).round_to(prec))
}

/// Exponential. The argument magnitude is expected to stay at desk scale
/// (|x| well below 2^40); the reduction count is checked.
pub fn exp(x: &BigFloat, prec: u32) -> Result<BigFloat> {
    let wp = prec + 48;
    if x.is_zero() {
        return Ok(BigFloat::one(prec));
    }
    // k = nearest integer to x / ln 2, so |r| <= ln2/2 + rounding slop
    let coarse = x.div(&ln2_bits(96), 96)?;
    let k = coarse
        .to_rational()
        .round()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Domain("exp argument out of supported range".into()))?;
    let kw = 64 - k.unsigned_abs().leading_zeros();
    let ln2 = ln2_bits(wp + kw + 8);
    let r = x.sub(&BigFloat::from_i64(k, wp).mul(&ln2, wp + kw + 8), wp);
    let mut sum = BigFloat::one(wp);
    let mut term = BigFloat::one(wp);
    let mut j = 1i64;
    loop {
        term = term.mul(&r, wp).div(&BigFloat::from_i64(j, wp), wp)?;
        if term.is_zero() || term.top_bit() < -(wp as i64 + 8) {
            break;
        }
        sum = sum.add(&term, wp);
        j += 1;
    }
    Ok(sum.mul_pow2(k).round_to(prec))
}
