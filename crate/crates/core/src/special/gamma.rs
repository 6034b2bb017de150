//! Gamma, log-Gamma, and digamma at positive rational arguments.
//!
//! Both functions shift the argument upward by exact rational recurrences
//! until it clears a precision-dependent threshold, then use the Stirling
//! asymptotic series, whose remainder for positive real arguments is bounded
//! by the first omitted term. Working precision carries fixed guard bits on
//! top of the requested digits, and results are cached per
//! (argument, precision).

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use super::elementary::{exp, ln};
use super::{bernoulli, factorial, pochhammer};
use crate::bigfloat::{bits_for_digits, digits_for_bits, BigFloat};
use crate::constexpr::ConstExpr;
use crate::error::{Error, Result};
use crate::rational::{rat_int, Rational};

#[derive(PartialEq, Eq, Hash)]
enum Kind {
    Gamma,
    LnGamma,
    Digamma,
}

type GammaCache = HashMap<(Kind, Rational, u32), BigFloat>;

static CACHE: Lazy<Mutex<GammaCache>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn cached(kind: Kind, q: &Rational, prec: u32, compute: impl FnOnce() -> Result<BigFloat>) -> Result<BigFloat> {
    if let Some(v) = CACHE
        .lock()
        .expect("gamma cache poisoned")
        .get(&(match kind { Kind::Gamma => Kind::Gamma, Kind::LnGamma => Kind::LnGamma, Kind::Digamma => Kind::Digamma }, q.clone(), prec))
    {
        return Ok(v.clone());
    }
    let v = compute()?;
    CACHE
        .lock()
        .expect("gamma cache poisoned")
        .insert((kind, q.clone(), prec), v.clone());
    Ok(v)
}

/// Smallest argument at which the Stirling tail can reach `prec` bits: the
/// minimal term of the asymptotic series behaves like `e^(-2 pi z)`, so the
/// argument scales with the digit target.
fn stirling_threshold(prec: u32) -> u32 {
    let d = digits_for_bits(prec) + 6;
    12.max((45 * d).div_ceil(100))
}

fn check_positive(q: &Rational, what: &str) -> Result<()> {
    if !q.is_positive() {
        return Err(Error::Domain(format!("{what} requires a positive argument, got {q}")));
    }
    Ok(())
}

/// Integer shift placing `q + m` at or above the threshold.
fn shift_amount(q: &Rational, threshold: u32) -> usize {
    let t = rat_int(threshold as i64);
    if *q >= t {
        return 0;
    }
    let diff = &t - q;
    (diff.ceil().to_integer().to_string().parse::<usize>()).unwrap_or(0)
}

/// Stirling series for `ln Gamma(z)` at a rational `z` at or above the
/// threshold. Remainder is below the first omitted term, which is pushed
/// under `2^-(wp+4)`.
fn ln_gamma_stirling(z: &Rational, wp: u32) -> Result<BigFloat> {
    let zf = BigFloat::from_rational(z, wp);
    let ln_z = ln(&zf, wp)?;
    let half = BigFloat::from_rational(&Rational::new(BigInt::one(), BigInt::from(2)), wp);
    // (z - 1/2) ln z - z + ln(2 pi)/2
    let mut acc = zf.sub(&half, wp).mul(&ln_z, wp).sub(&zf, wp);
    let two_pi = super::constants::pi_bits(wp).mul_pow2(1);
    acc = acc.add(&ln(&two_pi, wp)?.mul_pow2(-1), wp);
    // + sum_k B_2k / (2k (2k-1) z^(2k-1))
    let inv_z = zf.recip(wp)?;
    let inv_z2 = inv_z.mul(&inv_z, wp);
    let mut pow = inv_z.clone();
    let mut prev_top: Option<i64> = None;
    for k in 1..500usize {
        let coeff = bernoulli(2 * k) / rat_int((2 * k * (2 * k - 1)) as i64);
        let term = BigFloat::from_rational(&coeff, wp).mul(&pow, wp);
        if term.is_zero() || term.top_bit() < -(wp as i64 + 4) {
            return Ok(acc);
        }
        if let Some(p) = prev_top {
            if term.top_bit() >= p {
                return Err(Error::Domain(
                    "Stirling series failed to reach the target precision; argument shift too small".into(),
                ));
            }
        }
        prev_top = Some(term.top_bit());
        acc = acc.add(&term, wp);
        pow = pow.mul(&inv_z2, wp);
    }
    Err(Error::Domain("Stirling series exceeded its term budget".into()))
}

/// `ln Gamma(q)` at `prec` bits for positive rational `q`.
pub fn ln_gamma_bits(q: &Rational, prec: u32) -> Result<BigFloat> {
    check_positive(q, "ln Gamma")?;
    cached(Kind::LnGamma, q, prec, || {
        let wp = prec + 32;
        let m = shift_amount(q, stirling_threshold(prec));
        let lg = ln_gamma_stirling(&(q + rat_int(m as i64)), wp)?;
        if m == 0 {
            return Ok(lg.round_to(prec));
        }
        // Gamma(q) = Gamma(q+m) / (q)_m
        let shift = pochhammer(q, m);
        Ok(lg.sub(&ln(&BigFloat::from_rational(&shift, wp), wp)?, wp).round_to(prec))
    })
}

/// `Gamma(q)` at `prec` bits for positive rational `q`. Small integer
/// arguments are exact factorials.
pub fn gamma_bits(q: &Rational, prec: u32) -> Result<BigFloat> {
    check_positive(q, "Gamma")?;
    if q.is_integer() {
        if let Some(n) = crate::rational::as_small_nonneg_integer(q, 10_000) {
            return Ok(BigFloat::from_bigint(&factorial(n - 1), prec));
        }
    }
    cached(Kind::Gamma, q, prec, || {
        let wp = prec + 32;
        let m = shift_amount(q, stirling_threshold(prec));
        let lg = ln_gamma_stirling(&(q + rat_int(m as i64)), wp)?;
        let g_shifted = exp(&lg, wp)?;
        if m == 0 {
            return Ok(g_shifted.round_to(prec));
        }
        let shift = BigFloat::from_rational(&pochhammer(q, m), wp);
        Ok(g_shifted.div(&shift, wp)?.round_to(prec))
    })
}

/// Stirling series for `psi(z)` at or above the threshold:
/// `ln z - 1/(2z) - sum_k B_2k/(2k z^2k)`, remainder below the first
/// omitted term.
fn digamma_stirling(z: &Rational, wp: u32) -> Result<BigFloat> {
    let zf = BigFloat::from_rational(z, wp);
    let inv_z = zf.recip(wp)?;
    let mut acc = ln(&zf, wp)?.sub(&inv_z.mul_pow2(-1), wp);
    let inv_z2 = inv_z.mul(&inv_z, wp);
    let mut pow = inv_z2.clone();
    let mut prev_top: Option<i64> = None;
    for k in 1..500usize {
        let coeff = bernoulli(2 * k) / rat_int(2 * k as i64);
        let term = BigFloat::from_rational(&coeff, wp).mul(&pow, wp);
        if term.is_zero() || term.top_bit() < -(wp as i64 + 4) {
            return Ok(acc);
        }
        if let Some(p) = prev_top {
            if term.top_bit() >= p {
                return Err(Error::Domain(
                    "digamma asymptotic series failed to converge; argument shift too small".into(),
                ));
            }
        }
        prev_top = Some(term.top_bit());
        acc = acc.sub(&term, wp);
        pow = pow.mul(&inv_z2, wp);
    }
    Err(Error::Domain("digamma asymptotic series exceeded its term budget".into()))
}

/// `psi(q)` at `prec` bits for positive rational `q` (poles sit at the
/// nonpositive integers, and negative arguments are out of scope).
pub fn digamma_bits(q: &Rational, prec: u32) -> Result<BigFloat> {
    check_positive(q, "digamma")?;
    cached(Kind::Digamma, q, prec, || {
        let wp = prec + 32;
        let m = shift_amount(q, stirling_threshold(prec));
        let psi_shifted = digamma_stirling(&(q + rat_int(m as i64)), wp)?;
        if m == 0 {
            return Ok(psi_shifted.round_to(prec));
        }
        // psi(q) = psi(q+m) - sum_{j=0}^{m-1} 1/(q+j), correction exact
        let mut corr = Rational::zero();
        let mut t = q.clone();
        for _ in 0..m {
            corr += t.recip();
            t += Rational::one();
        }
        Ok(psi_shifted.sub(&BigFloat::from_rational(&corr, wp), wp).round_to(prec))
    })
}

/// Gamma with relative error below `10^-digits`.
pub fn gamma_rational(q: &Rational, digits: u32) -> Result<BigFloat> {
    gamma_bits(q, bits_for_digits(digits))
}

/// log-Gamma with absolute error below `10^-digits`.
pub fn ln_gamma_rational(q: &Rational, digits: u32) -> Result<BigFloat> {
    ln_gamma_bits(q, bits_for_digits(digits))
}

/// Digamma with absolute error below `10^-digits`.
pub fn digamma_rational(q: &Rational, digits: u32) -> Result<BigFloat> {
    digamma_bits(q, bits_for_digits(digits))
}

/// The Pochhammer symbol `(alpha)_s` at non-integer index, as the Gamma
/// quotient `Gamma(alpha+s)/Gamma(alpha)`. Requires `alpha > 0` and
/// `alpha + s > 0`.
pub fn pochhammer_ratio_gamma(alpha: &Rational, s: &Rational) -> Result<ConstExpr> {
    if !alpha.is_positive() {
        return Err(Error::Domain(format!("(alpha)_s needs alpha > 0, got {alpha}")));
    }
    let top = alpha + s;
    if !top.is_positive() {
        return Err(Error::Domain(format!("(alpha)_s needs alpha + s > 0, got {top}")));
    }
    Ok(ConstExpr::gamma_at(top)?.div(ConstExpr::gamma_at(alpha.clone())?))
}
