//! Arbitrary-precision binary floating point.
//!
//! A [`BigFloat`] is `mant * 2^exp` with an explicit precision in bits. Every
//! arithmetic operation takes the target precision as an argument and rounds
//! the exact result to that many bits, round-to-nearest, ties to even. There
//! is no hidden global precision and no exponent underflow or overflow: a
//! value is exactly zero only when its mantissa is zero, so a nonzero result
//! can never silently collapse to zero.
//!
//! Values are kept normalized with an odd mantissa (trailing zero bits are
//! folded into the exponent), which makes equality and comparison exact.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// log10(2) as a rational approximation used for digit/bit conversions.
const LOG10_2_NUM: u64 = 30103;
const LOG10_2_DEN: u64 = 100000;

/// Working precision in bits for a target of `digits` decimal digits.
/// The fixed 64 guard bits absorb cancellation inside expression trees and
/// alternating sums.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as u64 * 333 / 100) as u32 + 1 + 64
}

/// Decimal digits reliably carried by `bits` of precision.
pub fn digits_for_bits(bits: u32) -> u32 {
    (bits as u64 * LOG10_2_NUM / LOG10_2_DEN) as u32
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFloat {
    sign: i8,
    mag: BigUint,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat { sign: 0, mag: BigUint::zero(), exp: 0, prec }
    }

    pub fn one(prec: u32) -> Self {
        BigFloat { sign: 1, mag: BigUint::one(), exp: 0, prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        let sign = match n.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        round_mag(sign, n.magnitude().clone(), 0, prec, 0)
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        if r.is_zero() {
            return Self::zero(prec);
        }
        let sign = if r.is_negative() { -1 } else { 1 };
        let p = r.numer().magnitude();
        let q = r.denom().magnitude();
        // Scale so the quotient carries prec + 3 bits, divide, then round with
        // the remainder folded in as a sticky bit.
        let shift = prec as i64 + 3 + q.bits() as i64 - p.bits() as i64;
        let (num, den) = if shift >= 0 {
            (p << shift as u64, q.clone())
        } else {
            (p.clone(), q << (-shift) as u64)
        };
        let (d, rem) = num.div_rem(&den);
        let sticky = BigUint::from(u8::from(!rem.is_zero()));
        let qq = (d << 1u8) | sticky;
        round_mag(sign, qq, -shift - 1, prec, 0)
    }

    /// Exact value as a rational (`mant * 2^exp` is always exact).
    pub fn to_rational(&self) -> Rational {
        if self.sign == 0 {
            return Rational::zero();
        }
        let m = BigInt::from_biguint(if self.sign < 0 { Sign::Minus } else { Sign::Plus }, self.mag.clone());
        if self.exp >= 0 {
            Rational::from_integer(m << self.exp as u64)
        } else {
            Rational::new(m, BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0
    }

    /// Position of the most significant bit: `2^(k-1) <= |x| < 2^k`.
    /// Meaningless for zero.
    pub fn top_bit(&self) -> i64 {
        self.exp + self.mag.bits() as i64
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        r.sign = -r.sign;
        r
    }

    pub fn abs(&self) -> Self {
        let mut r = self.clone();
        r.sign = r.sign.abs();
        r
    }

    /// Exact scaling by a power of two.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.sign == 0 {
            return self.clone();
        }
        let mut r = self.clone();
        r.exp += k;
        r
    }

    /// Re-round to a (usually lower) precision.
    pub fn round_to(&self, prec: u32) -> Self {
        round_mag(self.sign, self.mag.clone(), self.exp, prec, 0)
    }

    pub fn add(&self, other: &Self, prec: u32) -> Self {
        if self.sign == 0 {
            return other.round_to(prec);
        }
        if other.sign == 0 {
            return self.round_to(prec);
        }
        let (big, small) = if self.top_bit() >= other.top_bit() {
            (self, other)
        } else {
            (other, self)
        };
        // When the small operand lies entirely below both the rounding
        // position and the big operand's lowest bit, it can only affect the
        // result as a sticky bit; this keeps alignment shifts bounded.
        let gap_ok = small.top_bit() + prec as i64 + 16 <= big.top_bit();
        if gap_ok && small.top_bit() + 2 <= big.exp {
            return round_mag(big.sign, big.mag.clone(), big.exp, prec, small.sign * big.sign);
        }
        let e = self.exp.min(other.exp);
        let ma = signed(self) << (self.exp - e) as u64;
        let mb = signed(other) << (other.exp - e) as u64;
        let m = ma + mb;
        let sign = match m.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        round_mag(sign, m.magnitude().clone(), e, prec, 0)
    }

    pub fn sub(&self, other: &Self, prec: u32) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Self, prec: u32) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::zero(prec);
        }
        round_mag(self.sign * other.sign, &self.mag * &other.mag, self.exp + other.exp, prec, 0)
    }

    pub fn div(&self, other: &Self, prec: u32) -> Result<Self> {
        if other.sign == 0 {
            return Err(Error::DivisionByZero);
        }
        if self.sign == 0 {
            return Ok(Self::zero(prec));
        }
        let shift = prec as i64 + 3 + other.mag.bits() as i64 - self.mag.bits() as i64;
        let (num, den) = if shift >= 0 {
            (&self.mag << shift as u64, other.mag.clone())
        } else {
            (self.mag.clone(), &other.mag << (-shift) as u64)
        };
        let (d, rem) = num.div_rem(&den);
        let sticky = BigUint::from(u8::from(!rem.is_zero()));
        let qq = (d << 1u8) | sticky;
        Ok(round_mag(
            self.sign * other.sign,
            qq,
            self.exp - other.exp - shift - 1,
            prec,
            0,
        ))
    }

    /// Reciprocal at the given precision.
    pub fn recip(&self, prec: u32) -> Result<Self> {
        Self::one(prec).div(self, prec)
    }

    pub fn sqrt(&self, prec: u32) -> Result<Self> {
        if self.sign < 0 {
            return Err(Error::Domain("square root of a negative value".into()));
        }
        if self.sign == 0 {
            return Ok(Self::zero(prec));
        }
        // Scale the mantissa to at least 2*prec + 6 bits with an even
        // exponent so the integer square root carries enough precision.
        let mut shift = (2 * prec as i64 + 6 - self.mag.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let v = &self.mag << shift as u64;
        let r = v.sqrt();
        let rem = &v - &r * &r;
        let sticky = BigUint::from(u8::from(!rem.is_zero()));
        let qq = (r << 1u8) | sticky;
        Ok(round_mag(1, qq, (self.exp - shift) / 2 - 1, prec, 0))
    }

    /// Integer power by binary exponentiation, rounding at `prec + 8` per
    /// step and once more at the end.
    pub fn powi(&self, k: i64, prec: u32) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one(prec));
        }
        if self.sign == 0 {
            if k < 0 {
                return Err(Error::DivisionByZero);
            }
            return Ok(Self::zero(prec));
        }
        let wp = prec + 8 + 2 * (64 - (k.unsigned_abs().leading_zeros()));
        let mut acc = Self::one(wp);
        let mut base = self.round_to(wp);
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, wp);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, wp);
            }
        }
        if k < 0 {
            acc = acc.recip(wp)?;
        }
        Ok(acc.round_to(prec))
    }

    /// Exact comparison (the representation is exact, so this is total).
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if self.sign == 0 {
            return Ordering::Equal;
        }
        let mag_ord = if self.top_bit() != other.top_bit() {
            self.top_bit().cmp(&other.top_bit())
        } else {
            let e = self.exp.min(other.exp);
            let ma = &self.mag << (self.exp - e) as u64;
            let mb = &other.mag << (other.exp - e) as u64;
            ma.cmp(&mb)
        };
        if self.sign > 0 {
            mag_ord
        } else {
            mag_ord.reverse()
        }
    }

    /// Fixed-point decimal rendering with `frac_digits` places after the
    /// point, rounded half to even. Used for reports; parsing is never done
    /// from this form.
    pub fn to_decimal(&self, frac_digits: u32) -> String {
        let ten_f = BigUint::from(10u8).pow(frac_digits);
        let scaled: BigUint = if self.sign == 0 {
            BigUint::zero()
        } else if self.exp >= 0 {
            (&self.mag << self.exp as u64) * &ten_f
        } else {
            let t = &self.mag * &ten_f;
            let s = (-self.exp) as u64;
            let (q, r) = t.div_rem(&(BigUint::one() << s));
            let twice = &r << 1u8;
            let den = BigUint::one() << s;
            match twice.cmp(&den) {
                Ordering::Greater => q + 1u8,
                Ordering::Less => q,
                Ordering::Equal => {
                    if q.is_odd() {
                        q + 1u8
                    } else {
                        q
                    }
                }
            }
        };
        let neg = self.sign < 0 && !scaled.is_zero();
        let digits = scaled.to_str_radix(10);
        let (int_part, frac_part) = if digits.len() > frac_digits as usize {
            let split = digits.len() - frac_digits as usize;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", digits, width = frac_digits as usize))
        };
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&int_part);
        if frac_digits > 0 {
            out.push('.');
            out.push_str(&frac_part);
        }
        out
    }
}

fn signed(x: &BigFloat) -> BigInt {
    BigInt::from_biguint(if x.sign < 0 { Sign::Minus } else { Sign::Plus }, x.mag.clone())
}

/// Round `sign * mag * 2^exp` to `prec` bits, nearest, ties to even.
///
/// `sticky` records a nonzero contribution below every represented bit:
/// `+1` pushes the magnitude up, `-1` down (relative to the stored sign).
/// It only influences tie-breaking, which is exactly the information an
/// infinitesimally small addend carries.
fn round_mag(sign: i8, mut mag: BigUint, mut exp: i64, prec: u32, sticky: i8) -> BigFloat {
    assert!(prec >= 2, "precision must be at least 2 bits");
    if mag.is_zero() {
        return BigFloat::zero(prec);
    }
    let bits = mag.bits();
    if bits > prec as u64 {
        let drop = bits - prec as u64;
        let keep = &mag >> drop;
        let rem = mag - (&keep << drop);
        let half = BigUint::one() << (drop - 1);
        let round_up = match rem.cmp(&half) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match sticky {
                1 => true,
                -1 => false,
                _ => keep.bit(0),
            },
        };
        mag = if round_up { keep + 1u8 } else { keep };
        exp += drop as i64;
        if mag.bits() > prec as u64 {
            mag >>= 1u8;
            exp += 1;
        }
    }
    if let Some(tz) = mag.trailing_zeros() {
        if tz > 0 {
            mag >>= tz;
            exp += tz as i64;
        }
    }
    BigFloat { sign, mag, exp, prec }
}

/// Largest `d >= 0` with `|x - y| < 10^(-d) * max(1, |x|)`, computed exactly
/// on the dyadic values. Identical values return the precision-limited cap.
pub fn agree_digits(x: &BigFloat, y: &BigFloat) -> u32 {
    let cap = digits_for_bits(x.precision().min(y.precision()));
    let rx = x.to_rational();
    let ry = y.to_rational();
    let diff = (&rx - &ry).abs();
    if diff.is_zero() {
        return cap;
    }
    let scale = rx.abs().max(Rational::one());
    if diff >= scale {
        return 0;
    }
    let ten = Rational::from_integer(BigInt::from(10));
    let mut d = 0u32;
    let mut t = diff * &ten;
    while t < scale {
        d += 1;
        t *= &ten;
    }
    d
}

/// Agreement in bits: true when `|x - y| <= 2^(-bits) * max(1, |x|)`.
pub fn agree_to_bits(x: &BigFloat, y: &BigFloat, bits: u32) -> bool {
    let rx = x.to_rational();
    let diff = (&rx - y.to_rational()).abs();
    let scale = rx.abs().max(Rational::one());
    let tol = Rational::new(BigInt::one(), BigInt::one() << bits as u64);
    diff <= scale * tol
}

impl std::fmt::Display for BigFloat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_decimal(digits_for_bits(self.prec)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn bf(p: i64, q: i64, prec: u32) -> BigFloat {
        BigFloat::from_rational(&rat(p, q), prec)
    }

    #[test]
    fn construction_and_exactness() {
        let x = BigFloat::from_i64(12, 64);
        assert_eq!(x.to_rational(), rat_int(12));
        let h = bf(1, 2, 64);
        assert_eq!(h.to_rational(), rat(1, 2));
        assert!(BigFloat::zero(64).is_zero());
    }

    #[test]
    fn rounding_is_nearest_even() {
        // 0b1011 to 3 bits: 10 vs 12 are equidistant (rem == half), keep=101
        // is odd, so round up to 0b1100 = 12.
        let x = BigFloat::from_i64(11, 3);
        assert_eq!(x.to_rational(), rat_int(12));
        // 0b1001 to 3 bits: keep=100 even, tie rounds down to 8.
        let y = BigFloat::from_i64(9, 3);
        assert_eq!(y.to_rational(), rat_int(8));
        // 0b1011001 to 3 bits: rem above half rounds up: 1100000 = 96.
        let z = BigFloat::from_i64(89, 3);
        assert_eq!(z.to_rational(), rat_int(96));
    }

    #[test]
    fn one_third_round_trip_error_is_bounded() {
        let prec = 128u32;
        let x = bf(1, 3, prec);
        let err = (x.to_rational() - rat(1, 3)).abs();
        let ulp = Rational::new(num_bigint::BigInt::from(1), num_bigint::BigInt::from(1) << 128);
        assert!(err <= ulp, "conversion error exceeds one part in 2^128");
    }

    #[test]
    fn arithmetic_matches_exact_rationals() {
        let prec = 96u32;
        // dyadic inputs: +, -, * are exact when the result fits the precision
        let a = bf(13, 4, prec);
        let b = bf(-5, 8, prec);
        assert_eq!(a.add(&b, prec).to_rational(), rat(13, 4) + rat(-5, 8));
        assert_eq!(a.mul(&b, prec).to_rational(), rat(13, 4) * rat(-5, 8));
        // non-dyadic inputs round on construction; ops stay within 2^-(prec-2)
        let x = bf(22, 7, prec);
        let y = bf(-3, 11, prec);
        let q = x.div(&y, prec).unwrap().to_rational();
        let exact = x.to_rational() / y.to_rational();
        let tol = exact.abs() * Rational::new(num_bigint::BigInt::from(1), num_bigint::BigInt::from(1) << 94);
        assert!((q - exact).abs() <= tol);
    }

    #[test]
    fn distant_exponent_addition_uses_sticky_correctly() {
        let prec = 16u32;
        let big = BigFloat::from_i64(1 << 15, prec); // 32768, one bit of mantissa
        let tiny = bf(1, 1_000_000_007, prec);
        // nearest 16-bit float to 32768 +/- eps is 32768 itself
        assert_eq!(big.add(&tiny, prec).to_rational(), rat_int(32768));
        assert_eq!(big.sub(&tiny, prec).to_rational(), rat_int(32768));
        // 32769.5 is a tie between 32769 and 32770; ties-to-even gives 32770,
        // but a tiny addend below the rounding position must break the tie.
        let tied = bf(65539, 2, 17);
        assert_eq!(tied.round_to(prec).to_rational(), rat_int(32770));
        assert_eq!(tied.add(&tiny, prec).to_rational(), rat_int(32770));
        assert_eq!(tied.sub(&tiny, prec).to_rational(), rat_int(32769));
    }

    #[test]
    fn sqrt_of_two() {
        let prec = 200u32;
        let two = BigFloat::from_i64(2, prec);
        let r = two.sqrt(prec).unwrap();
        let sq = r.mul(&r, 2 * prec).to_rational();
        let err = (sq - rat_int(2)).abs();
        assert!(err < Rational::new(num_bigint::BigInt::from(1), num_bigint::BigInt::from(1) << 195));
        assert!(BigFloat::from_i64(-1, 64).sqrt(64).is_err());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let x = BigFloat::one(64);
        assert!(matches!(x.div(&BigFloat::zero(64), 64), Err(Error::DivisionByZero)));
    }

    #[test]
    fn decimal_rendering() {
        let prec = 128u32;
        assert_eq!(bf(1, 4, prec).to_decimal(3), "0.250");
        assert_eq!(bf(-1, 3, prec).to_decimal(6), "-0.333333");
        assert_eq!(bf(20106, 10000, prec).to_decimal(2), "2.01");
        assert_eq!(BigFloat::zero(prec).to_decimal(4), "0.0000");
        assert_eq!(BigFloat::from_i64(7, prec).to_decimal(0), "7");
    }

    #[test]
    fn agree_digits_basics() {
        let prec = 256u32;
        let x = BigFloat::one(prec);
        assert_eq!(agree_digits(&x, &x), digits_for_bits(prec));
        // |x - y| = 3e-10 with scale 1: largest d with 3e-10 < 10^-d is 9.
        let y = x.add(&BigFloat::from_rational(&rat(3, 10_000_000_000), prec), prec);
        assert_eq!(agree_digits(&x, &y), 9);
        // far apart
        assert_eq!(agree_digits(&x, &BigFloat::from_i64(5, prec)), 0);
    }

    #[test]
    fn agree_digits_absolute_fallback_near_zero() {
        // |x| <= 1 falls back to absolute error: 0 versus ~1e-30.
        let prec = 256u32;
        let zero = BigFloat::zero(prec);
        let tiny = BigFloat::from_rational(&rat(1, 10i64.pow(15)), prec)
            .mul(&BigFloat::from_rational(&rat(1, 10i64.pow(15)), prec), prec);
        let d = agree_digits(&zero, &tiny);
        assert!((29..=30).contains(&d), "expected about 30 digits, got {d}");
    }

    #[test]
    fn precision_monotonicity() {
        // Raising the working precision only perturbs the result at or below
        // the old rounding position.
        let lo = 64u32;
        let hi = 128u32;
        let a = rat(355, 113);
        let b = rat(-217, 990);
        let x_lo = BigFloat::from_rational(&a, lo).mul(&BigFloat::from_rational(&b, lo), lo);
        let x_hi = BigFloat::from_rational(&a, hi).mul(&BigFloat::from_rational(&b, hi), hi);
        assert!(agree_to_bits(&x_hi, &x_lo, lo - 2));
    }

    #[test]
    fn powi_matches_exact() {
        let prec = 128u32;
        let x = bf(3, 2, prec);
        assert_eq!(x.powi(5, prec).unwrap().to_rational(), rat(243, 32));
        let inv = x.powi(-2, prec).unwrap().to_rational();
        assert!((inv - rat(4, 9)).abs() < rat(1, i64::MAX));
        assert!(BigFloat::zero(prec).powi(-1, prec).is_err());
    }
}
