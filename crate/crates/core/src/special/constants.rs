//! High-precision named constants: pi, ln 2, and the Euler-Mascheroni
//! constant.
//!
//! pi comes from the Machin formula `pi = 16 atan(1/5) - 4 atan(1/239)` and
//! ln 2 from `2 atanh(1/3)`, both summed by binary splitting over exact
//! rationals with the alternating/geometric tail as the truncation bound.
//! The Euler-Mascheroni constant uses Euler-Maclaurin on `H_N - ln N` with
//! the first omitted Bernoulli term bounding the remainder. Results are
//! cached per (constant, precision).

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use super::{bernoulli, harmonic_triple};
use crate::bigfloat::{bits_for_digits, digits_for_bits, BigFloat};
use crate::rational::{rat, rat_int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantName {
    Pi,
    Ln2,
    EulerGamma,
}

static CACHE: Lazy<Mutex<HashMap<(ConstantName, u32), BigFloat>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Named constant with absolute error below `10^-digits`.
pub fn constant(name: ConstantName, digits: u32) -> BigFloat {
    let prec = bits_for_digits(digits);
    match name {
        ConstantName::Pi => pi_bits(prec),
        ConstantName::Ln2 => ln2_bits(prec),
        ConstantName::EulerGamma => euler_gamma_bits(prec),
    }
}

fn cached(name: ConstantName, prec: u32, compute: impl FnOnce() -> BigFloat) -> BigFloat {
    if let Some(v) = CACHE.lock().expect("constant cache poisoned").get(&(name, prec)) {
        return v.clone();
    }
    let v = compute();
    CACHE
        .lock()
        .expect("constant cache poisoned")
        .insert((name, prec), v.clone());
    v
}

/// Sum of `n_terms` terms `t_0, t_0*r(1), t_0*r(1)*r(2), ...` by
/// divide-and-conquer over exact rationals.
pub(crate) fn ratio_series_sum<F>(t0: &Rational, n_terms: u64, ratio: &F) -> Rational
where
    F: Fn(u64) -> Rational,
{
    if n_terms == 0 {
        return Rational::zero();
    }
    // over [a, b): returns (sum of t_k/t_a, product of ratios a+1..=b)
    fn rec<F: Fn(u64) -> Rational>(a: u64, b: u64, ratio: &F) -> (Rational, Rational) {
        if b - a == 1 {
            (Rational::one(), ratio(b))
        } else {
            let m = a + (b - a) / 2;
            let (t1, p1) = rec(a, m, ratio);
            let (t2, p2) = rec(m, b, ratio);
            (t1 + &p1 * t2, p1 * p2)
        }
    }
    let (t, _) = rec(0, n_terms, ratio);
    t0 * t
}

/// `atan(1/m)` as an exact rational with truncation error below
/// `2^-(prec+16)`.
fn atan_inv(m: u64, prec: u32) -> Rational {
    let mm = rat_int((m * m) as i64);
    // |t_N| = 1/((2N+1) m^(2N+1)) decreasing and alternating
    let need = (prec as f64 + 16.0) * std::f64::consts::LN_2;
    let n_terms = (need / (2.0 * (m as f64).ln())).ceil() as u64 + 1;
    let t0 = rat(1, m as i64);
    ratio_series_sum(&t0, n_terms, &|k| {
        rat(-(2 * k as i64 - 1), 2 * k as i64 + 1) / &mm
    })
}

/// pi at `prec` bits via Machin's two-term arctangent formula.
pub fn pi_bits(prec: u32) -> BigFloat {
    cached(ConstantName::Pi, prec, || {
        let a5 = atan_inv(5, prec + 8);
        let a239 = atan_inv(239, prec + 8);
        let pi = a5 * rat_int(16) - a239 * rat_int(4);
        BigFloat::from_rational(&pi, prec)
    })
}

/// ln 2 at `prec` bits via `2 atanh(1/3)`.
pub fn ln2_bits(prec: u32) -> BigFloat {
    cached(ConstantName::Ln2, prec, || {
        // t_k = 1/((2k+1) 9^k 3); ratio (2k-1)/(9(2k+1)); geometric tail < t_N/8
        let need = (prec as f64 + 16.0) * std::f64::consts::LN_2;
        let n_terms = (need / 9f64.ln()).ceil() as u64 + 2;
        let t0 = rat(1, 3);
        let s = ratio_series_sum(&t0, n_terms, &|k| {
            rat(2 * k as i64 - 1, 9 * (2 * k as i64 + 1))
        });
        BigFloat::from_rational(&(s * rat_int(2)), prec)
    })
}

/// Euler-Mascheroni constant at `prec` bits.
pub fn euler_gamma_bits(prec: u32) -> BigFloat {
    cached(ConstantName::EulerGamma, prec, || {
        let d = digits_for_bits(prec) as u64 + 8;
        let mut n: u64 = (d * 55 / 100 + 12).max(20);
        let threshold = Rational::new(BigInt::one(), BigInt::one() << (prec as u64 + 16));
        loop {
            // H_N = ln N + g + 1/(2N) - sum_{k>=1} B_2k/(2k N^2k), remainder
            // bounded by the first omitted term; restart with larger N if the
            // asymptotic terms start growing before reaching the threshold.
            let n_sq = rat_int((n * n) as i64);
            let mut correction = Rational::zero();
            let mut pow = Rational::one(); // N^{-2k} accumulator
            let mut prev_abs: Option<Rational> = None;
            let mut ok = false;
            for k in 1..400usize {
                pow /= &n_sq;
                let term = bernoulli(2 * k) / rat_int(2 * k as i64) * &pow;
                let abs = term.abs();
                if abs < threshold {
                    ok = true;
                    break;
                }
                if let Some(p) = &prev_abs {
                    if abs > *p {
                        break;
                    }
                }
                prev_abs = Some(abs);
                correction += term;
            }
            if !ok {
                n *= 2;
                continue;
            }
            let h_n = harmonic_triple(n as usize).h;
            let exact_part = h_n - rat(1, 2 * n as i64) + correction;
            let wp = prec + 16;
            let ln_n = super::elementary::ln(&BigFloat::from_i64(n as i64, wp), wp)
                .expect("ln of a positive integer");
            return BigFloat::from_rational(&exact_part, wp).sub(&ln_n, wp).round_to(prec);
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::agree_digits;

    // Independent test oracle for pi: Stoermer's three-term formula
    // pi = 24 atan(1/8) + 8 atan(1/57) + 4 atan(1/239), summed directly.
    fn pi_oracle(digits: u32) -> Rational {
        let prec = bits_for_digits(digits);
        atan_inv(8, prec) * rat_int(24) + atan_inv(57, prec) * rat_int(8) + atan_inv(239, prec) * rat_int(4)
    }

    // Independent test oracle for ln 2: sum 1/(n 2^n), tail < 2^(1-N).
    fn ln2_oracle(digits: u32) -> Rational {
        let n_terms = (digits as u64 * 10 / 3) + 24;
        let mut s = Rational::zero();
        let mut pow = Rational::one();
        let half = rat(1, 2);
        for n in 1..=n_terms {
            pow *= &half;
            s += &pow / rat_int(n as i64);
        }
        s
    }

    #[test]
    fn pi_matches_independent_oracle() {
        for digits in [10u32, 30, 80] {
            let got = constant(ConstantName::Pi, digits);
            let want = BigFloat::from_rational(&pi_oracle(digits + 5), bits_for_digits(digits + 5));
            assert!(
                agree_digits(&got, &want) >= digits,
                "pi disagrees with oracle at {digits} digits"
            );
        }
        assert_eq!(constant(ConstantName::Pi, 10).to_decimal(10), "3.1415926536");
    }

    #[test]
    fn ln2_matches_independent_oracle() {
        for digits in [10u32, 30, 80] {
            let got = constant(ConstantName::Ln2, digits);
            let want = BigFloat::from_rational(&ln2_oracle(digits + 5), bits_for_digits(digits + 5));
            assert!(
                agree_digits(&got, &want) >= digits,
                "ln2 disagrees with oracle at {digits} digits"
            );
        }
        assert_eq!(constant(ConstantName::Ln2, 10).to_decimal(10), "0.6931471806");
    }

    #[test]
    fn euler_gamma_reference_digits() {
        // reference value of the Euler-Mascheroni constant
        let g = constant(ConstantName::EulerGamma, 10);
        assert_eq!(g.to_decimal(10), "0.5772156649");
        let g40 = constant(ConstantName::EulerGamma, 40);
        assert_eq!(
            g40.to_decimal(40),
            "0.5772156649015328606065120900824024310422"
        );
    }

    #[test]
    fn constants_stable_across_precisions() {
        let lo = constant(ConstantName::EulerGamma, 15);
        let hi = constant(ConstantName::EulerGamma, 60);
        assert!(agree_digits(&lo, &hi) >= 15);
    }
}
