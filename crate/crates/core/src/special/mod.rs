//! Exact combinatorial sequences and high-precision transcendental
//! building blocks.
//!
//! The exact side (Pochhammer symbols, central binomials, harmonic-number
//! families, Bernoulli numbers) lives here; the numeric side (pi, ln 2, the
//! Euler-Mascheroni constant, Gamma and digamma at positive rationals) is in
//! [`constants`] and [`gamma`], with shared `ln`/`exp` kernels in
//! [`elementary`].

pub mod constants;
pub mod elementary;
pub mod gamma;

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::rational::{rat, rat_int, Rational};

pub use constants::{constant, ConstantName};
pub use gamma::{digamma_rational, gamma_rational, ln_gamma_rational, pochhammer_ratio_gamma};

/// Rising factorial `(alpha)_n = alpha (alpha+1) ... (alpha+n-1)`, exact.
/// The empty product `(alpha)_0` is 1.
pub fn pochhammer(alpha: &Rational, n: usize) -> Rational {
    let mut acc = Rational::one();
    let mut f = alpha.clone();
    for _ in 0..n {
        acc *= &f;
        f += Rational::one();
    }
    acc
}

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Central binomial coefficient `C(2n, n)`, exact.
pub fn central_binomial(n: usize) -> BigInt {
    num_integer::binomial(BigInt::from(2 * n), BigInt::from(n))
}

/// The three harmonic families used as series weights:
/// `h` is `H_n = 1 + 1/2 + ... + 1/n`, `o` is the odd harmonic
/// `O_n = 1 + 1/3 + ... + 1/(2n-1)`, and `h_alt` is the alternating
/// harmonic `H'_n = 1 - 1/2 + ... + (-1)^(n+1)/n`. All start at 0 for n = 0,
/// and they are linked by `H_{2n} = O_n + H_n/2` and `H'_{2n} = O_n - H_n/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicTriple {
    pub h: Rational,
    pub o: Rational,
    pub h_alt: Rational,
}

/// Exact harmonic numbers at a single index.
pub fn harmonic_triple(n: usize) -> HarmonicTriple {
    let mut t = HarmonicTriple {
        h: Rational::zero(),
        o: Rational::zero(),
        h_alt: Rational::zero(),
    };
    for k in 1..=n {
        let inv = rat(1, k as i64);
        t.h += &inv;
        t.o += rat(1, 2 * k as i64 - 1);
        if k % 2 == 1 {
            t.h_alt += &inv;
        } else {
            t.h_alt -= &inv;
        }
    }
    t
}

static BERNOULLI: Lazy<Mutex<Vec<Rational>>> = Lazy::new(|| Mutex::new(vec![Rational::one()]));

/// Bernoulli number `B_n` (with `B_1 = -1/2`), exact, cached process-wide.
pub fn bernoulli(n: usize) -> Rational {
    let mut cache = BERNOULLI.lock().expect("bernoulli cache poisoned");
    while cache.len() <= n {
        let m = cache.len();
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, b) in cache.iter().enumerate() {
            acc += Rational::from_integer(binom.clone()) * b;
            binom = &binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let bm = -acc / rat_int(m as i64 + 1);
        cache.push(bm);
    }
    cache[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use num_traits::{Signed, ToPrimitive};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn pochhammer_small_cases() {
        assert_eq!(pochhammer(&rat(7, 3), 0), rat_int(1));
        assert_eq!(pochhammer(&rat(1, 2), 3), rat(15, 8));
        // termination mechanism: a factor hits zero
        assert_eq!(pochhammer(&rat_int(-2), 3), rat_int(0));
        assert_eq!(pochhammer(&rat_int(-2), 2), rat_int(2));
    }

    #[test]
    fn central_binomial_values() {
        assert_eq!(central_binomial(0), BigInt::one());
        assert_eq!(central_binomial(3), BigInt::from(20));
        // C(2n,n) * n!^2 = (2n)!
        for n in [1usize, 10, 57, 100] {
            let lhs = central_binomial(n) * factorial(n).pow(2);
            assert_eq!(lhs, factorial(2 * n));
        }
    }

    #[test]
    fn duplication_bridge_exact() {
        // C(2n,n)/4^n = (1/2)_n / n! for all n <= 200
        for n in 0..=200usize {
            let lhs = Rational::new(central_binomial(n), BigInt::from(4).pow(n as u32));
            let rhs = pochhammer(&rat(1, 2), n) / Rational::from_integer(factorial(n));
            assert_eq!(lhs, rhs, "bridge fails at n = {n}");
        }
    }

    #[test]
    fn harmonic_triples() {
        let t0 = harmonic_triple(0);
        assert!(t0.h.is_zero() && t0.o.is_zero() && t0.h_alt.is_zero());
        let t3 = harmonic_triple(3);
        assert_eq!(t3.h, rat(11, 6));
        assert_eq!(t3.o, rat(23, 15));
        assert_eq!(t3.h_alt, rat(5, 6));
        // O_4 = H_8 - H_4/2
        let t4 = harmonic_triple(4);
        let t8 = harmonic_triple(8);
        assert_eq!(t4.o, &t8.h - &t4.h / rat_int(2));
    }

    #[test]
    fn harmonic_relations_hold_up_to_60() {
        for n in 0..=60usize {
            let tn = harmonic_triple(n);
            let t2n = harmonic_triple(2 * n);
            let half_h = &tn.h / rat_int(2);
            assert_eq!(t2n.h, &tn.o + &half_h, "H_2n relation at {n}");
            assert_eq!(t2n.h_alt, &tn.o - &half_h, "H'_2n relation at {n}");
        }
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat_int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rat_int(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn pochhammer_addition_law_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..50 {
            let alpha = rat(rng.gen_range(-40..40), rng.gen_range(1..12));
            let m = rng.gen_range(0..50usize);
            let n = rng.gen_range(0..50usize);
            let split = pochhammer(&alpha, m) * pochhammer(&(&alpha + rat_int(m as i64)), n);
            assert_eq!(pochhammer(&alpha, m + n), split);
        }
    }

    proptest! {
        #[test]
        fn rational_field_property(p in -200i64..200, q in 1i64..50, r in -200i64..200, s in 1i64..50) {
            let x = rat(p, q);
            let y = rat(r, s);
            prop_assume!(!y.is_zero());
            prop_assert_eq!((&x / &y) * &y, x);
        }

        #[test]
        fn harmonic_is_monotone(n in 1usize..80) {
            let a = harmonic_triple(n - 1);
            let b = harmonic_triple(n);
            prop_assert!(b.h > a.h);
            prop_assert!(b.o > a.o);
            let diff = (&b.h_alt - &a.h_alt).abs().to_f64().unwrap();
            prop_assert!(diff > 0.0 && diff <= 1.0 / n as f64);
        }
    }
}
