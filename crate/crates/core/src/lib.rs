//! Exact-rational and arbitrary-precision machinery for deriving and
//! verifying hypergeometric and Ramanujan-type series identities.
//!
//! The crate is organized as:
//! - [`rational`] / [`bigfloat`]: exact fractions and explicit-precision
//!   binary floats (round-to-nearest-even everywhere);
//! - [`constexpr`]: closed-form constant expressions (rationals, pi, ln 2,
//!   the Euler-Mascheroni constant, Gamma at positive rationals, square
//!   roots) with a canonical prefix text form;
//! - [`special`]: Pochhammer symbols, central binomials, harmonic-number
//!   families, and high-precision pi / ln 2 / gamma / digamma;
//! - [`series`]: generalized hypergeometric term generation, exact
//!   summation of terminating series, direct summation with tail bounds,
//!   and alternating-series acceleration;
//! - [`transform`]: the sequence transform `y_n = sum_k (-n)_k (n+a)_k x_k`,
//!   its inverse reconstruction, and the identity-derivation engine;
//! - [`catalog`]: the identity ledger, its JSON format, the verification
//!   driver, and the parametric-differentiation consistency checks.

pub mod bigfloat;
pub mod catalog;
pub mod constexpr;
pub mod error;
pub mod rational;
pub mod series;
pub mod special;
pub mod transform;

pub use bigfloat::{agree_digits, agree_to_bits, bits_for_digits, digits_for_bits, BigFloat};
pub use constexpr::{eval_const, ConstExpr};
pub use error::{Error, Result};
pub use rational::Rational;
