//! The sequence transform `y_n = sum_{k=0}^n (-n)_k (n+a)_k x_k`, its
//! inverse reconstruction, and the identity-derivation engine.
//!
//! The reconstruction follows the composed inversion formula literally:
//! feeding a sequence through the forward transform and recombining with
//! the bracket weights `(a)_k (-n)_k (a+2k) / (k! (1+a+n)_k a)` divided by
//! `n! (a+1)_n` reproduces the sequence exactly. (`(1+a/2)_k/(a/2)_k` is
//! simplified to `(a+2k)/a` before evaluation, which removes a spurious
//! pole chain.) Everything is exact rational arithmetic.
//!
//! [`derive_identity`] turns each supported input family `x_l` into the
//! corresponding terminating-or-numeric hypergeometric identity record.

use std::io::{BufRead, Write};
use std::path::Path;

use num_traits::{One, Signed, Zero};

use crate::catalog::{Bindings, IdentityRecord, LhsTemplate, RhsTemplate, SeriesTemplate, VerifyMode};
use crate::error::{Error, Result};
use crate::rational::{is_nonpositive_integer, parse_rational, rat, rat_int, to_wire, Rational};
use crate::series::Weight;
use crate::special::pochhammer;

/// Transform parameter: `a` must avoid `{0, -1, -2, ...}` (the bracket
/// factor `(a+2k)/a` additionally needs `a` nonzero, which that set
/// already covers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformParams {
    a: Rational,
    length: usize,
}

impl TransformParams {
    pub fn new(a: Rational, length: usize) -> Result<Self> {
        if is_nonpositive_integer(&a) {
            return Err(Error::Domain(format!(
                "transform parameter a = {a} is a nonpositive integer"
            )));
        }
        Ok(TransformParams { a, length })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn length(&self) -> usize {
        self.length
    }
}

/// Forward transform: `y_n = sum_{k=0}^n (-n)_k (n+a)_k x_k` for
/// `n = 0..=length`. Termination is automatic through `(-n)_k`.
pub fn forward_l(params: &TransformParams, x: &[Rational]) -> Result<Vec<Rational>> {
    if x.len() < params.length + 1 {
        return Err(Error::Domain(format!(
            "input sequence has {} entries, need at least {}",
            x.len(),
            params.length + 1
        )));
    }
    let mut out = Vec::with_capacity(params.length + 1);
    for n in 0..=params.length {
        let nn = rat_int(n as i64);
        let mut coeff = Rational::one(); // (-n)_k (n+a)_k at k = 0
        let mut acc = Rational::zero();
        for (k, xk) in x.iter().enumerate().take(n + 1) {
            acc += &coeff * xk;
            let kk = rat_int(k as i64);
            coeff *= (-&nn + &kk) * (&nn + &params.a + &kk);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Composed reconstruction: applies the forward transform to `x` and
/// recombines with the bracket weights; the output equals `x` entry for
/// entry. Exposed as the round-trip verifier of the inversion formula.
pub fn inverse_reconstruct(params: &TransformParams, x: &[Rational]) -> Result<Vec<Rational>> {
    let transformed = forward_l(params, x)?;
    let a = &params.a;
    let mut out = Vec::with_capacity(params.length + 1);
    for n in 0..=params.length {
        let nn = rat_int(n as i64);
        // bracket_k = (a)_k (-n)_k / (k! (1+a+n)_k) * (a+2k)/a
        let mut core = Rational::one();
        let mut acc = Rational::zero();
        for (k, yk) in transformed.iter().enumerate().take(n + 1) {
            let kk = rat_int(k as i64);
            let linear = (a + rat_int(2 * k as i64)) / a;
            acc += &core * linear * yk;
            core = core * (a + &kk) * (-&nn + &kk)
                / ((Rational::one() + &kk) * (Rational::one() + a + &nn + &kk));
        }
        let norm = Rational::from_integer(crate::special::factorial(n))
            * pochhammer(&(a + Rational::one()), n);
        out.push(acc / norm);
    }
    Ok(out)
}

/// Input sequence families for the derivation engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceFamily {
    /// `x_l = 1/(l!)^2`
    InvSquareFactorial,
    /// `x_l = 1/(l!(l+1)!)`
    ShiftedFactorial,
    /// `x_l = 1/(l! Gamma(l+3/2))`: rational part `2/(l!(3/2)_l)` times the
    /// common unit `1/sqrt(pi)`
    HalfShift,
    /// `x_l = 1/((1)_l (b)_l)`
    PochhammerPair(Rational),
    /// `x_l = y^l/((1)_l)^2`; identity derivation not implemented
    /// (orthogonal-polynomial territory)
    GeometricPochhammer(Rational),
    Explicit(Vec<Rational>),
}

impl SequenceFamily {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SequenceFamily::InvSquareFactorial => "inv-square-factorial",
            SequenceFamily::ShiftedFactorial => "shifted-factorial",
            SequenceFamily::HalfShift => "half-shift",
            SequenceFamily::PochhammerPair(_) => "pochhammer-pair",
            SequenceFamily::GeometricPochhammer(_) => "geometric-pochhammer",
            SequenceFamily::Explicit(_) => "explicit",
        }
    }

    /// Exact rational values `x_0..x_len`; for the half-shift family these
    /// carry the common `1/sqrt(pi)` unit tracked separately via
    /// [`SequenceFamily::unit_divisor_sqrt_pi`].
    pub fn values(&self, len: usize) -> Result<Vec<Rational>> {
        let mut out = Vec::with_capacity(len + 1);
        match self {
            SequenceFamily::InvSquareFactorial => {
                for l in 0..=len {
                    let f = Rational::from_integer(crate::special::factorial(l));
                    out.push((&f * &f).recip());
                }
            }
            SequenceFamily::ShiftedFactorial => {
                for l in 0..=len {
                    let f = Rational::from_integer(crate::special::factorial(l));
                    let g = Rational::from_integer(crate::special::factorial(l + 1));
                    out.push((f * g).recip());
                }
            }
            SequenceFamily::HalfShift => {
                // Gamma(l+3/2) = (3/2)_l sqrt(pi)/2
                for l in 0..=len {
                    let f = Rational::from_integer(crate::special::factorial(l));
                    let p = pochhammer(&rat(3, 2), l);
                    out.push(rat_int(2) / (f * p));
                }
            }
            SequenceFamily::PochhammerPair(b) => {
                if is_nonpositive_integer(b) {
                    return Err(Error::Domain(format!(
                        "pochhammer-pair parameter b = {b} sits on a pole"
                    )));
                }
                for l in 0..=len {
                    let p1 = pochhammer(&Rational::one(), l);
                    let pb = pochhammer(b, l);
                    if pb.is_zero() {
                        return Err(Error::Domain(format!(
                            "pochhammer-pair factor (b)_{l} vanishes for b = {b}"
                        )));
                    }
                    out.push((p1 * pb).recip());
                }
            }
            SequenceFamily::GeometricPochhammer(y) => {
                for l in 0..=len {
                    let p1 = pochhammer(&Rational::one(), l);
                    out.push(crate::rational::pow_i64(y, l as i64)? / (&p1 * &p1));
                }
            }
            SequenceFamily::Explicit(v) => {
                if v.len() < len + 1 {
                    return Err(Error::Domain(format!(
                        "explicit sequence has {} entries, need {}",
                        v.len(),
                        len + 1
                    )));
                }
                out.extend_from_slice(&v[..=len]);
            }
        }
        Ok(out)
    }

    /// True when the family values carry a common `1/sqrt(pi)` factor on
    /// top of the rationals returned by [`SequenceFamily::values`].
    pub fn unit_divisor_sqrt_pi(&self) -> bool {
        matches!(self, SequenceFamily::HalfShift)
    }
}

impl std::str::FromStr for SequenceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inv-square-factorial" => Ok(SequenceFamily::InvSquareFactorial),
            "shifted-factorial" => Ok(SequenceFamily::ShiftedFactorial),
            "half-shift" => Ok(SequenceFamily::HalfShift),
            other => Err(Error::Parse(format!(
                "unknown family `{other}` (pochhammer-pair and geometric-pochhammer take a parameter and are built programmatically)"
            ))),
        }
    }
}

/// Derive the hypergeometric identity produced by running a sequence
/// family through the inversion formula.
///
/// With `params = Some((a, n))` the record is pinned to that instance (its
/// single sweep) and the mode is exact when `n` is a nonnegative integer;
/// with `params = None` the record is the symbolic family with free `a`
/// and `n`. The explicit and geometric-pochhammer families have no
/// closed-form identity here.
pub fn derive_identity(
    family: &SequenceFamily,
    params: Option<(Rational, Rational)>,
) -> Result<IdentityRecord> {
    struct Parts {
        id: &'static str,
        anchor: &'static str,
        upper: [&'static str; 4],
        lower: [&'static str; 3],
        rhs: &'static str,
        exact_at_integer_n: bool,
    }
    let parts = match family {
        SequenceFamily::InvSquareFactorial => Parts {
            id: "mishev-4f3",
            anchor: "terminating 4F3(-1) family produced by the inverse transform with x_l = 1/(l!)^2 and the Gauss 2F1(1) inner sum",
            upper: ["a", "a", "-n", "1+a/2"],
            lower: ["1", "a/2", "n+a+1"],
            rhs: "(div (poch (add a 1) n) (fact n))",
            exact_at_integer_n: true,
        },
        SequenceFamily::ShiftedFactorial => Parts {
            id: "example-shifted",
            anchor: "4F3(-1) family from x_l = 1/(l!(l+1)!)",
            upper: ["a", "a-1", "-n", "1+a/2"],
            lower: ["2", "a/2", "n+a+1"],
            rhs: "(div (poch (add a 1) n) (fact (add n 1)))",
            exact_at_integer_n: true,
        },
        SequenceFamily::HalfShift => Parts {
            id: "example-halfshift",
            anchor: "4F3(-1) family from x_l = 1/(l! (l+1/2)!), half-integer factorials read as Gamma(x+1)",
            upper: ["a", "-n", "a/2+1", "a-1/2"],
            lower: ["3/2", "a/2", "a+n+1"],
            rhs: "(div (mul (poch (add a 1) n) (sqrt pi)) (mul 2 (fact (add n 1/2))))",
            exact_at_integer_n: false,
        },
        SequenceFamily::PochhammerPair(_) => Parts {
            id: "threereal",
            anchor: "three-real-parameter 4F3(-1) evaluation from x_l = 1/((1)_l (b)_l)",
            upper: ["a", "-n", "a/2+1", "a-b+1"],
            lower: ["b", "a/2", "1+a+n"],
            rhs: "(div (poch (add a 1) n) (poch b n))",
            exact_at_integer_n: true,
        },
        SequenceFamily::GeometricPochhammer(_) | SequenceFamily::Explicit(_) => {
            return Err(Error::UnsupportedFamily(family.kind_name().to_string()));
        }
    };

    let template =
        SeriesTemplate::parse(&parts.upper, &parts.lower, "-1", Weight::None, None)?;
    let rhs: RhsTemplate = parts.rhs.parse()?;

    let mut schema = vec!["a".to_string(), "n".to_string()];
    if matches!(family, SequenceFamily::PochhammerPair(_)) {
        schema.insert(1, "b".to_string());
    }

    let (mode, sweeps) = match &params {
        None => {
            let default_mode = if parts.exact_at_integer_n {
                VerifyMode::ExactTerminating
            } else {
                VerifyMode::Numeric
            };
            (default_mode, Vec::new())
        }
        Some((a, n)) => {
            let mut binding = Bindings::new();
            binding.insert("a".to_string(), a.clone());
            binding.insert("n".to_string(), n.clone());
            if let SequenceFamily::PochhammerPair(b) = family {
                binding.insert("b".to_string(), b.clone());
            }
            let exact = parts.exact_at_integer_n && n.is_integer() && !n.is_negative();
            let mode = if exact { VerifyMode::ExactTerminating } else { VerifyMode::Numeric };
            (mode, vec![binding])
        }
    };

    Ok(IdentityRecord {
        id: parts.id.to_string(),
        anchor: parts.anchor.to_string(),
        mode,
        params: schema,
        lhs: LhsTemplate::Template(Box::new(template)),
        rhs,
        sweeps,
    })
}

/// Read a sequence file: one rational per line, `#` starts a comment,
/// blank lines ignored.
pub fn read_sequence_file(path: &Path) -> Result<Vec<Rational>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        out.push(parse_rational(body).map_err(|e| {
            Error::Parse(format!("{}:{}: {e}", path.display(), lineno + 1))
        })?);
    }
    Ok(out)
}

/// Write a sequence file in the wire form `p/q`, one value per line.
pub fn write_sequence_file(path: &Path, seq: &[Rational]) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    for r in seq {
        writeln!(file, "{}", to_wire(r))?;
    }
    Ok(())
}
