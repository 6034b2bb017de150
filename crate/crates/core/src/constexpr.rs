//! Closed-form constant expressions.
//!
//! A [`ConstExpr`] is a tree over exact rationals and the named constants
//! pi, ln 2, and the Euler-Mascheroni constant, with Gamma at positive
//! rationals, square roots, field operations, and integer powers. These are
//! the right-hand sides of the identities in the catalog. Expressions are
//! deliberately not simplified symbolically; they are only evaluated.
//!
//! The canonical text form is prefix notation, e.g. `(div 2 pi)` or
//! `(mul (gamma 1/8) (gamma 3/8))`, with rationals written `p/q`.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;

use crate::bigfloat::{bits_for_digits, BigFloat};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};
use crate::special::constants::{euler_gamma_bits, ln2_bits, pi_bits};
use crate::special::gamma::gamma_bits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstExpr {
    Rational(Rational),
    Pi,
    Ln2,
    EulerGamma,
    /// Gamma at a positive rational argument.
    GammaAt(Rational),
    Sqrt(Box<ConstExpr>),
    Add(Box<ConstExpr>, Box<ConstExpr>),
    Sub(Box<ConstExpr>, Box<ConstExpr>),
    Mul(Box<ConstExpr>, Box<ConstExpr>),
    Div(Box<ConstExpr>, Box<ConstExpr>),
    Pow(Box<ConstExpr>, i64),
}

#[allow(clippy::should_implement_trait)] // builder methods, not operator overloads
impl ConstExpr {
    pub fn rational(r: Rational) -> Self {
        ConstExpr::Rational(r)
    }

    pub fn integer(n: i64) -> Self {
        ConstExpr::Rational(crate::rational::rat_int(n))
    }

    /// Gamma node; the argument must be positive.
    pub fn gamma_at(q: Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::Domain(format!("gamma argument {q} is not positive")));
        }
        Ok(ConstExpr::GammaAt(q))
    }

    pub fn add(self, rhs: Self) -> Self {
        ConstExpr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: Self) -> Self {
        ConstExpr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: Self) -> Self {
        ConstExpr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn div(self, rhs: Self) -> Self {
        ConstExpr::Div(Box::new(self), Box::new(rhs))
    }

    pub fn pow(self, k: i64) -> Self {
        ConstExpr::Pow(Box::new(self), k)
    }

    pub fn sqrt(self) -> Self {
        ConstExpr::Sqrt(Box::new(self))
    }

    /// If the whole expression is an exact rational, return it.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ConstExpr::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Evaluate at a working precision in bits.
    pub fn eval_bits(&self, prec: u32) -> Result<BigFloat> {
        match self {
            ConstExpr::Rational(r) => Ok(BigFloat::from_rational(r, prec)),
            ConstExpr::Pi => Ok(pi_bits(prec)),
            ConstExpr::Ln2 => Ok(ln2_bits(prec)),
            ConstExpr::EulerGamma => Ok(euler_gamma_bits(prec)),
            ConstExpr::GammaAt(q) => {
                if !q.is_positive() {
                    return Err(Error::Domain(format!("gamma argument {q} is not positive")));
                }
                gamma_bits(q, prec)
            }
            ConstExpr::Sqrt(x) => x.eval_bits(prec)?.sqrt(prec),
            ConstExpr::Add(a, b) => Ok(a.eval_bits(prec)?.add(&b.eval_bits(prec)?, prec)),
            ConstExpr::Sub(a, b) => Ok(a.eval_bits(prec)?.sub(&b.eval_bits(prec)?, prec)),
            ConstExpr::Mul(a, b) => Ok(a.eval_bits(prec)?.mul(&b.eval_bits(prec)?, prec)),
            ConstExpr::Div(a, b) => {
                let den = b.eval_bits(prec)?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                a.eval_bits(prec)?.div(&den, prec)
            }
            ConstExpr::Pow(x, k) => x.eval_bits(prec)?.powi(*k, prec),
        }
    }
}

/// Evaluate a constant expression to roughly `digits` correct decimal
/// digits. The working precision is `ceil(digits * 3.33) + 64` bits, which
/// absorbs cancellation inside the tree; the result is deterministic for a
/// fixed `(expr, digits)`.
pub fn eval_const(expr: &ConstExpr, digits: u32) -> Result<BigFloat> {
    expr.eval_bits(bits_for_digits(digits))
}

impl fmt::Display for ConstExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstExpr::Rational(r) => write!(f, "{r}"),
            ConstExpr::Pi => write!(f, "pi"),
            ConstExpr::Ln2 => write!(f, "ln2"),
            ConstExpr::EulerGamma => write!(f, "eulergamma"),
            ConstExpr::GammaAt(q) => write!(f, "(gamma {q})"),
            ConstExpr::Sqrt(x) => write!(f, "(sqrt {x})"),
            ConstExpr::Add(a, b) => write!(f, "(add {a} {b})"),
            ConstExpr::Sub(a, b) => write!(f, "(sub {a} {b})"),
            ConstExpr::Mul(a, b) => write!(f, "(mul {a} {b})"),
            ConstExpr::Div(a, b) => write!(f, "(div {a} {b})"),
            ConstExpr::Pow(x, k) => write!(f, "(pow {x} {k})"),
        }
    }
}

/// Split a prefix expression into parenthesis and atom tokens.
pub(crate) fn tokenize(s: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    if tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [String],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let t = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        let t = self.next()?;
        if t != tok {
            return Err(Error::Parse(format!("expected `{tok}`, found `{t}`")));
        }
        Ok(())
    }

    fn parse_expr(&mut self) -> Result<ConstExpr> {
        let t = self.next()?;
        if t != "(" {
            return atom(t);
        }
        let op = self.next()?;
        let expr = match op {
            "add" | "sub" | "mul" | "div" => {
                let a = self.parse_expr()?;
                let b = self.parse_expr()?;
                match op {
                    "add" => a.add(b),
                    "sub" => a.sub(b),
                    "mul" => a.mul(b),
                    _ => a.div(b),
                }
            }
            "sqrt" => self.parse_expr()?.sqrt(),
            "gamma" => {
                let q = parse_rational(self.next()?)?;
                ConstExpr::gamma_at(q)?
            }
            "pow" => {
                let x = self.parse_expr()?;
                let k_tok = self.next()?;
                let k: i64 = k_tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad integer exponent `{k_tok}`")))?;
                x.pow(k)
            }
            other => return Err(Error::Parse(format!("unknown operator `{other}`"))),
        };
        self.expect(")")?;
        Ok(expr)
    }
}

fn atom(t: &str) -> Result<ConstExpr> {
    match t {
        "pi" => Ok(ConstExpr::Pi),
        "ln2" => Ok(ConstExpr::Ln2),
        "eulergamma" => Ok(ConstExpr::EulerGamma),
        _ => Ok(ConstExpr::Rational(parse_rational(t)?)),
    }
}

impl FromStr for ConstExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens: &tokens, pos: 0 };
        let expr = p.parse_expr()?;
        if p.pos != tokens.len() {
            return Err(Error::Parse(format!(
                "trailing tokens after expression: `{}`",
                tokens[p.pos..].join(" ")
            )));
        }
        Ok(expr)
    }
}
