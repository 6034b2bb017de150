//! Right-hand-side expression templates.
//!
//! A superset of the [`ConstExpr`](crate::constexpr::ConstExpr) prefix
//! grammar with parameter atoms and two combinatorial forms that lower away
//! after substitution:
//!
//! - `(poch x s)`: the Pochhammer symbol. Integer `s` folds to an exact
//!   rational; non-integer `s` lowers to the Gamma quotient
//!   `Gamma(x+s)/Gamma(x)`, with negative non-integer Gamma arguments
//!   shifted positive through the recurrence.
//! - `(fact x)`: `x!`, read as `Gamma(x+1)`; exact for nonnegative
//!   integers.
//!
//! Rational subtrees fold exactly during lowering, so an exact-mode
//! right-hand side lowers all the way to a single rational.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::constexpr::{tokenize, ConstExpr};
use crate::error::{Error, Result};
use crate::rational::{is_nonpositive_integer, parse_rational, rat_int, Rational};
use crate::special::pochhammer;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RhsTemplate {
    Lit(Rational),
    Var(String),
    Pi,
    Ln2,
    EulerGamma,
    Sqrt(Box<RhsTemplate>),
    Gamma(Box<RhsTemplate>),
    Poch(Box<RhsTemplate>, Box<RhsTemplate>),
    Fact(Box<RhsTemplate>),
    Add(Box<RhsTemplate>, Box<RhsTemplate>),
    Sub(Box<RhsTemplate>, Box<RhsTemplate>),
    Mul(Box<RhsTemplate>, Box<RhsTemplate>),
    Div(Box<RhsTemplate>, Box<RhsTemplate>),
    Pow(Box<RhsTemplate>, Box<RhsTemplate>),
}

/// Lowered value: either an exact rational or a constant expression.
enum Lowered {
    Rat(Rational),
    Expr(ConstExpr),
}

impl Lowered {
    fn into_expr(self) -> ConstExpr {
        match self {
            Lowered::Rat(r) => ConstExpr::Rational(r),
            Lowered::Expr(e) => e,
        }
    }
}

/// `Gamma(q)` for any rational `q` off the poles, normalized so the
/// embedded `GammaAt` argument is positive: for negative non-integer `q`,
/// `Gamma(q) = Gamma(q+m) / (q (q+1) ... (q+m-1))`.
fn gamma_lowered(q: &Rational) -> Result<Lowered> {
    if is_nonpositive_integer(q) {
        return Err(Error::Domain(format!("Gamma pole at {q}")));
    }
    if q.is_positive() {
        return Ok(Lowered::Expr(ConstExpr::gamma_at(q.clone())?));
    }
    // q in (floor(q), floor(q)+1) with floor(q) < 0: shifting by -floor(q)
    // lands in (0, 1)
    use num_traits::ToPrimitive;
    let m = (-q.floor().to_integer())
        .to_usize()
        .ok_or_else(|| Error::Domain(format!("Gamma argument {q} too far below zero")))?;
    let divisor = pochhammer(q, m);
    Ok(Lowered::Expr(
        ConstExpr::gamma_at(q + rat_int(m as i64))?.div(ConstExpr::Rational(divisor)),
    ))
}

/// `(alpha)_s` with non-integer `s`, as `Gamma(alpha+s)/Gamma(alpha)`.
/// When `alpha` sits on a pole and `alpha+s` does not, the reciprocal
/// Gamma kills the whole symbol, giving exact 0.
fn poch_lowered(alpha: &Rational, s: &Rational) -> Result<Lowered> {
    if s.is_integer() {
        if let Some(n) = crate::rational::as_small_nonneg_integer(s, 1_000_000) {
            return Ok(Lowered::Rat(pochhammer(alpha, n)));
        }
        // negative integer index: (alpha)_(-m) = 1/((alpha-m)_m)
        let m = crate::rational::as_small_nonneg_integer(&-s.clone(), 1_000_000)
            .ok_or_else(|| Error::Domain(format!("Pochhammer index {s} out of range")))?;
        let den = pochhammer(&(alpha - rat_int(m as i64)), m);
        if den.is_zero() {
            return Err(Error::Domain(format!("({alpha})_({s}) hits a vanishing factor")));
        }
        return Ok(Lowered::Rat(den.recip()));
    }
    let top = alpha + s;
    match (is_nonpositive_integer(alpha), is_nonpositive_integer(&top)) {
        (true, false) => Ok(Lowered::Rat(Rational::zero())),
        (false, true) => Err(Error::Domain(format!(
            "({alpha})_({s}) is infinite: Gamma({top}) sits on a pole"
        ))),
        (true, true) => Err(Error::Domain(format!(
            "({alpha})_({s}) is an indeterminate Gamma-pole ratio"
        ))),
        (false, false) => {
            let num = gamma_lowered(&top)?.into_expr();
            let den = gamma_lowered(alpha)?.into_expr();
            Ok(Lowered::Expr(num.div(den)))
        }
    }
}

impl RhsTemplate {
    fn lower(&self, bindings: &BTreeMap<String, Rational>) -> Result<Lowered> {
        match self {
            RhsTemplate::Lit(r) => Ok(Lowered::Rat(r.clone())),
            RhsTemplate::Var(v) => bindings
                .get(v)
                .cloned()
                .map(Lowered::Rat)
                .ok_or_else(|| Error::MissingParam(v.clone())),
            RhsTemplate::Pi => Ok(Lowered::Expr(ConstExpr::Pi)),
            RhsTemplate::Ln2 => Ok(Lowered::Expr(ConstExpr::Ln2)),
            RhsTemplate::EulerGamma => Ok(Lowered::Expr(ConstExpr::EulerGamma)),
            RhsTemplate::Sqrt(x) => Ok(Lowered::Expr(x.lower(bindings)?.into_expr().sqrt())),
            RhsTemplate::Gamma(x) => match x.lower(bindings)? {
                Lowered::Rat(q) => gamma_lowered(&q),
                Lowered::Expr(_) => {
                    Err(Error::Domain("Gamma argument must lower to a rational".into()))
                }
            },
            RhsTemplate::Fact(x) => match x.lower(bindings)? {
                Lowered::Rat(q) => {
                    if let Some(n) = crate::rational::as_small_nonneg_integer(&q, 1_000_000) {
                        return Ok(Lowered::Rat(Rational::from_integer(
                            crate::special::factorial(n),
                        )));
                    }
                    gamma_lowered(&(q + Rational::one()))
                }
                Lowered::Expr(_) => {
                    Err(Error::Domain("factorial argument must lower to a rational".into()))
                }
            },
            RhsTemplate::Poch(x, s) => match (x.lower(bindings)?, s.lower(bindings)?) {
                (Lowered::Rat(alpha), Lowered::Rat(idx)) => poch_lowered(&alpha, &idx),
                _ => Err(Error::Domain(
                    "Pochhammer arguments must lower to rationals".into(),
                )),
            },
            RhsTemplate::Add(a, b) => match (a.lower(bindings)?, b.lower(bindings)?) {
                (Lowered::Rat(x), Lowered::Rat(y)) => Ok(Lowered::Rat(x + y)),
                (x, y) => Ok(Lowered::Expr(x.into_expr().add(y.into_expr()))),
            },
            RhsTemplate::Sub(a, b) => match (a.lower(bindings)?, b.lower(bindings)?) {
                (Lowered::Rat(x), Lowered::Rat(y)) => Ok(Lowered::Rat(x - y)),
                (x, y) => Ok(Lowered::Expr(x.into_expr().sub(y.into_expr()))),
            },
            RhsTemplate::Mul(a, b) => match (a.lower(bindings)?, b.lower(bindings)?) {
                (Lowered::Rat(x), Lowered::Rat(y)) => Ok(Lowered::Rat(x * y)),
                (x, y) => Ok(Lowered::Expr(x.into_expr().mul(y.into_expr()))),
            },
            RhsTemplate::Div(a, b) => match (a.lower(bindings)?, b.lower(bindings)?) {
                (Lowered::Rat(x), Lowered::Rat(y)) => {
                    if y.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    Ok(Lowered::Rat(x / y))
                }
                (x, y) => Ok(Lowered::Expr(x.into_expr().div(y.into_expr()))),
            },
            RhsTemplate::Pow(x, k) => {
                let kk = match k.lower(bindings)? {
                    Lowered::Rat(r) => crate::rational::as_i64(&r).ok_or_else(|| {
                        Error::Domain(format!("power exponent {r} is not an integer"))
                    })?,
                    Lowered::Expr(_) => {
                        return Err(Error::Domain("power exponent must lower to an integer".into()))
                    }
                };
                match x.lower(bindings)? {
                    Lowered::Rat(r) => Ok(Lowered::Rat(crate::rational::pow_i64(&r, kk)?)),
                    Lowered::Expr(e) => Ok(Lowered::Expr(e.pow(kk))),
                }
            }
        }
    }

    /// Lower to a constant expression with all parameters substituted.
    pub fn to_const_expr(&self, bindings: &BTreeMap<String, Rational>) -> Result<ConstExpr> {
        Ok(self.lower(bindings)?.into_expr())
    }

    /// Lower to an exact rational; errors if any transcendental node
    /// survives (used by exact-terminating verification).
    pub fn exact_rational(&self, bindings: &BTreeMap<String, Rational>) -> Result<Rational> {
        match self.lower(bindings)? {
            Lowered::Rat(r) => Ok(r),
            Lowered::Expr(e) => Err(Error::Domain(format!(
                "right-hand side is not exact-rational after substitution: {e}"
            ))),
        }
    }

    /// Parameter names used by the template.
    pub fn vars(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            RhsTemplate::Lit(_) | RhsTemplate::Pi | RhsTemplate::Ln2 | RhsTemplate::EulerGamma => {}
            RhsTemplate::Var(v) => {
                out.insert(v.clone());
            }
            RhsTemplate::Sqrt(x) | RhsTemplate::Gamma(x) | RhsTemplate::Fact(x) => x.vars(out),
            RhsTemplate::Poch(a, b)
            | RhsTemplate::Add(a, b)
            | RhsTemplate::Sub(a, b)
            | RhsTemplate::Mul(a, b)
            | RhsTemplate::Div(a, b)
            | RhsTemplate::Pow(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

struct Parser {
    tokens: Vec<String>,
    pos: usize,
}

impl Parser {
    fn next(&mut self) -> Result<&str> {
        let t = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn parse(&mut self) -> Result<RhsTemplate> {
        let t = self.next()?.to_string();
        if t != "(" {
            return atom(&t);
        }
        let op = self.next()?.to_string();
        let node = match op.as_str() {
            "add" | "sub" | "mul" | "div" | "pow" | "poch" => {
                let a = Box::new(self.parse()?);
                let b = Box::new(self.parse()?);
                match op.as_str() {
                    "add" => RhsTemplate::Add(a, b),
                    "sub" => RhsTemplate::Sub(a, b),
                    "mul" => RhsTemplate::Mul(a, b),
                    "div" => RhsTemplate::Div(a, b),
                    "pow" => RhsTemplate::Pow(a, b),
                    _ => RhsTemplate::Poch(a, b),
                }
            }
            "sqrt" => RhsTemplate::Sqrt(Box::new(self.parse()?)),
            "gamma" => RhsTemplate::Gamma(Box::new(self.parse()?)),
            "fact" => RhsTemplate::Fact(Box::new(self.parse()?)),
            other => return Err(Error::Parse(format!("unknown operator `{other}`"))),
        };
        let close = self.next()?;
        if close != ")" {
            return Err(Error::Parse(format!("expected `)`, found `{close}`")));
        }
        Ok(node)
    }
}

fn atom(t: &str) -> Result<RhsTemplate> {
    match t {
        "pi" => Ok(RhsTemplate::Pi),
        "ln2" => Ok(RhsTemplate::Ln2),
        "eulergamma" => Ok(RhsTemplate::EulerGamma),
        _ => {
            if t.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
                if t.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                    return Ok(RhsTemplate::Var(t.to_string()));
                }
                return Err(Error::Parse(format!("bad atom `{t}`")));
            }
            Ok(RhsTemplate::Lit(parse_rational(t)?))
        }
    }
}

impl FromStr for RhsTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.parse()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!(
                "trailing tokens after expression: `{}`",
                p.tokens[p.pos..].join(" ")
            )));
        }
        Ok(e)
    }
}

impl fmt::Display for RhsTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsTemplate::Lit(r) => write!(f, "{r}"),
            RhsTemplate::Var(v) => write!(f, "{v}"),
            RhsTemplate::Pi => write!(f, "pi"),
            RhsTemplate::Ln2 => write!(f, "ln2"),
            RhsTemplate::EulerGamma => write!(f, "eulergamma"),
            RhsTemplate::Sqrt(x) => write!(f, "(sqrt {x})"),
            RhsTemplate::Gamma(x) => write!(f, "(gamma {x})"),
            RhsTemplate::Fact(x) => write!(f, "(fact {x})"),
            RhsTemplate::Poch(a, b) => write!(f, "(poch {a} {b})"),
            RhsTemplate::Add(a, b) => write!(f, "(add {a} {b})"),
            RhsTemplate::Sub(a, b) => write!(f, "(sub {a} {b})"),
            RhsTemplate::Mul(a, b) => write!(f, "(mul {a} {b})"),
            RhsTemplate::Div(a, b) => write!(f, "(div {a} {b})"),
            RhsTemplate::Pow(a, b) => write!(f, "(pow {a} {b})"),
        }
    }
}
