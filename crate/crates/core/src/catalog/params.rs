//! Infix rational expressions over named parameters.
//!
//! Catalog entries describe parametric identities with parameter slots like
//! `"1+a/2"` or `"n+a+1"`; a [`ParamExpr`] parses such a string and
//! evaluates it to an exact rational once bindings are supplied. Plain
//! `p/q` literals are the degenerate case (division of two literals).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamExpr {
    Lit(Rational),
    Var(String),
    Neg(Box<ParamExpr>),
    Add(Box<ParamExpr>, Box<ParamExpr>),
    Sub(Box<ParamExpr>, Box<ParamExpr>),
    Mul(Box<ParamExpr>, Box<ParamExpr>),
    Div(Box<ParamExpr>, Box<ParamExpr>),
}

impl ParamExpr {
    pub fn lit(r: Rational) -> Self {
        ParamExpr::Lit(r)
    }

    pub fn var(name: &str) -> Self {
        ParamExpr::Var(name.to_string())
    }

    /// Exact evaluation under the given bindings.
    pub fn eval(&self, bindings: &BTreeMap<String, Rational>) -> Result<Rational> {
        match self {
            ParamExpr::Lit(r) => Ok(r.clone()),
            ParamExpr::Var(name) => bindings
                .get(name)
                .cloned()
                .ok_or_else(|| Error::MissingParam(name.clone())),
            ParamExpr::Neg(x) => Ok(-x.eval(bindings)?),
            ParamExpr::Add(a, b) => Ok(a.eval(bindings)? + b.eval(bindings)?),
            ParamExpr::Sub(a, b) => Ok(a.eval(bindings)? - b.eval(bindings)?),
            ParamExpr::Mul(a, b) => Ok(a.eval(bindings)? * b.eval(bindings)?),
            ParamExpr::Div(a, b) => {
                let d = b.eval(bindings)?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(a.eval(bindings)? / d)
            }
        }
    }

    /// Parameter names referenced by the expression.
    pub fn vars(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            ParamExpr::Lit(_) => {}
            ParamExpr::Var(v) => {
                out.insert(v.clone());
            }
            ParamExpr::Neg(x) => x.vars(out),
            ParamExpr::Add(a, b)
            | ParamExpr::Sub(a, b)
            | ParamExpr::Mul(a, b)
            | ParamExpr::Div(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

#[derive(Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '+' => {
                chars.next();
                toks.push(Tok::Plus);
            }
            '-' => {
                chars.next();
                toks.push(Tok::Minus);
            }
            '*' => {
                chars.next();
                toks.push(Tok::Star);
            }
            '/' => {
                chars.next();
                toks.push(Tok::Slash);
            }
            '(' => {
                chars.next();
                toks.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                toks.push(Tok::RParen);
            }
            c if c.is_ascii_digit() => {
                let mut num = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        num.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Num(num.parse().expect("digits only")));
            }
            c if c.is_ascii_lowercase() => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_lowercase() || d.is_ascii_digit() || d == '_' {
                        name.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Name(name));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}` in `{s}`"))),
        }
    }
    if toks.is_empty() {
        return Err(Error::Parse("empty parameter expression".into()));
    }
    Ok(toks)
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<ParamExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = ParamExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = ParamExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := factor (('*'|'/') factor)*
    fn term(&mut self) -> Result<ParamExpr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = ParamExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = ParamExpr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // factor := '-' factor | atom
    fn factor(&mut self) -> Result<ParamExpr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.pos += 1;
            return Ok(ParamExpr::Neg(Box::new(self.factor()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ParamExpr> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(ParamExpr::Lit(Rational::from_integer(n.clone()))),
            Some(Tok::Name(v)) => Ok(ParamExpr::Var(v.clone())),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl FromStr for ParamExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = P { toks: lex(s)?, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing tokens in `{s}`")));
        }
        Ok(e)
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamExpr::Lit(r) => write!(f, "{r}"),
            ParamExpr::Var(v) => write!(f, "{v}"),
            ParamExpr::Neg(x) => write!(f, "-{x}"),
            ParamExpr::Add(a, b) => write!(f, "({a}+{b})"),
            ParamExpr::Sub(a, b) => write!(f, "({a}-{b})"),
            ParamExpr::Mul(a, b) => write!(f, "({a}*{b})"),
            ParamExpr::Div(a, b) => write!(f, "({a}/{b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn bind(pairs: &[(&str, Rational)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn literals_and_fractions() {
        let e: ParamExpr = "3/2".parse().unwrap();
        assert_eq!(e.eval(&BTreeMap::new()).unwrap(), rat(3, 2));
        let neg: ParamExpr = "-1/64".parse().unwrap();
        assert_eq!(neg.eval(&BTreeMap::new()).unwrap(), rat(-1, 64));
    }

    #[test]
    fn parameter_slots() {
        let b = bind(&[("a", rat(1, 2)), ("n", rat_int(5))]);
        for (src, want) in [
            ("1+a/2", rat(5, 4)),
            ("n+a+1", rat(13, 2)),
            ("3/2-b", rat(3, 2)), // unbound b stays an error
        ] {
            let e: ParamExpr = src.parse().unwrap();
            if src.contains('b') {
                assert!(matches!(e.eval(&b), Err(Error::MissingParam(_))));
            } else {
                assert_eq!(e.eval(&b).unwrap(), want, "{src}");
            }
        }
    }

    #[test]
    fn precedence_and_parens() {
        let b = bind(&[("k", rat_int(4))]);
        let e: ParamExpr = "2*k-1".parse().unwrap();
        assert_eq!(e.eval(&b).unwrap(), rat_int(7));
        let e2: ParamExpr = "2*(k-1)".parse().unwrap();
        assert_eq!(e2.eval(&b).unwrap(), rat_int(6));
        let e3: ParamExpr = "-k/2".parse().unwrap();
        assert_eq!(e3.eval(&b).unwrap(), rat_int(-2));
    }

    #[test]
    fn division_by_zero_and_bad_syntax() {
        let e: ParamExpr = "1/(k-k)".parse().unwrap();
        assert!(matches!(e.eval(&bind(&[("k", rat_int(3))])), Err(Error::DivisionByZero)));
        assert!("1+".parse::<ParamExpr>().is_err());
        assert!("(1".parse::<ParamExpr>().is_err());
        assert!("0.5".parse::<ParamExpr>().is_err());
        assert!("".parse::<ParamExpr>().is_err());
    }

    #[test]
    fn collects_variables() {
        let e: ParamExpr = "a-b+1/(n+a)".parse().unwrap();
        let mut vars = std::collections::BTreeSet::new();
        e.vars(&mut vars);
        let names: Vec<_> = vars.into_iter().collect();
        assert_eq!(names, ["a", "b", "n"]);
    }
}
