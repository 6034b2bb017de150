//! Generalized hypergeometric series: term generation, exact summation of
//! terminating series, and numeric summation of convergent ones.
//!
//! A [`HyperSpec`] is a plain `pFq` parameter list with a rational argument;
//! a [`SeriesSpec`] adds an optional harmonic-type weight and an optional
//! per-term rational scale, so a single description covers both the
//! hypergeometric forms and the central-binomial forms of the catalog
//! identities. All term values are exact rationals.
//!
//! The JSON form mirrors the in-memory shape, with rationals as strings:
//! `{"upper": ["1/2","1/2","1/2","5/4"], "lower": ["1/4","1","1"],
//! "argument": "-1", "weight": "none"}`.

pub mod accel;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bigfloat::{bits_for_digits, BigFloat};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, rat_int, Rational};
use crate::special::pochhammer;

pub use accel::sum_accelerated;

/// Parameter lists and argument of a generalized hypergeometric series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperSpec {
    upper: Vec<Rational>,
    lower: Vec<Rational>,
    argument: Rational,
}

impl HyperSpec {
    /// Validates that a lower-parameter pole can only occur after an upper
    /// parameter has already terminated the series.
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>, argument: Rational) -> Result<Self> {
        let spec = HyperSpec { upper, lower, argument };
        if let Some(pole) = spec.pole_index() {
            match spec.termination_index() {
                Some(t) if t < pole => {}
                _ => {
                    return Err(Error::Domain(format!(
                        "lower parameter produces a pole at term {pole} before any termination"
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    pub fn argument(&self) -> &Rational {
        &self.argument
    }

    /// Index `m` of the last nonzero term when some upper parameter is a
    /// nonpositive integer `-m`; terms past `m` vanish.
    pub fn termination_index(&self) -> Option<u64> {
        self.upper
            .iter()
            .filter(|a| crate::rational::is_nonpositive_integer(a))
            .filter_map(|a| crate::rational::as_i64(&(-a.clone())).map(|v| v as u64))
            .min()
    }

    /// First term index whose lower Pochhammer factor vanishes.
    fn pole_index(&self) -> Option<u64> {
        self.lower
            .iter()
            .filter(|b| crate::rational::is_nonpositive_integer(b))
            .filter_map(|b| crate::rational::as_i64(&(-b.clone())).map(|v| v as u64 + 1))
            .min()
    }
}

/// Harmonic-type weight multiplying the n-th hypergeometric term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weight {
    None,
    /// `H_n`
    Hn,
    /// `H_{2n}`
    H2n,
    /// odd harmonic `O_n`
    On,
    /// alternating harmonic `H'_n`
    HAltN,
    /// `H'_{2n}`
    HAlt2n,
    /// `2 O_n + H_n`
    TwoOnPlusHn,
    /// `c0 + c1 * n`
    LinearFactor(Rational, Rational),
}

impl Weight {
    fn is_polynomial(&self) -> bool {
        matches!(self, Weight::None | Weight::LinearFactor(..))
    }

    fn is_identically_zero(&self) -> bool {
        matches!(self, Weight::LinearFactor(c0, c1) if c0.is_zero() && c1.is_zero())
    }
}

/// Per-term rational multiplier `constant * prod(a + b n) / prod(a' + b' n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermScale {
    pub constant: Rational,
    pub numer: Vec<(Rational, Rational)>,
    pub denom: Vec<(Rational, Rational)>,
}

impl TermScale {
    pub fn constant(c: Rational) -> Self {
        TermScale { constant: c, numer: Vec::new(), denom: Vec::new() }
    }

    fn value_at(&self, n: u64) -> Result<Rational> {
        let nn = rat_int(n as i64);
        let mut v = self.constant.clone();
        for (a, b) in &self.numer {
            v *= a + b * &nn;
        }
        for (a, b) in &self.denom {
            let f = a + b * &nn;
            if f.is_zero() {
                return Err(Error::Domain(format!(
                    "scale factor {a} + {b} n vanishes at n = {n}"
                )));
            }
            v /= f;
        }
        Ok(v)
    }
}

/// A weighted, optionally rescaled hypergeometric series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSpec {
    pub base: HyperSpec,
    pub weight: Weight,
    pub term_scale: Option<TermScale>,
}

impl SeriesSpec {
    pub fn plain(base: HyperSpec) -> Self {
        SeriesSpec { base, weight: Weight::None, term_scale: None }
    }

    pub fn weighted(base: HyperSpec, weight: Weight) -> Self {
        SeriesSpec { base, weight, term_scale: None }
    }

    pub fn termination_index(&self) -> Option<u64> {
        self.base.termination_index()
    }

    /// Exact n-th term (base term times weight times scale).
    pub fn term_exact(&self, n: u64) -> Result<Rational> {
        let nu = n as usize;
        if let Some(pole) = self.base.pole_index() {
            let stop = self.base.termination_index().unwrap_or(u64::MAX);
            if n >= pole && pole <= stop {
                return Err(Error::Pole { index: pole as usize });
            }
        }
        if let Some(t) = self.base.termination_index() {
            if n > t {
                return Ok(Rational::zero());
            }
        }
        let mut v = crate::rational::pow_i64(&self.base.argument, n as i64)?
            / Rational::from_integer(crate::special::factorial(nu));
        for a in &self.base.upper {
            v *= pochhammer(a, nu);
        }
        for b in &self.base.lower {
            v /= pochhammer(b, nu);
        }
        v *= self.weight_value(n);
        if let Some(scale) = &self.term_scale {
            v *= scale.value_at(n)?;
        }
        Ok(v)
    }

    fn weight_value(&self, n: u64) -> Rational {
        let t = crate::special::harmonic_triple(n as usize);
        match &self.weight {
            Weight::None => Rational::one(),
            Weight::Hn => t.h,
            Weight::H2n => crate::special::harmonic_triple(2 * n as usize).h,
            Weight::On => t.o,
            Weight::HAltN => t.h_alt,
            Weight::HAlt2n => crate::special::harmonic_triple(2 * n as usize).h_alt,
            Weight::TwoOnPlusHn => &t.o * rat_int(2) + &t.h,
            Weight::LinearFactor(c0, c1) => c0 + c1 * rat_int(n as i64),
        }
    }

    /// Exact term stream starting at n = 0.
    pub fn terms(&self) -> TermIter<'_> {
        TermIter::new(self)
    }
}

/// Incremental exact term generator: the base term follows the pFq ratio
/// recurrence and only the harmonic state the weight actually uses is
/// advanced (exact harmonic numbers grow quickly in digit size).
pub struct TermIter<'a> {
    spec: &'a SeriesSpec,
    n: u64,
    base: Rational,
    h: Rational,
    h2: Rational,
    o: Rational,
    h_alt: Rational,
    h_alt2: Rational,
    failed: bool,
}

impl<'a> TermIter<'a> {
    fn new(spec: &'a SeriesSpec) -> Self {
        TermIter {
            spec,
            n: 0,
            base: Rational::one(),
            h: Rational::zero(),
            h2: Rational::zero(),
            o: Rational::zero(),
            h_alt: Rational::zero(),
            h_alt2: Rational::zero(),
            failed: false,
        }
    }

    fn weight_now(&self) -> Rational {
        match &self.spec.weight {
            Weight::None => Rational::one(),
            Weight::Hn => self.h.clone(),
            Weight::H2n => self.h2.clone(),
            Weight::On => self.o.clone(),
            Weight::HAltN => self.h_alt.clone(),
            Weight::HAlt2n => self.h_alt2.clone(),
            Weight::TwoOnPlusHn => &self.o * rat_int(2) + &self.h,
            Weight::LinearFactor(c0, c1) => c0 + c1 * rat_int(self.n as i64),
        }
    }

    fn advance(&mut self) -> Result<()> {
        let n = rat_int(self.n as i64);
        if !self.base.is_zero() {
            let mut num = self.spec.base.argument.clone();
            for a in self.spec.base.upper() {
                num *= a + &n;
            }
            let mut den = &n + Rational::one();
            for b in self.spec.base.lower() {
                let f = b + &n;
                if f.is_zero() {
                    self.failed = true;
                    return Err(Error::Pole { index: self.n as usize + 1 });
                }
                den *= f;
            }
            self.base = &self.base * num / den;
        }
        self.n += 1;
        let k = self.n as i64;
        match &self.spec.weight {
            Weight::None | Weight::LinearFactor(..) => {}
            Weight::Hn => self.h += crate::rational::rat(1, k),
            Weight::H2n => {
                self.h2 += crate::rational::rat(1, 2 * k - 1) + crate::rational::rat(1, 2 * k);
            }
            Weight::On => self.o += crate::rational::rat(1, 2 * k - 1),
            Weight::HAltN => {
                if k % 2 == 1 {
                    self.h_alt += crate::rational::rat(1, k);
                } else {
                    self.h_alt -= crate::rational::rat(1, k);
                }
            }
            Weight::HAlt2n => {
                self.h_alt2 += crate::rational::rat(1, 2 * k - 1) - crate::rational::rat(1, 2 * k);
            }
            Weight::TwoOnPlusHn => {
                self.h += crate::rational::rat(1, k);
                self.o += crate::rational::rat(1, 2 * k - 1);
            }
        }
        Ok(())
    }
}

impl Iterator for TermIter<'_> {
    type Item = Result<Rational>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let scale = match &self.spec.term_scale {
            Some(s) => match s.value_at(self.n) {
                Ok(v) => v,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            },
            None => Rational::one(),
        };
        let term = &self.base * self.weight_now() * scale;
        match self.advance() {
            Ok(()) => Some(Ok(term)),
            Err(_) => {
                // the current term is still valid; the iterator ends here and
                // a subsequent pull would have hit the pole
                Some(Ok(term))
            }
        }
    }
}

/// How a [`SumResult`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMethod {
    Exact,
    Direct,
    Accelerated,
}

impl std::fmt::Display for SumMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SumMethod::Exact => write!(f, "exact"),
            SumMethod::Direct => write!(f, "direct"),
            SumMethod::Accelerated => write!(f, "accelerated"),
        }
    }
}

/// Outcome of a numeric summation. For `exact` and `direct` the bound is
/// rigorous (`|value - true sum| <= error_bound` while `converged`); for
/// `accelerated` it is the empirical two-level agreement estimate and
/// `heuristic_bound` is set.
#[derive(Debug, Clone)]
pub struct SumResult {
    pub value: BigFloat,
    pub error_bound: BigFloat,
    pub terms_used: u64,
    pub method: SumMethod,
    pub converged: bool,
    pub heuristic_bound: bool,
}

/// Exact rational value of a terminating series. The weight must be
/// polynomial (none or a linear factor); harmonic weights have no exact
/// terminating role in the catalog.
pub fn sum_terminating_exact(spec: &SeriesSpec) -> Result<Rational> {
    let last = spec
        .termination_index()
        .ok_or_else(|| Error::NonTerminating("no upper parameter is a nonpositive integer".into()))?;
    if !spec.weight.is_polynomial() {
        return Err(Error::Domain(
            "terminating exact summation requires a polynomial weight".into(),
        ));
    }
    if last > 2_000_000 {
        return Err(Error::Domain(format!(
            "terminating series has {last} terms, beyond the exact summation budget"
        )));
    }
    let mut sum = Rational::zero();
    for term in spec.terms().take(last as usize + 1) {
        sum += term?;
    }
    Ok(sum)
}

/// Number of consecutive detections required before a runtime tail bound is
/// trusted; the harmonic-weighted series have a non-monotone initial stretch.
const DETECTION_RUN: u32 = 16;

/// Direct summation with runtime-detected tail bounds.
///
/// Once the terms have alternated in sign with strictly decreasing magnitude
/// for [`DETECTION_RUN`] consecutive steps, the first omitted term bounds the
/// tail; with `|argument| < 1`, a sustained ratio below `(|arg|+1)/2` gives a
/// geometric bound instead. Stops as soon as the bound (plus the rounding
/// allowance) drops under `10^-digits`. Hitting `max_terms` returns the
/// running value with `converged = false`.
pub fn sum_direct(spec: &SeriesSpec, digits: u32, max_terms: u64) -> Result<SumResult> {
    let log_budget = 64 - max_terms.leading_zeros().min(63);
    let wp = bits_for_digits(digits) + 2 * log_budget + 16;
    let tol = BigFloat::from_rational(&crate::rational::ten_pow(-(digits as i64)), wp);

    if spec.weight.is_identically_zero()
        || spec.term_scale.as_ref().is_some_and(|s| s.constant.is_zero())
    {
        return Ok(SumResult {
            value: BigFloat::zero(wp),
            error_bound: BigFloat::zero(wp),
            terms_used: 0,
            method: SumMethod::Direct,
            converged: true,
            heuristic_bound: false,
        });
    }

    let termination = spec.termination_index();
    let arg_abs = spec.base.argument().abs();
    let ratio_mode_possible = arg_abs < Rational::one();
    // safe geometric ratio: halfway between |argument| and 1
    let rho = (&arg_abs + Rational::one()) / rat_int(2);
    let rho_f = BigFloat::from_rational(&rho, wp);
    let geom_factor = if ratio_mode_possible {
        rho_f.div(&BigFloat::from_rational(&(Rational::one() - &rho), wp), wp)?
    } else {
        BigFloat::zero(wp)
    };

    let mut sum = BigFloat::zero(wp);
    let mut sum_abs = BigFloat::zero(wp);
    let mut prev: Option<BigFloat> = None;
    let mut alt_run = 0u32;
    let mut ratio_run = 0u32;
    let mut terms_used = 0u64;

    // Float-side term recurrence: exact rationals would grow without bound
    // over hundreds of thousands of terms, so the base term and any harmonic
    // weight advance in rounded arithmetic at `wp` bits; the rounding
    // allowance below accounts for it.
    let mut base_f = BigFloat::one(wp);
    let mut wh = BigFloat::zero(wp);
    let mut wh2 = BigFloat::zero(wp);
    let mut wo = BigFloat::zero(wp);
    let mut wha = BigFloat::zero(wp);
    let mut wha2 = BigFloat::zero(wp);

    for n in 0..=max_terms {
        let weight_f = match &spec.weight {
            Weight::None => BigFloat::one(wp),
            Weight::Hn => wh.clone(),
            Weight::H2n => wh2.clone(),
            Weight::On => wo.clone(),
            Weight::HAltN => wha.clone(),
            Weight::HAlt2n => wha2.clone(),
            Weight::TwoOnPlusHn => wo.mul_pow2(1).add(&wh, wp),
            Weight::LinearFactor(c0, c1) => {
                BigFloat::from_rational(&(c0 + c1 * rat_int(n as i64)), wp)
            }
        };
        let mut t = base_f.mul(&weight_f, wp);
        if let Some(scale) = &spec.term_scale {
            t = t.mul(&BigFloat::from_rational(&scale.value_at(n)?, wp), wp);
        }

        // Tail bounds are evaluated against the would-be-omitted term before
        // it is added.
        if n > 0 {
            let rounding = sum_abs.mul_pow2(-(wp as i64) + 6 + log_budget as i64);
            if alt_run >= DETECTION_RUN {
                let bound = t.abs().add(&rounding, wp);
                if bound.cmp_exact(&tol) == std::cmp::Ordering::Less {
                    return Ok(SumResult {
                        value: sum,
                        error_bound: bound,
                        terms_used,
                        method: SumMethod::Direct,
                        converged: true,
                        heuristic_bound: false,
                    });
                }
            }
            if ratio_mode_possible && ratio_run >= DETECTION_RUN {
                let bound = t.abs().mul(&geom_factor, wp).add(&rounding, wp);
                if bound.cmp_exact(&tol) == std::cmp::Ordering::Less {
                    return Ok(SumResult {
                        value: sum,
                        error_bound: bound,
                        terms_used,
                        method: SumMethod::Direct,
                        converged: true,
                        heuristic_bound: false,
                    });
                }
            }
        }

        if let Some(p) = &prev {
            let sign_flip = !t.is_zero() && !p.is_zero() && (t.is_negative() != p.is_negative());
            let shrinking = t.abs().cmp_exact(&p.abs()) == std::cmp::Ordering::Less;
            alt_run = if sign_flip && shrinking { alt_run + 1 } else { 0 };
            let ratio_ok = !p.is_zero()
                && t.abs().cmp_exact(&p.abs().mul(&rho_f, wp)) != std::cmp::Ordering::Greater;
            ratio_run = if ratio_ok { ratio_run + 1 } else { 0 };
        }

        sum = sum.add(&t, wp);
        sum_abs = sum_abs.add(&t.abs(), wp);
        prev = Some(t);
        terms_used = n + 1;

        if let Some(last) = termination {
            if n >= last {
                let rounding = sum_abs.mul_pow2(-(wp as i64) + 6 + log_budget as i64);
                return Ok(SumResult {
                    value: sum,
                    error_bound: rounding,
                    terms_used,
                    method: SumMethod::Direct,
                    converged: true,
                    heuristic_bound: false,
                });
            }
        }

        // advance the base term by its exact rational ratio
        if !base_f.is_zero() {
            let nn = rat_int(n as i64);
            let mut num = spec.base.argument.clone();
            for a in spec.base.upper() {
                num *= a + &nn;
            }
            let mut den = &nn + Rational::one();
            for b in spec.base.lower() {
                let f = b + &nn;
                if f.is_zero() {
                    return Err(Error::Pole { index: n as usize + 1 });
                }
                den *= f;
            }
            base_f = base_f
                .mul(&BigFloat::from_rational(&num, wp), wp)
                .div(&BigFloat::from_rational(&den, wp), wp)?;
        }
        // advance only the harmonic state the weight uses
        let k = n as i64 + 1;
        match &spec.weight {
            Weight::None | Weight::LinearFactor(..) => {}
            Weight::Hn => wh = wh.add(&BigFloat::from_rational(&crate::rational::rat(1, k), wp), wp),
            Weight::H2n => {
                let step = crate::rational::rat(1, 2 * k - 1) + crate::rational::rat(1, 2 * k);
                wh2 = wh2.add(&BigFloat::from_rational(&step, wp), wp);
            }
            Weight::On => {
                wo = wo.add(&BigFloat::from_rational(&crate::rational::rat(1, 2 * k - 1), wp), wp)
            }
            Weight::HAltN => {
                let step = if k % 2 == 1 {
                    crate::rational::rat(1, k)
                } else {
                    crate::rational::rat(-1, k)
                };
                wha = wha.add(&BigFloat::from_rational(&step, wp), wp);
            }
            Weight::HAlt2n => {
                let step = crate::rational::rat(1, 2 * k - 1) - crate::rational::rat(1, 2 * k);
                wha2 = wha2.add(&BigFloat::from_rational(&step, wp), wp);
            }
            Weight::TwoOnPlusHn => {
                wh = wh.add(&BigFloat::from_rational(&crate::rational::rat(1, k), wp), wp);
                wo = wo.add(&BigFloat::from_rational(&crate::rational::rat(1, 2 * k - 1), wp), wp);
            }
        }
    }

    let residual = prev.map(|p| p.abs()).unwrap_or_else(|| BigFloat::zero(wp));
    let rounding = sum_abs.mul_pow2(-(wp as i64) + 6 + log_budget as i64);
    Ok(SumResult {
        value: sum,
        error_bound: residual.add(&rounding, wp),
        terms_used,
        method: SumMethod::Direct,
        converged: false,
        heuristic_bound: false,
    })
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SeriesSpecWire {
    upper: Vec<String>,
    lower: Vec<String>,
    argument: String,
    weight: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    term_scale: Option<TermScaleWire>,
}

/// Weight as it appears in JSON: a plain string for the named weights,
/// `{"linear_factor": ["c0","c1"]}` for the polynomial one.
pub(crate) fn weight_to_value(w: &Weight) -> serde_json::Value {
    use serde_json::{json, Value};
    match w {
        Weight::None => Value::String("none".into()),
        Weight::Hn => Value::String("H_n".into()),
        Weight::H2n => Value::String("H_2n".into()),
        Weight::On => Value::String("O_n".into()),
        Weight::HAltN => Value::String("H'_n".into()),
        Weight::HAlt2n => Value::String("H'_2n".into()),
        Weight::TwoOnPlusHn => Value::String("2O_n+H_n".into()),
        Weight::LinearFactor(c0, c1) => json!({"linear_factor": [c0.to_string(), c1.to_string()]}),
    }
}

pub(crate) fn weight_from_value(v: &serde_json::Value) -> Result<Weight> {
    match v {
        serde_json::Value::String(s) => match s.as_str() {
            "none" => Ok(Weight::None),
            "H_n" => Ok(Weight::Hn),
            "H_2n" => Ok(Weight::H2n),
            "O_n" => Ok(Weight::On),
            "H'_n" => Ok(Weight::HAltN),
            "H'_2n" => Ok(Weight::HAlt2n),
            "2O_n+H_n" => Ok(Weight::TwoOnPlusHn),
            other => Err(Error::Parse(format!("unknown weight `{other}`"))),
        },
        serde_json::Value::Object(map) => {
            let arr = map
                .get("linear_factor")
                .and_then(|a| a.as_array())
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Parse("weight object needs linear_factor: [c0, c1]".into()))?;
            let c0 = arr[0].as_str().ok_or_else(|| Error::Parse("linear_factor entries must be strings".into()))?;
            let c1 = arr[1].as_str().ok_or_else(|| Error::Parse("linear_factor entries must be strings".into()))?;
            Ok(Weight::LinearFactor(parse_rational(c0)?, parse_rational(c1)?))
        }
        _ => Err(Error::Parse("weight must be a string or a linear_factor object".into())),
    }
}

#[derive(Serialize, Deserialize)]
struct TermScaleWire {
    constant: String,
    #[serde(default)]
    numer: Vec<[String; 2]>,
    #[serde(default)]
    denom: Vec<[String; 2]>,
}

impl Serialize for SeriesSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = SeriesSpecWire {
            upper: self.base.upper.iter().map(|r| r.to_string()).collect(),
            lower: self.base.lower.iter().map(|r| r.to_string()).collect(),
            argument: self.base.argument.to_string(),
            weight: weight_to_value(&self.weight),
            term_scale: self.term_scale.as_ref().map(|s| TermScaleWire {
                constant: s.constant.to_string(),
                numer: s.numer.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
                denom: s.denom.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
            }),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SeriesSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = SeriesSpecWire::deserialize(deserializer)?;
        SeriesSpec::try_from(wire).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<SeriesSpecWire> for SeriesSpec {
    type Error = Error;

    fn try_from(wire: SeriesSpecWire) -> Result<Self> {
        let upper = wire.upper.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        let lower = wire.lower.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        let argument = parse_rational(&wire.argument)?;
        let weight = weight_from_value(&wire.weight)?;
        let term_scale = wire
            .term_scale
            .map(|s| -> Result<TermScale> {
                Ok(TermScale {
                    constant: parse_rational(&s.constant)?,
                    numer: s
                        .numer
                        .iter()
                        .map(|[a, b]| Ok((parse_rational(a)?, parse_rational(b)?)))
                        .collect::<Result<Vec<_>>>()?,
                    denom: s
                        .denom
                        .iter()
                        .map(|[a, b]| Ok((parse_rational(a)?, parse_rational(b)?)))
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .transpose()?;
        Ok(SeriesSpec {
            base: HyperSpec::new(upper, lower, argument)?,
            weight,
            term_scale,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::agree_digits;
    use crate::rational::rat;
    use rand::{Rng, SeedableRng};

    /// 4F3[1/2,1/2,1/2,5/4; 1/4,1,1; -1]: the hypergeometric form of the
    /// alternating central-binomial-cube series.
    pub(crate) fn ramanujan_4f3() -> HyperSpec {
        HyperSpec::new(
            vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(5, 4)],
            vec![rat(1, 4), rat_int(1), rat_int(1)],
            rat_int(-1),
        )
        .unwrap()
    }

    #[test]
    fn first_terms_of_the_main_series() {
        let spec = SeriesSpec::plain(ramanujan_4f3());
        assert_eq!(spec.term_exact(0).unwrap(), rat_int(1));
        // n = 1: (-1/64) C(2,1)^3 (4+1) = -40/64 = -5/8
        assert_eq!(spec.term_exact(1).unwrap(), rat(-5, 8));
        // weighted by H_{2n}: n = 0 term vanishes
        let weighted = SeriesSpec::weighted(ramanujan_4f3(), Weight::H2n);
        assert_eq!(weighted.term_exact(0).unwrap(), rat_int(0));
        assert_eq!(weighted.term_exact(1).unwrap(), rat(-5, 8) * rat(3, 2));
    }

    #[test]
    fn binomial_and_hypergeometric_forms_agree() {
        // (-1/64)^n C(2n,n)^3 (4n+1) == 4F3 term, exactly, for n <= 40
        let spec = SeriesSpec::plain(ramanujan_4f3());
        for n in 0..=40u64 {
            let binom = Rational::from_integer(crate::special::central_binomial(n as usize));
            let direct = crate::rational::pow_i64(&rat(-1, 64), n as i64).unwrap()
                * (&binom * &binom * &binom)
                * rat_int(4 * n as i64 + 1);
            assert_eq!(spec.term_exact(n).unwrap(), direct, "mismatch at n = {n}");
        }
    }

    #[test]
    fn iterator_matches_one_shot_terms() {
        let spec = SeriesSpec {
            base: HyperSpec::new(
                vec![rat(1, 2), rat(-7, 3), rat(9, 5)],
                vec![rat(3, 2), rat(11, 7)],
                rat(-2, 3),
            )
            .unwrap(),
            weight: Weight::TwoOnPlusHn,
            term_scale: Some(TermScale {
                constant: rat(3, 4),
                numer: vec![(rat_int(1), rat_int(2))],
                denom: vec![(rat_int(5), rat_int(1))],
            }),
        };
        for (n, t) in spec.terms().take(25).enumerate() {
            assert_eq!(t.unwrap(), spec.term_exact(n as u64).unwrap(), "index {n}");
        }
    }

    #[test]
    fn ratio_recurrence_random_probes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut checked = 0u32;
        while checked < 500 {
            let p = rng.gen_range(1..4usize);
            let upper: Vec<Rational> =
                (0..p).map(|_| rat(rng.gen_range(-9..14), rng.gen_range(1..7))).collect();
            let lower: Vec<Rational> =
                (0..p).map(|_| rat(rng.gen_range(1..14), rng.gen_range(1..7))).collect();
            let argument = rat(rng.gen_range(-3..4), rng.gen_range(1..5));
            let Ok(base) = HyperSpec::new(upper.clone(), lower.clone(), argument.clone()) else {
                continue;
            };
            if argument.is_zero() {
                continue;
            }
            let spec = SeriesSpec::plain(base);
            let n = rng.gen_range(0..30u64);
            let t_n = spec.term_exact(n).unwrap();
            let t_next = spec.term_exact(n + 1).unwrap();
            // t_{n+1} * (n+1) * prod(b_j + n) == t_n * z * prod(a_i + n)
            let nn = rat_int(n as i64);
            let mut lhs = t_next * rat_int(n as i64 + 1);
            for b in &lower {
                lhs *= b + &nn;
            }
            let mut rhs = t_n * &argument;
            for a in &upper {
                rhs *= a + &nn;
            }
            assert_eq!(lhs, rhs);
            checked += 1;
        }
    }

    #[test]
    fn terminating_gauss_inner_sum() {
        // sum_{l<=k} (-k)_l (k+a)_l / (l!)^2 for k=3, a=1/2 equals -5/16
        let spec = SeriesSpec::plain(
            HyperSpec::new(vec![rat_int(-3), rat(7, 2)], vec![rat_int(1)], rat_int(1)).unwrap(),
        );
        assert_eq!(sum_terminating_exact(&spec).unwrap(), rat(-5, 16));
        // k = 0 edge: a single term, value 1
        let k0 = SeriesSpec::plain(
            HyperSpec::new(vec![rat_int(0), rat(1, 2)], vec![rat_int(1)], rat_int(1)).unwrap(),
        );
        assert_eq!(sum_terminating_exact(&k0).unwrap(), rat_int(1));
    }

    #[test]
    fn terminating_4f3_value() {
        // 4F3[a,a,-n,1+a/2; 1,a/2,n+a+1; -1] = (a+1)_n/n! at a=1/2, n=2
        let a = rat(1, 2);
        let n = 2i64;
        let spec = SeriesSpec::plain(
            HyperSpec::new(
                vec![a.clone(), a.clone(), rat_int(-n), rat_int(1) + &a / rat_int(2)],
                vec![rat_int(1), &a / rat_int(2), rat_int(n) + &a + rat_int(1)],
                rat_int(-1),
            )
            .unwrap(),
        );
        let want = pochhammer(&(&a + rat_int(1)), n as usize)
            / Rational::from_integer(crate::special::factorial(n as usize));
        assert_eq!(sum_terminating_exact(&spec).unwrap(), want);
        // (3/2)_2 / 2! = (15/4) / 2
        assert_eq!(want, rat(15, 8));
    }

    #[test]
    fn terminating_exact_agrees_with_direct_summation() {
        // the exact rational value and the float-side direct sum coincide
        // to the full requested digits
        let digits = 25u32;
        let prec = crate::bigfloat::bits_for_digits(digits);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let m = rng.gen_range(0..15i64);
            let a = rat(rng.gen_range(1..20), rng.gen_range(1..8));
            let spec = SeriesSpec {
                base: HyperSpec::new(
                    vec![rat_int(-m), a.clone(), rat(1, 2)],
                    vec![rat(3, 2), rat(5, 3)],
                    rat(-2, 3),
                )
                .unwrap(),
                weight: Weight::LinearFactor(rat_int(1), rat_int(4)),
                term_scale: None,
            };
            let exact = sum_terminating_exact(&spec).unwrap();
            let direct = sum_direct(&spec, digits, 1000).unwrap();
            assert!(direct.converged);
            let want = BigFloat::from_rational(&exact, prec);
            assert!(
                agree_digits(&direct.value, &want) >= digits,
                "terminating spec with m = {m}, a = {a}"
            );
        }
    }

    #[test]
    fn non_terminating_exact_sum_is_rejected() {
        let spec = SeriesSpec::plain(ramanujan_4f3());
        assert!(matches!(sum_terminating_exact(&spec), Err(Error::NonTerminating(_))));
        let harmonic = SeriesSpec::weighted(
            HyperSpec::new(vec![rat_int(-3), rat(1, 2)], vec![rat_int(1)], rat_int(1)).unwrap(),
            Weight::Hn,
        );
        assert!(matches!(sum_terminating_exact(&harmonic), Err(Error::Domain(_))));
    }

    #[test]
    fn pole_detection() {
        // lower parameter -2 poles at term 3 with no termination
        assert!(HyperSpec::new(vec![rat(1, 2)], vec![rat_int(-2)], rat_int(1)).is_err());
        // a pole at term 3 after termination at 2 is fine: terms past the
        // termination index vanish by convention
        let ok = HyperSpec::new(vec![rat_int(-2)], vec![rat_int(-2)], rat_int(1));
        assert!(ok.is_ok());
        let spec = SeriesSpec::plain(ok.unwrap());
        assert_eq!(spec.term_exact(3).unwrap(), Rational::zero());
        assert_eq!(spec.term_exact(4).unwrap(), Rational::zero());
        // the upper and lower (-2)_n cancel: terms are 1/n! up to n = 2
        assert_eq!(sum_terminating_exact(&spec).unwrap(), rat(5, 2));
    }

    #[test]
    fn weight_plumbing_h2n_equals_on_plus_half_hn() {
        let h2n = SeriesSpec::weighted(ramanujan_4f3(), Weight::H2n);
        let on = SeriesSpec::weighted(ramanujan_4f3(), Weight::On);
        let hn = SeriesSpec::weighted(ramanujan_4f3(), Weight::Hn);
        for n in 0..100u64 {
            let lhs = h2n.term_exact(n).unwrap();
            let rhs = on.term_exact(n).unwrap() + hn.term_exact(n).unwrap() / rat_int(2);
            assert_eq!(lhs, rhs, "term {n}");
        }
    }

    #[test]
    fn direct_sum_of_the_main_series_to_three_digits() {
        // terms decay like n^(-1/2): only a few digits are reachable directly
        let spec = SeriesSpec::plain(ramanujan_4f3());
        let r = sum_direct(&spec, 3, 10_000_000).unwrap();
        assert!(r.converged);
        let two_over_pi = crate::constexpr::eval_const(&"(div 2 pi)".parse().unwrap(), 12).unwrap();
        assert!(agree_digits(&r.value, &two_over_pi) >= 3);
        // the claimed bound must actually cover the distance to the true sum
        let err = r.value.sub(&two_over_pi, 256).abs();
        assert!(err.cmp_exact(&r.error_bound) != std::cmp::Ordering::Greater);
    }

    #[test]
    fn direct_sum_geometric_ratio_case() {
        // 2F1(1/2,1/2;1;1/4): ratio tends to 1/4 < 1
        let spec = SeriesSpec::plain(
            HyperSpec::new(vec![rat(1, 2), rat(1, 2)], vec![rat_int(1)], rat(1, 4)).unwrap(),
        );
        let r = sum_direct(&spec, 20, 100_000).unwrap();
        assert!(r.converged);
        assert!(r.terms_used < 200, "geometric case used {} terms", r.terms_used);
        // cross-check against an independent higher-digit direct run
        let r2 = sum_direct(&spec, 30, 100_000).unwrap();
        assert!(agree_digits(&r.value, &r2.value) >= 20);
    }

    #[test]
    fn direct_sum_budget_exhaustion_is_flagged() {
        let spec = SeriesSpec::plain(ramanujan_4f3());
        let r = sum_direct(&spec, 12, 500).unwrap();
        assert!(!r.converged);
        assert!(r.terms_used >= 500);
    }

    #[test]
    fn all_zero_weight_sums_to_zero() {
        let spec = SeriesSpec::weighted(
            ramanujan_4f3(),
            Weight::LinearFactor(Rational::zero(), Rational::zero()),
        );
        let r = sum_direct(&spec, 10, 1000).unwrap();
        assert!(r.value.is_zero() && r.error_bound.is_zero() && r.converged);
    }

    #[test]
    fn json_wire_format_round_trip() {
        let text = r#"{"upper": ["1/2","1/2","1/2","5/4"], "lower": ["1/4","1","1"], "argument": "-1", "weight": "none"}"#;
        let spec: SeriesSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.base, ramanujan_4f3());
        assert_eq!(spec.weight, Weight::None);
        let emitted = serde_json::to_string(&spec).unwrap();
        let spec2: SeriesSpec = serde_json::from_str(&emitted).unwrap();
        assert_eq!(spec, spec2);

        let weighted = r#"{"upper": ["1/2"], "lower": ["1"], "argument": "-1", "weight": {"linear_factor": ["1","4"]},
                           "term_scale": {"constant": "-1", "denom": [["-1","2"],["1","1"]]}}"#;
        let spec3: SeriesSpec = serde_json::from_str(weighted).unwrap();
        assert_eq!(spec3.weight, Weight::LinearFactor(rat_int(1), rat_int(4)));
        let spec4: SeriesSpec =
            serde_json::from_str(&serde_json::to_string(&spec3).unwrap()).unwrap();
        assert_eq!(spec3, spec4);
    }
}
