//! The identity catalog: a versioned ledger of series identities, loaded
//! from JSON, plus the verification driver that checks each entry against
//! its closed form.
//!
//! Entries are parametric: rational slots in the series template and the
//! right-hand side may reference named parameters (`"n+a+1"`), which are
//! bound at verification time. A handful of entries whose very shape
//! depends on a parameter (the product-form 1/pi family, where the number
//! of linear factors grows with `k`) use a named builder instead of a
//! template. The default catalog ships embedded in the crate; the
//! `HYPERSEED_CATALOG` environment variable or an explicit path overrides
//! it, so conjectured identities can be added without rebuilding.

pub mod derivation;
pub mod params;
pub mod rhs;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bigfloat::agree_digits;
use crate::constexpr::eval_const;
use crate::error::{Error, Result};
use crate::rational::{parse_rational, rat, rat_int, Rational};
use crate::series::{
    sum_accelerated, sum_direct, sum_terminating_exact, HyperSpec, SeriesSpec, SumMethod,
    TermScale, Weight,
};

pub use params::ParamExpr;
pub use rhs::RhsTemplate;

/// Environment variable overriding the catalog file location.
pub const CATALOG_ENV: &str = "HYPERSEED_CATALOG";

const DEFAULT_CATALOG: &str = include_str!("../../data/catalog.json");

/// Parameter bindings: name -> exact rational.
pub type Bindings = BTreeMap<String, Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    ExactTerminating,
    Numeric,
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyMode::ExactTerminating => write!(f, "exact-terminating"),
            VerifyMode::Numeric => write!(f, "numeric"),
        }
    }
}

/// Series template with parameter slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTemplate {
    pub upper: Vec<ParamExpr>,
    pub lower: Vec<ParamExpr>,
    pub argument: ParamExpr,
    pub weight: Weight,
    pub term_scale: Option<ScaleTemplate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleTemplate {
    pub constant: ParamExpr,
    pub numer: Vec<(ParamExpr, ParamExpr)>,
    pub denom: Vec<(ParamExpr, ParamExpr)>,
}

impl SeriesTemplate {
    /// Convenience constructor from expression sources.
    pub fn parse(
        upper: &[&str],
        lower: &[&str],
        argument: &str,
        weight: Weight,
        term_scale: Option<ScaleTemplate>,
    ) -> Result<Self> {
        Ok(SeriesTemplate {
            upper: upper.iter().map(|s| s.parse()).collect::<Result<_>>()?,
            lower: lower.iter().map(|s| s.parse()).collect::<Result<_>>()?,
            argument: argument.parse()?,
            weight,
            term_scale,
        })
    }

    pub fn substitute(&self, bindings: &Bindings) -> Result<SeriesSpec> {
        let upper = self.upper.iter().map(|e| e.eval(bindings)).collect::<Result<Vec<_>>>()?;
        let lower = self.lower.iter().map(|e| e.eval(bindings)).collect::<Result<Vec<_>>>()?;
        let argument = self.argument.eval(bindings)?;
        let term_scale = self
            .term_scale
            .as_ref()
            .map(|s| -> Result<TermScale> {
                Ok(TermScale {
                    constant: s.constant.eval(bindings)?,
                    numer: s
                        .numer
                        .iter()
                        .map(|(a, b)| Ok((a.eval(bindings)?, b.eval(bindings)?)))
                        .collect::<Result<Vec<_>>>()?,
                    denom: s
                        .denom
                        .iter()
                        .map(|(a, b)| Ok((a.eval(bindings)?, b.eval(bindings)?)))
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .transpose()?;
        Ok(SeriesSpec {
            base: HyperSpec::new(upper, lower, argument)?,
            weight: self.weight.clone(),
            term_scale,
        })
    }

    fn vars(&self, out: &mut BTreeSet<String>) {
        for e in self.upper.iter().chain(&self.lower).chain([&self.argument]) {
            e.vars(out);
        }
        if let Some(s) = &self.term_scale {
            s.constant.vars(out);
            for (a, b) in s.numer.iter().chain(&s.denom) {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

/// Left-hand side: a parameter template, or a named builder for entries
/// whose structure itself depends on a parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LhsTemplate {
    Template(Box<SeriesTemplate>),
    Builder(String),
}

impl LhsTemplate {
    pub fn substitute(&self, bindings: &Bindings) -> Result<SeriesSpec> {
        match self {
            LhsTemplate::Template(t) => t.substitute(bindings),
            LhsTemplate::Builder(name) => build_series(name, bindings),
        }
    }
}

/// One catalog entry: a series, a closed form, a verification mode, the
/// parameter schema, a provenance note, and the default parameter sweeps
/// used by `verify-all`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityRecord {
    pub id: String,
    pub anchor: String,
    pub mode: VerifyMode,
    pub params: Vec<String>,
    pub lhs: LhsTemplate,
    pub rhs: RhsTemplate,
    pub sweeps: Vec<Bindings>,
}

impl IdentityRecord {
    fn check_bindings(&self, bindings: &Bindings) -> Result<()> {
        for p in &self.params {
            if !bindings.contains_key(p) {
                return Err(Error::MissingParam(format!("{p} (required by {})", self.id)));
            }
        }
        for k in bindings.keys() {
            if !self.params.contains(k) {
                return Err(Error::Parse(format!("unexpected parameter `{k}` for {}", self.id)));
            }
        }
        Ok(())
    }
}

/// Structurally parametric series builders referenced by catalog entries.
fn build_series(name: &str, bindings: &Bindings) -> Result<SeriesSpec> {
    match name {
        // product form of the 1/pi family: the alternating
        // central-binomial-cube terms carry (4n+1) and are divided by
        // (2n-(2k-1))...(2n-1) and (n+1)...(n+k); the factor count grows
        // with k, hence a builder rather than a template.
        "levrie-product" => {
            let k = bindings
                .get("k")
                .ok_or_else(|| Error::MissingParam("k".into()))?;
            let k = crate::rational::as_small_nonneg_integer(k, 60)
                .filter(|&v| v >= 1)
                .ok_or_else(|| {
                    Error::Domain("builder levrie-product needs integer k in 1..=60".into())
                })?;
            let mut denom = Vec::new();
            for j in 1..=k as i64 {
                denom.push((rat_int(-(2 * j - 1)), rat_int(2)));
                denom.push((rat_int(j), rat_int(1)));
            }
            Ok(SeriesSpec {
                base: HyperSpec::new(
                    vec![rat(1, 2), rat(1, 2), rat(1, 2)],
                    vec![rat_int(1), rat_int(1)],
                    rat_int(-1),
                )?,
                weight: Weight::LinearFactor(rat_int(1), rat_int(4)),
                term_scale: Some(TermScale { constant: rat_int(1), numer: Vec::new(), denom }),
            })
        }
        other => Err(Error::UnknownId(format!("series builder `{other}`"))),
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    records: Vec<IdentityRecord>,
}

impl Catalog {
    /// The catalog embedded in the crate.
    pub fn load_default() -> Result<Catalog> {
        Self::from_json(DEFAULT_CATALOG)
    }

    /// Explicit path, else `HYPERSEED_CATALOG`, else the embedded default.
    pub fn load(path: Option<&Path>) -> Result<Catalog> {
        if let Some(p) = path {
            return Self::from_json(&std::fs::read_to_string(p)?);
        }
        if let Ok(p) = std::env::var(CATALOG_ENV) {
            return Self::from_json(&std::fs::read_to_string(p)?);
        }
        Self::load_default()
    }

    pub fn from_json(text: &str) -> Result<Catalog> {
        let wires: Vec<RecordWire> = serde_json::from_str(text)?;
        let mut records = Vec::with_capacity(wires.len());
        for w in wires {
            records.push(IdentityRecord::try_from(w)?);
        }
        let mut seen = BTreeSet::new();
        for r in &records {
            if !seen.insert(r.id.clone()) {
                return Err(Error::Parse(format!("duplicate catalog id `{}`", r.id)));
            }
        }
        Ok(Catalog { records })
    }

    /// All entries, sorted by id.
    pub fn entries(&self) -> Vec<&IdentityRecord> {
        let mut v: Vec<&IdentityRecord> = self.records.iter().collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    pub fn find(&self, id: &str) -> Result<&IdentityRecord> {
        self.records
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }
}

/// The default catalog's entries (sorted by id).
pub fn catalog_entries() -> Result<Vec<IdentityRecord>> {
    Ok(Catalog::load_default()?.entries().into_iter().cloned().collect())
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub digits: u32,
    pub max_terms: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { digits: 20, max_terms: 1_000_000 }
    }
}

/// Outcome of one verification. `pass` holds exactly when
/// `achieved_digits >= requested_digits`. Values are decimal strings
/// (exact `p/q` in exact mode), never floats, so nothing truncates
/// downstream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub requested_digits: u32,
    pub achieved_digits: u32,
    pub lhs_value: String,
    pub rhs_value: String,
    pub method: String,
    pub terms_used: u64,
    pub elapsed_ms: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Verify a catalog entry under the given parameter bindings.
pub fn verify(
    catalog: &Catalog,
    id: &str,
    bindings: &Bindings,
    opts: VerifyOptions,
) -> Result<VerificationReport> {
    verify_record(catalog.find(id)?, bindings, opts)
}

/// Verify a single record (also used for freshly derived records).
pub fn verify_record(
    record: &IdentityRecord,
    bindings: &Bindings,
    opts: VerifyOptions,
) -> Result<VerificationReport> {
    record.check_bindings(bindings)?;
    let start = Instant::now();
    let spec = record.lhs.substitute(bindings)?;
    let params_echo: BTreeMap<String, String> =
        bindings.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();

    match record.mode {
        VerifyMode::ExactTerminating => {
            let lhs = sum_terminating_exact(&spec)?;
            let rhs = record.rhs.exact_rational(bindings)?;
            let pass = lhs == rhs;
            let requested = opts.digits.max(1);
            Ok(VerificationReport {
                id: record.id.clone(),
                params: params_echo,
                requested_digits: requested,
                achieved_digits: if pass { requested } else { 0 },
                lhs_value: lhs.to_string(),
                rhs_value: rhs.to_string(),
                method: SumMethod::Exact.to_string(),
                terms_used: spec.termination_index().map(|t| t + 1).unwrap_or(0),
                elapsed_ms: start.elapsed().as_millis() as u64,
                pass,
                note: None,
            })
        }
        VerifyMode::Numeric => {
            let digits = opts.digits;
            let mut note = None;
            // terminating series need no acceleration and their alternating
            // tail is all zeros, so sum directly
            let sum = if spec.termination_index().is_some() {
                sum_direct(&spec, digits, opts.max_terms)?
            } else {
                match sum_accelerated(&spec, digits) {
                    Ok(s) => s,
                    Err(Error::AccelerationUnreliable { achieved, requested }) => {
                        note = Some(format!(
                            "acceleration unreliable ({achieved} of {requested} digits); fell back to direct summation"
                        ));
                        sum_direct(&spec, digits, opts.max_terms)?
                    }
                    Err(e) => return Err(e),
                }
            };
            let rhs_expr = record.rhs.to_const_expr(bindings)?;
            let rhs_val = eval_const(&rhs_expr, digits)?;
            let achieved = agree_digits(&sum.value, &rhs_val);
            let mut pass = achieved >= digits;
            if !sum.converged {
                pass = false;
                let extra = format!("summation did not converge within {} terms", opts.max_terms);
                note = Some(match note {
                    Some(n) => format!("{n}; {extra}"),
                    None => extra,
                });
            }
            Ok(VerificationReport {
                id: record.id.clone(),
                params: params_echo,
                requested_digits: digits,
                achieved_digits: achieved,
                lhs_value: sum.value.to_decimal(digits + 2),
                rhs_value: rhs_val.to_decimal(digits + 2),
                method: sum.method.to_string(),
                terms_used: sum.terms_used,
                elapsed_ms: start.elapsed().as_millis() as u64,
                pass,
                note,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// JSON wire format for catalog files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RecordWire {
    id: String,
    anchor: String,
    mode: String,
    #[serde(default)]
    params: Vec<String>,
    lhs: LhsWire,
    rhs: String,
    #[serde(default)]
    sweeps: Vec<BTreeMap<String, String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LhsWire {
    Builder { builder: String },
    Template(TemplateWire),
}

#[derive(Serialize, Deserialize)]
struct TemplateWire {
    upper: Vec<String>,
    lower: Vec<String>,
    argument: String,
    weight: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    term_scale: Option<ScaleWire>,
}

#[derive(Serialize, Deserialize)]
struct ScaleWire {
    constant: String,
    #[serde(default)]
    numer: Vec<[String; 2]>,
    #[serde(default)]
    denom: Vec<[String; 2]>,
}

fn weight_from_json(v: &serde_json::Value) -> Result<Weight> {
    crate::series::weight_from_value(v)
}

impl TryFrom<RecordWire> for IdentityRecord {
    type Error = Error;

    fn try_from(w: RecordWire) -> Result<Self> {
        let mode = match w.mode.as_str() {
            "exact" | "exact-terminating" => VerifyMode::ExactTerminating,
            "numeric" => VerifyMode::Numeric,
            other => return Err(Error::Parse(format!("unknown mode `{other}`"))),
        };
        let lhs = match w.lhs {
            LhsWire::Builder { builder } => LhsTemplate::Builder(builder),
            LhsWire::Template(t) => {
                let pe = |v: &Vec<String>| -> Result<Vec<ParamExpr>> {
                    v.iter().map(|s| s.parse()).collect()
                };
                LhsTemplate::Template(Box::new(SeriesTemplate {
                    upper: pe(&t.upper)?,
                    lower: pe(&t.lower)?,
                    argument: t.argument.parse()?,
                    weight: weight_from_json(&t.weight)?,
                    term_scale: t
                        .term_scale
                        .map(|s| -> Result<ScaleTemplate> {
                            let pair = |v: &Vec<[String; 2]>| -> Result<Vec<(ParamExpr, ParamExpr)>> {
                                v.iter().map(|[a, b]| Ok((a.parse()?, b.parse()?))).collect()
                            };
                            Ok(ScaleTemplate {
                                constant: s.constant.parse()?,
                                numer: pair(&s.numer)?,
                                denom: pair(&s.denom)?,
                            })
                        })
                        .transpose()?,
                }))
            }
        };
        let rhs: RhsTemplate = w.rhs.parse()?;
        let mut sweeps = Vec::with_capacity(w.sweeps.len());
        for s in &w.sweeps {
            let mut b = Bindings::new();
            for (k, v) in s {
                b.insert(k.clone(), parse_rational(v)?);
            }
            sweeps.push(b);
        }
        // sanity: every parameter the templates mention must be declared
        let mut used = BTreeSet::new();
        if let LhsTemplate::Template(t) = &lhs {
            t.vars(&mut used);
        }
        rhs.vars(&mut used);
        for v in &used {
            if !w.params.contains(v) {
                return Err(Error::Parse(format!(
                    "entry `{}` references undeclared parameter `{v}`",
                    w.id
                )));
            }
        }
        Ok(IdentityRecord {
            id: w.id,
            anchor: w.anchor,
            mode,
            params: w.params,
            lhs,
            rhs,
            sweeps,
        })
    }
}

impl Serialize for IdentityRecord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let lhs = match &self.lhs {
            LhsTemplate::Builder(b) => LhsWire::Builder { builder: b.clone() },
            LhsTemplate::Template(t) => LhsWire::Template(TemplateWire {
                upper: t.upper.iter().map(|e| e.to_string()).collect(),
                lower: t.lower.iter().map(|e| e.to_string()).collect(),
                argument: t.argument.to_string(),
                weight: crate::series::weight_to_value(&t.weight),
                term_scale: t.term_scale.as_ref().map(|s| ScaleWire {
                    constant: s.constant.to_string(),
                    numer: s.numer.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
                    denom: s.denom.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
                }),
            }),
        };
        let wire = RecordWire {
            id: self.id.clone(),
            anchor: self.anchor.clone(),
            mode: self.mode.to_string(),
            params: self.params.clone(),
            lhs,
            rhs: self.rhs.to_string(),
            sweeps: self
                .sweeps
                .iter()
                .map(|b| b.iter().map(|(k, v)| (k.clone(), v.to_string())).collect())
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl FromStr for IdentityRecord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wire: RecordWire = serde_json::from_str(s)?;
        IdentityRecord::try_from(wire)
    }
}
