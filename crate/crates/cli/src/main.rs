//! Command-line front end: list and verify catalog identities, evaluate
//! ad-hoc series specs, run the sequence transform on files, and derive
//! identity records from input families.
//!
//! Exit codes: 0 all passed, 1 at least one verification failed, 2 usage
//! or domain error. Rationals on the command line are always `p/q` or
//! integer strings; decimal input is rejected so exactness is never lost
//! at the boundary. JSON output renders every numeric value as a string.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperseed_core::catalog::{
    self, Bindings, Catalog, IdentityRecord, VerificationReport, VerifyOptions,
};
use hyperseed_core::rational::parse_rational;
use hyperseed_core::series::{
    sum_accelerated, sum_direct, sum_terminating_exact, SeriesSpec, SumResult,
};
use hyperseed_core::transform::{
    derive_identity, forward_l, inverse_reconstruct, read_sequence_file, write_sequence_file,
    SequenceFamily, TransformParams,
};
use hyperseed_core::{bits_for_digits, BigFloat, Error};

#[derive(Parser)]
#[command(
    name = "hyperseed",
    version,
    about = "Derive and verify hypergeometric and 1/pi-type series identities at arbitrary precision"
)]
struct Cli {
    /// Decimal digits of agreement to require
    #[arg(long, global = true, default_value_t = 20)]
    digits: u32,

    /// Output format
    #[arg(long, global = true, value_parser = ["text", "json"], default_value = "text")]
    format: String,

    /// Term budget for direct summation fallbacks
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_terms: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Parameter binding, repeatable: --param a=1/2 --param n=5
    #[arg(long = "param", value_name = "NAME=P/Q")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog identities
    List,
    /// Verify one catalog identity against its closed form
    Verify {
        id: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Verify every catalog identity at its documented parameter sweeps
    VerifyAll,
    /// Evaluate an ad-hoc series described by a JSON spec file
    Eval {
        /// Path to a SeriesSpec JSON file
        #[arg(long)]
        input: PathBuf,
        /// Summation method (auto picks exact for terminating series,
        /// else acceleration with direct fallback)
        #[arg(long, value_parser = ["auto", "accelerated", "direct"], default_value = "auto")]
        method: String,
    },
    /// Apply the sequence transform to a file of rationals
    Transform {
        /// Transform parameter a (not a nonpositive integer)
        #[arg(long)]
        a: String,
        /// Input sequence file: one p/q per line, # comments allowed
        #[arg(long)]
        input: PathBuf,
        /// Output file; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
        /// Run the inverse reconstruction instead of the forward transform
        #[arg(long)]
        inverse: bool,
    },
    /// Derive the identity record for an input sequence family
    Derive {
        /// Family kind: inv-square-factorial, shifted-factorial,
        /// half-shift, or pochhammer-pair (which needs --param b=p/q)
        #[arg(long)]
        family: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Also verify the derived record (requires concrete a and n)
        #[arg(long)]
        check: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_params(args: &ParamArgs) -> Result<Bindings, Error> {
    let mut bindings = Bindings::new();
    for p in &args.params {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--param needs NAME=P/Q, got `{p}`")))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::Parse(format!("empty parameter name in `{p}`")));
        }
        bindings.insert(name.to_string(), parse_rational(value)?);
    }
    Ok(bindings)
}

fn run(cli: Cli) -> Result<bool, Error> {
    let json = cli.format == "json";
    let opts = VerifyOptions { digits: cli.digits, max_terms: cli.max_terms };
    match &cli.command {
        Command::List => {
            let catalog = Catalog::load(None)?;
            let entries = catalog.entries();
            if json {
                println!("{}", serde_json::to_string_pretty(&entries)?);
            } else {
                for r in entries {
                    let params = if r.params.is_empty() {
                        String::new()
                    } else {
                        format!("({})", r.params.join(", "))
                    };
                    println!("{:<22}{:<12}{:<19}{}", r.id, params, r.mode.to_string(), r.anchor);
                }
            }
            Ok(true)
        }
        Command::Verify { id, params } => {
            let catalog = Catalog::load(None)?;
            let bindings = parse_params(params)?;
            let report = catalog::verify(&catalog, id, &bindings, opts)?;
            print_report(&report, json);
            Ok(report.pass)
        }
        Command::VerifyAll => {
            let catalog = Catalog::load(None)?;
            let mut reports = Vec::new();
            for record in catalog.entries() {
                let sweeps: Vec<Bindings> = if record.sweeps.is_empty() {
                    vec![Bindings::new()]
                } else {
                    record.sweeps.clone()
                };
                for sweep in sweeps {
                    reports.push(catalog::verify_record(record, &sweep, opts)?);
                }
            }
            let all = reports.iter().all(|r| r.pass);
            if json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                for r in &reports {
                    println!("{}", summary_line(r));
                }
                let passed = reports.iter().filter(|r| r.pass).count();
                println!("{passed}/{} verifications passed", reports.len());
            }
            Ok(all)
        }
        Command::Eval { input, method } => {
            let text = std::fs::read_to_string(input)?;
            let spec: SeriesSpec = serde_json::from_str(&text)?;
            let result = eval_series(&spec, method, cli.digits, cli.max_terms)?;
            print_sum_result(&result, json, cli.digits);
            Ok(result.converged)
        }
        Command::Transform { a, input, output, inverse } => {
            let a = parse_rational(a)?;
            let seq = read_sequence_file(input)?;
            if seq.is_empty() {
                return Err(Error::Parse(format!("{} holds no sequence values", input.display())));
            }
            let params = TransformParams::new(a, seq.len() - 1)?;
            let out = if *inverse {
                inverse_reconstruct(&params, &seq)?
            } else {
                forward_l(&params, &seq)?
            };
            match output {
                Some(path) => write_sequence_file(path, &out)?,
                None => {
                    for r in &out {
                        println!("{}", hyperseed_core::rational::to_wire(r));
                    }
                }
            }
            Ok(true)
        }
        Command::Derive { family, params, check } => {
            let bindings = parse_params(params)?;
            let family = build_family(family, &bindings)?;
            let a = bindings.get("a").cloned();
            let n = bindings.get("n").cloned();
            let record = match (a, n) {
                (Some(a), Some(n)) => derive_identity(&family, Some((a, n)))?,
                (None, None) => derive_identity(&family, None)?,
                _ => {
                    return Err(Error::Parse(
                        "derive needs either both --param a= and --param n=, or neither".into(),
                    ))
                }
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&record)?);
            } else {
                print_record(&record);
            }
            if *check {
                let sweep = record.sweeps.first().cloned().ok_or_else(|| {
                    Error::Parse("--check needs concrete parameters (a and n)".into())
                })?;
                let report = catalog::verify_record(&record, &sweep, opts)?;
                print_report(&report, json);
                return Ok(report.pass);
            }
            Ok(true)
        }
    }
}

fn build_family(name: &str, bindings: &Bindings) -> Result<SequenceFamily, Error> {
    match name {
        "pochhammer-pair" => {
            let b = bindings
                .get("b")
                .cloned()
                .ok_or_else(|| Error::MissingParam("b (pochhammer-pair family)".into()))?;
            Ok(SequenceFamily::PochhammerPair(b))
        }
        "geometric-pochhammer" => {
            let y = bindings
                .get("y")
                .cloned()
                .ok_or_else(|| Error::MissingParam("y (geometric-pochhammer family)".into()))?;
            Ok(SequenceFamily::GeometricPochhammer(y))
        }
        other => other.parse(),
    }
}

fn eval_series(
    spec: &SeriesSpec,
    method: &str,
    digits: u32,
    max_terms: u64,
) -> Result<SumResult, Error> {
    match method {
        "direct" => sum_direct(spec, digits, max_terms),
        "accelerated" => sum_accelerated(spec, digits),
        _ => {
            if spec.termination_index().is_some() {
                match sum_terminating_exact(spec) {
                    Ok(value) => {
                        let prec = bits_for_digits(digits);
                        return Ok(SumResult {
                            value: BigFloat::from_rational(&value, prec),
                            error_bound: BigFloat::zero(prec),
                            terms_used: spec.termination_index().unwrap_or(0) + 1,
                            method: hyperseed_core::series::SumMethod::Exact,
                            converged: true,
                            heuristic_bound: false,
                        });
                    }
                    // harmonic-weighted terminating sums fall through
                    Err(Error::Domain(_)) => return sum_direct(spec, digits, max_terms),
                    Err(e) => return Err(e),
                }
            }
            match sum_accelerated(spec, digits) {
                Ok(r) => Ok(r),
                Err(Error::AccelerationUnreliable { .. }) => sum_direct(spec, digits, max_terms),
                Err(e) => Err(e),
            }
        }
    }
}

fn summary_line(r: &VerificationReport) -> String {
    let status = if r.pass { "PASS" } else { "FAIL" };
    let params = if r.params.is_empty() {
        String::new()
    } else {
        let pairs: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(" [{}]", pairs.join(", "))
    };
    format!(
        "{status} {}{params}: {}/{} digits ({}, {} terms, {} ms)",
        r.id, r.achieved_digits, r.requested_digits, r.method, r.terms_used, r.elapsed_ms
    )
}

fn print_report(r: &VerificationReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(r).expect("report serializes"));
        return;
    }
    println!("{}", summary_line(r));
    println!("  lhs = {}", r.lhs_value);
    println!("  rhs = {}", r.rhs_value);
    if let Some(note) = &r.note {
        println!("  note: {note}");
    }
}

fn print_sum_result(r: &SumResult, json: bool, digits: u32) {
    let places = digits + 2;
    if json {
        let out = serde_json::json!({
            "value": r.value.to_decimal(places),
            "error_bound": r.error_bound.to_decimal(places),
            "terms_used": r.terms_used,
            "method": r.method.to_string(),
            "converged": r.converged,
            "heuristic_bound": r.heuristic_bound,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("result serializes"));
        return;
    }
    println!("value       = {}", r.value.to_decimal(places));
    println!(
        "error bound = {}{}",
        r.error_bound.to_decimal(places),
        if r.heuristic_bound { " (heuristic two-level estimate)" } else { "" }
    );
    println!(
        "method      = {}, terms used = {}, converged = {}",
        r.method, r.terms_used, r.converged
    );
}

fn print_record(r: &IdentityRecord) {
    println!("id:     {}", r.id);
    println!("mode:   {}", r.mode);
    println!(
        "params: {}",
        if r.params.is_empty() { "(none)".into() } else { r.params.join(", ") }
    );
    println!("rhs:    {}", r.rhs);
    println!("anchor: {}", r.anchor);
    if let Ok(text) = serde_json::to_string_pretty(r) {
        println!("record:\n{text}");
    }
}
