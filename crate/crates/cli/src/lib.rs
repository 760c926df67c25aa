//! Command-line front end for `ouroboros-core`.
//!
//! [`run`] takes the argument vector and two writers and returns the process
//! exit code, so the binary is a thin wrapper and tests can drive it in
//! process.

mod args;
mod help;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use ouroboros_core::analysis::{compare_fix_and_image, AnalysisError};
use ouroboros_core::catalog::{catalog, lookup, mean, Expected};
use ouroboros_core::checker::{check, check_mean_sweep, CheckConfig, CheckError, Status};
use ouroboros_core::domain::{parse_domain, parse_signature, DomainError};
use ouroboros_core::expr::{parse, DefinitionError, ParseError};
use ouroboros_core::slln::{
    doubling_checkpoints, membership_sweep, simulate_path, DistributionError, DistributionSpec, SimulationError,
};
use ouroboros_core::{Domain, DomainSignature, FunctionDef};
use thiserror::Error;

use args::{CheckArgs, Cli, Command, Format, OutputArgs, SllnArgs, SweepArgs, Tolerance};
use report::{config_line, CatalogRecord, CheckRecord, TraceRecord};

pub use help::SYNTAX_HELP;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNDEFINED: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Largest variable index accepted when the arity is inferred from the body.
const MAX_INFERRED_ARITY: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown catalog function `{0}`; run `ouroboros catalog` for the list")]
    UnknownName(String),
    #[error("`{name}` takes {arity} arguments but the domain has {got} factors")]
    ArityMismatch { name: String, arity: usize, got: usize },
    #[error("expression: {0}")]
    Parse(#[from] ParseError),
    #[error("domain: {0}")]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Definition(#[from] DefinitionError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error("{format} output is not available for `{command}`")]
    Format {
        format: &'static str,
        command: &'static str,
    },
    #[error("writing {path}: {source}")]
    Output { path: String, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    /// Errors caused by malformed input get the syntax reference appended.
    fn wants_syntax_help(&self) -> bool {
        matches!(
            self,
            CliError::Parse(_) | CliError::Domain(_) | CliError::Definition(_) | CliError::ArityMismatch { .. }
        )
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Holds | Status::HoldsProbably => EXIT_HOLDS,
        Status::Fails => EXIT_FAILS,
        Status::Undefined => EXIT_UNDEFINED,
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code. Reports go to `out` unless `--out` is given; diagnostics and
/// the CSV config echo go to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let sink: &mut dyn Write = if informational { out } else { err };
            let _ = write!(sink, "{}", e.render());
            if informational {
                return EXIT_HOLDS;
            }
            let _ = write!(err, "\n{SYNTAX_HELP}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.wants_syntax_help() {
                let _ = write!(err, "\n{SYNTAX_HELP}");
            }
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Check(a) => run_check(a, false, out, err),
        Command::Image(a) => run_check(a, true, out, err),
        Command::Slln(a) => run_slln(a, out, err),
        Command::Sweep(a) => run_sweep(a, out, err),
        Command::Catalog(a) => run_catalog(a, out),
    }
}

fn config(t: &Tolerance) -> Result<CheckConfig, CliError> {
    let cfg = CheckConfig {
        sample_count: t.samples,
        eps_abs: t.eps_abs,
        eps_rel: t.eps_rel,
        seed: t.seed,
        ..CheckConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// A one-factor signature given for an n-ary function stands for its n-th power.
fn fit_signature(sig: DomainSignature, arity: usize) -> Result<DomainSignature, CliError> {
    if sig.arity() == 1 && arity > 1 {
        let base = sig.factor(0).clone();
        return Ok(DomainSignature::power(base, arity)?);
    }
    Ok(sig)
}

/// Builds the function named by `--name` or written with `--fn`, over `--domain`.
pub fn resolve_function(expr: Option<&str>, name: Option<&str>, domain: Option<&str>) -> Result<FunctionDef, CliError> {
    let sig = domain.map(parse_signature).transpose()?;
    if let Some(name) = name {
        let def = lookup(name).ok_or_else(|| CliError::UnknownName(name.to_string()))?.def;
        return match sig {
            Some(sig) => {
                let sig = fit_signature(sig, def.arity())?;
                if sig.arity() != def.arity() {
                    return Err(CliError::ArityMismatch {
                        arity: def.arity(),
                        name: def.name,
                        got: sig.arity(),
                    });
                }
                Ok(def.with_signature(sig)?)
            }
            None => Ok(def),
        };
    }
    let text = expr.unwrap_or_default();
    let body = parse(text, MAX_INFERRED_ARITY)?;
    let used = body.max_var().max(1);
    let sig = match sig {
        Some(sig) => {
            let sig = fit_signature(sig, used)?;
            // reparse so an out-of-range variable is reported with its position
            parse(text, sig.arity())?;
            sig
        }
        None => DomainSignature::power(Domain::AllReals, used)?,
    };
    Ok(FunctionDef::new("f", body, sig, Domain::AllReals)?)
}

fn run_check(a: CheckArgs, with_image: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let f = resolve_function(a.expr.as_deref(), a.name.as_deref(), a.domain.as_deref())?;
    let cfg = config(&a.tolerance)?;
    let verdict = check(&f, &cfg)?;
    let mut record = CheckRecord::new(&f, &verdict, &cfg);
    if with_image {
        record.image = match compare_fix_and_image(&f, &cfg) {
            Ok(r) => Some((&r).into()),
            // the verdict already carries the witness
            Err(AnalysisError::Undefined(_)) => None,
            Err(e) => {
                return Err(match e {
                    AnalysisError::Check(c) => c.into(),
                    other => unreachable!("compare_fix_and_image has no precondition: {other}"),
                })
            }
        };
    }
    let command = if with_image { "image" } else { "check" };
    emit_records(&[record], command, &a.output, out, err)?;
    Ok(exit_code(verdict.status))
}

fn emit_records(
    records: &[CheckRecord],
    command: &'static str,
    o: &OutputArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let first = &records[0];
    let bytes = match o.format {
        Format::Json => {
            let mut s = if records.len() == 1 && command != "sweep" {
                serde_json::to_string_pretty(first)?
            } else {
                serde_json::to_string_pretty(records)?
            };
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            if command == "image" {
                return Err(CliError::Format { format: "csv", command });
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CheckRecord::CSV_HEADER)?;
            for r in records {
                w.write_record(r.csv_row())?;
            }
            writeln!(err, "{}", config_line(first.seed, &first.config).trim_end())?;
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))?
        }
        Format::Text => {
            let mut s = String::new();
            for r in records {
                s.push_str(&r.text());
                s.push('\n');
            }
            s.push_str(&config_line(first.seed, &first.config));
            s.into_bytes()
        }
    };
    deliver(&bytes, o.out.as_deref(), out)
}

fn deliver(bytes: &[u8], path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Output {
            path: p.display().to_string(),
            source,
        }),
        None => Ok(out.write_all(bytes)?),
    }
}

fn run_slln(a: SllnArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let dist = DistributionSpec::parse(&a.dist)?;
    let checkpoints = a.checkpoints.unwrap_or_else(|| doubling_checkpoints(a.n_max));
    let trace = simulate_path(&dist, a.n_max, &checkpoints, a.seed)?;
    let record = TraceRecord::from(&trace);
    let bytes = match a.output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&record)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "running_mean", "analytic_mean", "abs_error"])?;
            for c in &record.checkpoints {
                w.write_record([
                    c.n.to_string(),
                    c.running_mean.to_string(),
                    record.analytic_mean.to_string(),
                    c.abs_error.to_string(),
                ])?;
            }
            writeln!(
                err,
                "distribution {}  seed {}  n_max {}",
                record.distribution, a.seed, a.n_max
            )?;
            writeln!(err, "note: {}", report::PATH_NOTE)?;
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))?
        }
        Format::Text => record.text().into_bytes(),
    };
    deliver(&bytes, a.output.out.as_deref(), out)?;
    Ok(EXIT_HOLDS)
}

fn run_sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = config(&a.tolerance)?;
    let base = match &a.domain {
        Some(text) => parse_domain(text)?,
        None => Domain::AllReals,
    };
    let (results, dist) = match &a.dist {
        Some(text) => {
            let d = DistributionSpec::parse(text)?;
            (membership_sweep(&d, &a.arities, &cfg)?, Some(d.to_string()))
        }
        None => (check_mean_sweep(&base, &a.arities, &cfg)?, None),
    };
    let mut records = Vec::with_capacity(results.len());
    for (n, v) in &results {
        // distribution sweeps draw from the distribution but nominally live on R^n
        let f = mean(*n).with_signature(DomainSignature::power(base.clone(), *n)?)?;
        let mut r = CheckRecord::new(&f, v, &cfg);
        r.n = Some(*n);
        r.distribution = dist.clone();
        records.push(r);
    }
    if records.is_empty() {
        return Err(CliError::Simulation(SimulationError::Checkpoints));
    }
    emit_records(&records, "sweep", &a.output, out, err)?;
    let worst = results
        .iter()
        .map(|(_, v)| exit_code(v.status))
        .max()
        .unwrap_or(EXIT_HOLDS);
    Ok(worst)
}

fn run_catalog(o: OutputArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let records: Vec<CatalogRecord> = catalog()
        .into_iter()
        .map(|e| CatalogRecord {
            name: e.def.name.clone(),
            expression: e.def.body.to_string(),
            signature: e.def.signature.to_string(),
            codomain: e.def.codomain.to_string(),
            expected: match e.expected {
                Expected::Member => "member",
                Expected::Fails => "fails",
                Expected::Undefined => "undefined",
            },
            note: e.note,
        })
        .collect();
    let bytes = match o.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&records)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(r)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))?
        }
        Format::Text => {
            let mut s = String::new();
            for r in &records {
                s.push_str(&format!(
                    "{:<10} {:<10} {:<24} {:<12} {}\n",
                    r.name, r.expected, r.signature, r.codomain, r.expression
                ));
            }
            s.into_bytes()
        }
    };
    deliver(&bytes, o.out.as_deref(), out)?;
    Ok(EXIT_HOLDS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_map_to_exit_codes() {
        assert_eq!(exit_code(Status::Holds), 0);
        assert_eq!(exit_code(Status::HoldsProbably), 0);
        assert_eq!(exit_code(Status::Fails), 1);
        assert_eq!(exit_code(Status::Undefined), 2);
    }

    #[test]
    fn arity_is_inferred_from_the_body() {
        let f = resolve_function(Some("x3 - x1"), None, None).unwrap();
        assert_eq!(f.signature.to_string(), "R^3");
        let g = resolve_function(Some("7"), None, Some("Z")).unwrap();
        assert_eq!(g.arity(), 1);
        let h = resolve_function(Some("x1 * x2"), None, Some("R x Z")).unwrap();
        assert_eq!(h.signature.to_string(), "R x Z");
        assert!(matches!(
            resolve_function(Some("x3"), None, Some("R x Z")),
            Err(CliError::Parse(_))
        ));
    }

    #[test]
    fn catalog_arity_mismatch_is_rejected() {
        let e = resolve_function(None, Some("min_2"), Some("R^3")).unwrap_err();
        assert!(matches!(e, CliError::ArityMismatch { arity: 2, got: 3, .. }), "{e}");
    }
}
