//! Shared pieces of the `dbp` and `perr` command-line tools.
//!
//! Single results are printed as JSON, sweeps as CSV. Every CSV starts with
//! a `# config-hash: <sha256>` line followed by the column header; the hash
//! covers the subcommand name and its parsed arguments, so identical
//! invocations produce identical bytes.
//!
//! Exit codes: 0 success, 1 other failures, 2 failed preconditions or
//! conditions, 3 parse errors (command line, lattice files, source specs).

pub mod dbp;
pub mod figures;
pub mod perr;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::lattice::{catalog_lookup, parse_lattice_file, LatticeBasis, LatticeError};
use crate::protocol::ProtocolError;

pub use figures::{run_fig3, run_fig5, run_fig7, run_fig8, run_table1, Fig3Row, Fig5Row, Fig7Row, Fig8Row, Table1Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Other(_) => EXIT_OTHER,
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Parse { .. }
            | LatticeError::Format(_)
            | LatticeError::DimensionMismatch(_)
            | LatticeError::UnknownLattice(_)
            | LatticeError::Scalar(_) => CliError::Parse(e.to_string()),
            LatticeError::UnsupportedDimension { .. } | LatticeError::Linalg(_) => CliError::Precondition(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Lattice(l) => l.into(),
            e if e.is_condition() => CliError::Precondition(e.to_string()),
            e => CliError::Other(e.to_string()),
        }
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::NoRationalWithinTolerance { .. }
            | ProtocolError::UnsupportedForExact(_)
            | ProtocolError::BudgetExceeded { .. }
            | ProtocolError::Overflow { .. } => CliError::Precondition(e.to_string()),
            e => CliError::Other(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format (sweeps default to CSV, single reports to JSON).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Largest denominator accepted when recovering basis ratios from decimals.
    #[arg(long = "tol-max-den", global = true, default_value_t = crate::protocol::DEFAULT_MAX_DEN)]
    pub tol_max_den: u64,
    /// Tolerance when recovering basis ratios from decimals.
    #[arg(long = "tol-ratio", global = true, default_value_t = crate::protocol::DEFAULT_RATIO_TOL)]
    pub tol_ratio: f64,
}

/// A path to a lattice file, or a catalog name when no such file exists.
pub fn load_lattice(spec: &str) -> Result<LatticeBasis, CliError> {
    if Path::new(spec).is_file() {
        return Ok(parse_lattice_file(spec)?);
    }
    let entry = catalog_lookup(spec)?;
    entry.basis.ok_or_else(|| CliError::Precondition(format!("catalog entry '{spec}' has no explicit basis")))
}

/// Hex SHA-256 of the subcommand name and its serialised configuration.
pub fn config_hash<C: Serialize>(name: &str, config: &C) -> String {
    let json = serde_json::to_string(config).unwrap_or_default();
    let digest = Sha256::digest(format!("{name}\n{json}").as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// CSV text with the config-hash comment line and a header row.
pub fn to_csv<R: Serialize>(rows: &[R], hash: &str) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Other(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| CliError::Other(e.to_string()))?;
    Ok(format!("# config-hash: {hash}\n{}", String::from_utf8_lossy(&body)))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| CliError::Other(e.to_string()))
}

/// Renders sweep rows in the requested format (CSV by default).
pub fn sweep_output<R: Serialize, C: Serialize>(rows: &[R], name: &str, config: &C, format: Option<Format>) -> Result<String, CliError> {
    match format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(rows, &config_hash(name, config)),
        Format::Json => to_json(&rows),
    }
}

pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Other(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Other(e.to_string()))
        }
    }
}

/// Parses `args` with clap, runs `run`, prints the result, and returns the
/// exit code. Usage errors map to [`EXIT_PARSE`].
pub fn drive<P, F>(args: impl IntoIterator<Item = OsString>, run: F) -> i32
where
    P: clap::Parser,
    F: FnOnce(P) -> Result<(String, Option<PathBuf>), CliError>,
{
    let parsed = match P::try_parse_from(args) {
        Ok(p) => p,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(parsed).and_then(|(text, out)| write_output(out.as_deref(), &text)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
