//! JSON lattice files: `{"n": 3, "basis": [[...], [...], [...]]}`.
//!
//! Each inner list is one basis vector (a column of `V`). Entries are JSON
//! numbers (read through their decimal text, so `0.311` is exactly
//! `311/1000`) or strings in the scalar grammar: `"p/q"`, `"1.25"`,
//! `"2/3*sqrt(2)"`, `"-sqrt(3)/2"`, `"1/sqrt(5)"`.

use std::path::Path;

use serde_json::Value;

use super::{LatticeBasis, LatticeError};
use crate::scalar::{Rational, ScalarExpr};

pub fn parse_lattice_file(path: impl AsRef<Path>) -> Result<LatticeBasis, LatticeError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| LatticeError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_lattice_json(&text)
}

pub fn parse_lattice_json(text: &str) -> Result<LatticeBasis, LatticeError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| LatticeError::Format(e.to_string()))?;
    let n = doc
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| LatticeError::Format("missing positive integer field 'n'".into()))? as usize;
    let basis = doc
        .get("basis")
        .and_then(Value::as_array)
        .ok_or_else(|| LatticeError::Format("missing array field 'basis'".into()))?;
    if basis.len() != n {
        return Err(LatticeError::DimensionMismatch(format!("n = {n} but {} basis vectors given", basis.len())));
    }
    let mut cols = Vec::with_capacity(n);
    for (j, vector) in basis.iter().enumerate() {
        let entries = vector.as_array().ok_or_else(|| LatticeError::Parse {
            vector: j,
            component: 0,
            message: "basis vector is not an array".into(),
        })?;
        if entries.len() != n {
            return Err(LatticeError::DimensionMismatch(format!(
                "basis vector {j} has {} components, expected {n}",
                entries.len()
            )));
        }
        let col = entries
            .iter()
            .enumerate()
            .map(|(i, e)| parse_entry(e).map_err(|message| LatticeError::Parse { vector: j, component: i, message }))
            .collect::<Result<Vec<_>, _>>()?;
        cols.push(col);
    }
    LatticeBasis::from_columns(cols)
}

fn parse_entry(e: &Value) -> Result<ScalarExpr, String> {
    match e {
        Value::Number(num) => num
            .to_string()
            .parse::<Rational>()
            .map(ScalarExpr::rational)
            .map_err(|err| err.to_string()),
        Value::String(s) => s.parse::<ScalarExpr>().map_err(|err| err.to_string()),
        other => Err(format!("expected number or string, got {other}")),
    }
}

/// Serialises a basis back to the file format (exact entries as strings).
pub fn to_lattice_json(b: &LatticeBasis) -> String {
    let basis: Vec<Vec<String>> = b.columns().iter().map(|c| c.iter().map(ToString::to_string).collect()).collect();
    serde_json::json!({ "n": b.dim(), "basis": basis }).to_string()
}
