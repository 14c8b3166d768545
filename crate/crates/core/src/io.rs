//! JSON matrix files.
//!
//! ```json
//! {"ring": "zmod:97", "n": 4, "indexing": "wedge2", "entries": ["1", "0", ...]}
//! ```
//!
//! `entries` is row-major over the lex order of the index sets. Nested row
//! arrays and bare JSON integers are accepted on input; output always uses a
//! flat array of strings.

use serde_json::{json, Value};
use thiserror::Error;

use crate::exalg::{Indexing, MatrixError, SquareMatrix};
use crate::scalar::{RingTag, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FileError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("bad field {field:?}: {reason}")]
    Field { field: &'static str, reason: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn field(field: &'static str, reason: impl Into<String>) -> FileError {
    FileError::Field {
        field,
        reason: reason.into(),
    }
}

pub fn indexing_name(indexing: Indexing) -> String {
    match indexing {
        Indexing::Plain(_) => "plain".to_string(),
        Indexing::Wedge { m, .. } => format!("wedge{m}"),
    }
}

fn parse_indexing(name: &str, n: usize) -> Result<Indexing, FileError> {
    if name == "plain" {
        return Ok(Indexing::Plain(n));
    }
    let m = name
        .strip_prefix("wedge")
        .and_then(|m| m.parse::<usize>().ok())
        .ok_or_else(|| field("indexing", format!("unknown scheme {name:?}")))?;
    if m == 0 || m > n {
        return Err(field("indexing", format!("wedge{m} needs 1 <= {m} <= n = {n}")));
    }
    Ok(Indexing::Wedge { m, n })
}

fn scalar_text(v: &Value) -> Result<String, FileError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(x) if x.is_i64() || x.is_u64() => Ok(x.to_string()),
        other => Err(field("entries", format!("expected a scalar string, got {other}"))),
    }
}

pub fn matrix_from_json(value: &Value) -> Result<SquareMatrix, FileError> {
    let obj = value.as_object().ok_or_else(|| field("<root>", "expected an object"))?;
    let ring: RingTag = obj
        .get("ring")
        .and_then(Value::as_str)
        .ok_or_else(|| field("ring", "missing"))?
        .parse()?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| field("n", "missing or not a non-negative integer"))? as usize;
    let indexing = match obj.get("indexing") {
        None => Indexing::Plain(n),
        Some(v) => parse_indexing(v.as_str().ok_or_else(|| field("indexing", "not a string"))?, n)?,
    };
    let raw = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| field("entries", "missing or not an array"))?;
    let mut flat = Vec::new();
    for item in raw {
        match item {
            Value::Array(row) => {
                for v in row {
                    flat.push(scalar_text(v)?);
                }
            }
            v => flat.push(scalar_text(v)?),
        }
    }
    let entries = flat
        .iter()
        .map(|t| Scalar::parse(ring, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SquareMatrix::new(ring, indexing, entries)?)
}

pub fn matrix_to_json(m: &SquareMatrix) -> Value {
    json!({
        "ring": m.ring().to_string(),
        "n": m.indexing().base_rank(),
        "indexing": indexing_name(m.indexing()),
        "entries": m.entries().iter().map(Scalar::to_string).collect::<Vec<_>>(),
    })
}

pub fn parse_matrix(text: &str) -> Result<SquareMatrix, FileError> {
    let value: Value = serde_json::from_str(text).map_err(|e| FileError::Json(e.to_string()))?;
    matrix_from_json(&value)
}

pub fn format_matrix(m: &SquareMatrix) -> String {
    let mut s = serde_json::to_string(&matrix_to_json(m)).expect("json values serialize");
    s.push('\n');
    s
}
