//! Field-level diagnostics for the JSON input formats.

use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InputError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl InputError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        InputError::Field { field: field.into(), message: message.into() }
    }

    /// Prefixes the field path, e.g. `tau` → `channel.tau`.
    pub fn within(self, prefix: &str) -> Self {
        match self {
            InputError::Field { field, message } => InputError::Field {
                field: if field.is_empty() {
                    prefix.to_string()
                } else if field.starts_with('[') {
                    format!("{prefix}{field}")
                } else {
                    format!("{prefix}.{field}")
                },
                message,
            },
            other => other,
        }
    }
}

pub fn parse_json(text: &str) -> Result<Value, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub(crate) fn as_object<'a>(value: &'a Value, what: &str) -> Result<&'a Map<String, Value>, InputError> {
    value
        .as_object()
        .ok_or_else(|| InputError::field("", format!("{what} must be a JSON object")))
}

pub(crate) fn optional_f64(obj: &Map<String, Value>, key: &str) -> Result<Option<f64>, InputError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => n
            .as_f64()
            .filter(|v| v.is_finite())
            .map(Some)
            .ok_or_else(|| InputError::field(key, "expected a finite number")),
        Some(other) => Err(InputError::field(key, format!("expected a number, found {other}"))),
    }
}

pub(crate) fn required_f64(obj: &Map<String, Value>, key: &str) -> Result<f64, InputError> {
    optional_f64(obj, key)?.ok_or_else(|| InputError::field(key, "missing required number"))
}

pub(crate) fn optional_str<'a>(
    obj: &'a Map<String, Value>,
    key: &str,
) -> Result<Option<&'a str>, InputError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(InputError::field(key, format!("expected a string, found {other}"))),
    }
}

pub(crate) fn f64_vector(value: &Value, field: &str) -> Result<Vec<f64>, InputError> {
    let items = value
        .as_array()
        .ok_or_else(|| InputError::field(field, "expected an array of numbers"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| InputError::field(format!("{field}[{i}]"), "expected a finite number"))
        })
        .collect()
}

pub(crate) fn f64_rows(value: &Value, field: &str) -> Result<Vec<Vec<f64>>, InputError> {
    let rows = value
        .as_array()
        .ok_or_else(|| InputError::field(field, "expected an array of rows"))?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| f64_vector(row, &format!("{field}[{i}]")))
        .collect()
}

/// Rejects keys outside `allowed`, so typos surface as diagnostics.
pub(crate) fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str]) -> Result<(), InputError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(InputError::field(
            k.as_str(),
            format!("unknown field (expected one of {})", allowed.join(", ")),
        )),
        None => Ok(()),
    }
}
