//! `--config` documents and the error type shared by all commands.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use jmcert::input::{parse_json, InputError};
use serde_json::{Map, Value};

/// Malformed input: bad flags, unreadable or invalid files, divergent orderings.
pub const EXIT_INPUT: u8 = 2;
/// The evaluation ran and found a failure (oracle item, table mismatch, I/O on output).
pub const EXIT_FAILURE: u8 = 1;
/// `certify --fail-if-not-broken` and the channel does not break the set.
pub const EXIT_NOT_BROKEN: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self { code: EXIT_FAILURE, message: message.into() }
    }

    /// An input error located in `origin` (a file path or config key).
    pub fn located(origin: &str, err: InputError) -> Self {
        Self::input(format!("{origin}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: cannot read: {e}", path.display())))
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    parse_json(&read_text(path)?).map_err(|e| CliError::located(&path.display().to_string(), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::failure(format!("{}: cannot write: {e}", path.display())))
}

/// Defaults read from a JSON object; command-line flags take precedence.
///
/// File references inside the document are resolved against its directory.
#[derive(Debug, Default)]
pub struct FileConfig {
    values: Map<String, Value>,
    origin: String,
    base: PathBuf,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let origin = path.display().to_string();
        let values = match read_json(path)? {
            Value::Object(map) => map,
            _ => return Err(CliError::input(format!("{origin}: config must be a JSON object"))),
        };
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { values, origin, base })
    }

    /// Rejects keys the command does not use, and a `command` entry naming another command.
    pub fn restrict(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        if let Some(v) = self.values.get("command") {
            if v.as_str() != Some(command) {
                return Err(self.error("command", format!("config is for command {v}, not `{command}`")));
            }
        }
        for key in self.values.keys() {
            if key != "command" && key != "format" && !allowed.contains(&key.as_str()) {
                let mut known: Vec<&str> = allowed.to_vec();
                known.push("format");
                return Err(self.error(key, format!("not an option of `{command}` (expected one of {})", known.join(", "))));
            }
        }
        Ok(())
    }

    fn error(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::located(&self.origin, InputError::field(key, message))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| self.error(key, format!("expected a finite number, found {v}"))),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| self.error(key, format!("expected a non-negative integer, found {v}"))),
        }
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.as_bool().map(Some).ok_or_else(|| self.error(key, format!("expected true or false, found {v}"))),
        }
    }

    pub fn string(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| self.error(key, format!("expected a string, found {v}"))),
        }
    }

    /// A single string or an array of strings.
    pub fn strings(&self, key: &str) -> Result<Vec<String>, CliError> {
        match self.values.get(key) {
            None => Ok(Vec::new()),
            Some(Value::String(s)) => Ok(vec![s.clone()]),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_str().map(str::to_string).ok_or_else(|| self.error(key, "expected strings")))
                .collect(),
            Some(v) => Err(self.error(key, format!("expected a string or an array of strings, found {v}"))),
        }
    }

    pub fn path(&self, key: &str) -> Result<Option<PathBuf>, CliError> {
        Ok(self.string(key)?.map(|p| self.base.join(p)))
    }

    /// An inline JSON document, or a string naming a file that holds one.
    /// Returns the document with a label for diagnostics.
    pub fn document(&self, key: &str) -> Result<Option<(String, Value)>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::String(p)) => {
                let path = self.base.join(p);
                Ok(Some((path.display().to_string(), read_json(&path)?)))
            }
            Some(v) => Ok(Some((format!("{} ({key})", self.origin), v.clone()))),
        }
    }
}

/// The document behind a `--flag PATH` option or its config fallback.
pub fn document(
    flag: Option<&PathBuf>,
    config: &FileConfig,
    key: &str,
) -> Result<(String, Value), CliError> {
    if let Some(path) = flag {
        return Ok((path.display().to_string(), read_json(path)?));
    }
    config
        .document(key)?
        .ok_or_else(|| CliError::input(format!("missing --{}", key.replace('_', "-"))))
}
