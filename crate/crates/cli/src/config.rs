//! Config-file loading and flag/config merging.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;

pub const SEED_ENV: &str = "RELU_CONSTRUCTOR_SEED";

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Compute(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Compute(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl From<relu_constructor::Error> for CliError {
    fn from(e: relu_constructor::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Compute(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Reads the config file as JSON; unknown keys are rejected by the target type.
pub fn load_value(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| invalid(format!("config {} is not valid JSON: {e}", path.display())))?;
    if !v.is_object() {
        return Err(invalid("the config must be a JSON object"));
    }
    Ok(v)
}

pub fn parse<T: DeserializeOwned>(v: serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| invalid(format!("config schema: {e}")))
}

/// One value from either the flag or the config, never both.
pub fn pick<T>(name: &str, flag: Option<T>, config: Option<T>) -> Result<Option<T>, CliError> {
    match (flag, config) {
        (Some(_), Some(_)) => Err(invalid(format!("`{name}` is set both by a flag and in the config"))),
        (f, c) => Ok(f.or(c)),
    }
}

pub fn require<T>(name: &str, v: Option<T>) -> Result<T, CliError> {
    v.ok_or_else(|| invalid(format!("missing `{name}` (give the flag or the config key)")))
}

/// Seed from the flag or config (conflicts are errors), then the environment, then 0.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = pick("seed", flag, config)? {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| invalid(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}
