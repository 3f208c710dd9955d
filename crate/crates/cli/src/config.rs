//! Flat `key = value` configuration files: `#` comments, one pair per
//! line, duplicate keys rejected, and strict unknown-key rejection so
//! typos fail loudly with a line-addressed message.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: Vec<Entry>,
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut entries: Vec<Entry> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {line}: expected `key = value`, got `{trimmed}`"
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {line}: empty key")));
            }
            if let Some(prev) = entries.iter().find(|e| e.key == key) {
                return Err(CliError::Config(format!(
                    "line {line}: duplicate key `{key}` (first set on line {})",
                    prev.line
                )));
            }
            entries.push(Entry { key, value, line });
        }
        Ok(Self { entries })
    }

    fn find(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    /// Reject any key outside the allowed set for the command at hand.
    pub fn ensure_only(&self, allowed: &[&str]) -> Result<(), CliError> {
        let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
        for e in &self.entries {
            if !allowed.contains(e.key.as_str()) {
                return Err(CliError::Config(format!(
                    "line {}: unknown key `{}`; allowed keys: {}",
                    e.line,
                    e.key,
                    allowed.iter().copied().collect::<Vec<_>>().join(", ")
                )));
            }
        }
        Ok(())
    }

    fn parsed<T: FromStr>(&self, e: &Entry) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        e.value.parse::<T>().map_err(|err| {
            CliError::Config(format!(
                "line {}: field `{}`: cannot parse `{}`: {err}",
                e.line, e.key, e.value
            ))
        })
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let e = self
            .find(key)
            .ok_or_else(|| CliError::Config(format!("missing required field `{key}`")))?;
        self.parsed(e)
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        match self.find(key) {
            Some(e) => self.parsed(e),
            None => Ok(default),
        }
    }

    pub fn require_str(&self, key: &str) -> Result<&str, CliError> {
        self.find(key)
            .map(|e| e.value.as_str())
            .ok_or_else(|| CliError::Config(format!("missing required field `{key}`")))
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.find(key).map(|e| e.value.as_str())
    }

    /// Comma-separated list field, e.g. `grids = 51, 101, 201`.
    pub fn require_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError>
    where
        T::Err: Display,
    {
        let e = self
            .find(key)
            .ok_or_else(|| CliError::Config(format!("missing required field `{key}`")))?;
        e.value
            .split(',')
            .map(|part| {
                part.trim().parse::<T>().map_err(|err| {
                    CliError::Config(format!(
                        "line {}: field `{}`: cannot parse `{}`: {err}",
                        e.line,
                        e.key,
                        part.trim()
                    ))
                })
            })
            .collect()
    }
}
