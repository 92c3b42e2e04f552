//! Flat `key = value` configuration files.
//!
//! One setting per line. `#` starts a comment, either on its own line or
//! after a value. Lists are comma separated and may be wrapped in square
//! brackets: `nbar = [0, 0.1, 0.5]` and `nbar = 0, 0.1, 0.5` are the same.
//! Keys may appear once; unknown keys are rejected by the consumer.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    line: usize,
    raw: String,
}

/// Parsed key-value pairs, with line numbers kept for error messages.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, Entry>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                Error::config(
                    format!("line {line_no}"),
                    format!("expected `key = value`, got `{content}`"),
                )
            })?;
            let key = key.trim().to_string();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::config(
                    format!("line {line_no}"),
                    format!("invalid key `{key}`"),
                ));
            }
            let entry = Entry {
                line: line_no,
                raw: value.trim().to_string(),
            };
            if let Some(prev) = entries.insert(key.clone(), entry) {
                return Err(Error::config(
                    key,
                    format!("duplicate key (first set on line {})", prev.line),
                ));
            }
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Fails on the first key not in `allowed`.
    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(Error::config(k, "unknown key")),
            None => Ok(()),
        }
    }

    fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(|e| parse_f64(key, &e.raw)).transpose()
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(key)
            .map(|e| {
                split_list(&e.raw)
                    .into_iter()
                    .map(|item| parse_f64(key, item))
                    .collect()
            })
            .transpose()
    }

    pub fn u32(&self, key: &str) -> Result<Option<u32>> {
        self.raw(key)
            .map(|e| {
                e.raw.parse::<u32>().map_err(|_| {
                    Error::config(
                        key,
                        format!("expected a non-negative integer, got `{}`", e.raw),
                    )
                })
            })
            .transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.u32(key)?.map(|v| v as usize))
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.raw(key)
            .map(|e| match e.raw.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(Error::config(
                    key,
                    format!("expected true or false, got `{other}`"),
                )),
            })
            .transpose()
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(|e| PathBuf::from(unquote(&e.raw)))
    }
}

fn unquote(s: &str) -> &str {
    s.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(s)
}

fn split_list(raw: &str) -> Vec<&str> {
    let inner = raw
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(raw);
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::config(key, format!("expected a number, got `{raw}`")))?;
    if !v.is_finite() {
        return Err(Error::config(key, format!("must be finite, got `{raw}`")));
    }
    Ok(v)
}
