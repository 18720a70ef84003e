//! Flat `key = value` config files. Keys are long flag names without the
//! leading dashes; flags given on the command line take precedence.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use trajrot_core::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
            let key = k.trim().trim_start_matches("--").to_string();
            if key.is_empty() {
                return Err(Error::Parse(format!("config line {}: empty key", i + 1)));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("config line {}: duplicate key '{key}'", i + 1)));
            }
        }
        Ok(Config { values })
    }

    /// Fails on keys that no command accepts.
    pub fn check_keys(&self, known: &BTreeSet<String>) -> Result<()> {
        match self.values.keys().find(|k| !known.contains(*k)) {
            Some(k) => Err(Error::InvalidInput(format!("unknown config key '{k}'"))),
            None => Ok(()),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.values
            .get(key)
            .map(|v| v.parse().map_err(|_| Error::Parse(format!("config key '{key}': cannot parse '{v}'"))))
            .transpose()
    }

    /// Flag value if given, else the config value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.pick(flag, key)?.ok_or_else(|| Error::InvalidInput(format!("missing --{key} (flag or config key)")))
    }

    pub fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}
