//! Flat `key = value` config files. `#` starts a comment, blank lines are
//! skipped, keys must come from the known set. Command-line flags override
//! file values.

use std::collections::BTreeMap;
use std::path::Path;

use mfo_core::{Error, Result};

const KNOWN_KEYS: &[&str] = &[
    "rule",
    "seed",
    "rule_file",
    "mode",
    "x",
    "beta1",
    "beta2",
    "interval",
    "rho_max",
    "chain_y_coefficient",
    "s",
    "gap_cap",
    "iteration_cap",
    "cache_dir",
    "out",
    "log_level",
    "limit",
];

pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((head, _)) => head,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "{}:{}: expected `key = value`, got {raw:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim().to_ascii_lowercase();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "{}:{}: unknown key {key:?}",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Parse a string value from the config map with a typed parser.
pub fn get_parsed<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("config key {key}: cannot parse {v:?}"))),
    }
}
