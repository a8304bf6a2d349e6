//! `key = value` run configuration files.
//!
//! One assignment per line. Blank lines and lines starting with `#` are
//! skipped; keys may be spelled with `-` or `_`. Unknown and repeated keys
//! are rejected.

use std::collections::BTreeMap;

use crate::CliError;

pub const KNOWN_KEYS: [&str; 10] = [
    "omega0",
    "omega1",
    "alpha",
    "lambda",
    "t_min",
    "t_max",
    "points",
    "format",
    "output",
    "normalization",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Parses `key` as `T`, naming the key in the error.
    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config: invalid value {raw:?} for {key}"))),
        }
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile, CliError> {
    let mut entries = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key=value",
                lineno + 1
            )));
        };
        let key = key.trim().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key {key:?}",
                lineno + 1
            )));
        }
        if entries.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!(
                "config line {}: duplicate key {key:?}",
                lineno + 1
            )));
        }
    }
    Ok(ConfigFile { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_assignments_and_comments() {
        let cfg = parse_config("# reference\nomega0 = 1\n\nalpha=0.25\nt-min = -80\n").unwrap();
        assert_eq!(cfg.len(), 3);
        assert_eq!(cfg.get("omega0"), Some("1"));
        assert_eq!(cfg.parse::<f64>("t_min").unwrap(), Some(-80.0));
        assert_eq!(cfg.parse::<f64>("omega1").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_config("omega0 1").is_err());
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("alpha=1\nalpha=2").is_err());
        assert!(parse_config("alpha=x").unwrap().parse::<f64>("alpha").is_err());
    }

    #[test]
    fn empty_file() {
        assert!(parse_config("").unwrap().is_empty());
        assert!(parse_config("\n  \n# only comments\n").unwrap().is_empty());
    }
}
