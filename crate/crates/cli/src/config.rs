//! Flat `key=value` config files and list-valued flag parsing.

use std::collections::BTreeMap;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "n",
    "labels",
    "eps",
    "k",
    "g",
    "depth",
    "trials",
    "seed",
    "strategy",
    "redundancy",
    "pairs",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", i + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::usage(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Comma list of values, or an inclusive range `a..b` with optional `:step`.
pub fn parse_usizes(s: &str, what: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::usage(format!("bad {what} list {s:?}"));
    if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let (a, b, step): (usize, usize, usize) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            step.trim().parse().map_err(|_| bad())?,
        );
        if step == 0 || a > b {
            return Err(bad());
        }
        return Ok((a..=b).step_by(step).collect());
    }
    s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

pub fn parse_f64s(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("bad {what} list {s:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_usizes("12,14", "k").unwrap(), vec![12, 14]);
        assert_eq!(parse_usizes("30..36:2", "k").unwrap(), vec![30, 32, 34, 36]);
        assert!(parse_usizes("5..1", "k").is_err());
        assert_eq!(parse_f64s("0,0.11", "eps").unwrap(), vec![0.0, 0.11]);
    }

    #[test]
    fn config_file() {
        let c = ConfigFile::parse("# sweep\nn = 256\ntrials=10\n").unwrap();
        assert_eq!(c.get("n"), Some("256"));
        assert!(ConfigFile::parse("bogus=1").is_err());
        assert!(ConfigFile::parse("n").is_err());
    }
}
