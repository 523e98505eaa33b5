//! INI-style configuration files and numeric literals.
//!
//! ```text
//! # comment
//! [state]
//! family = mmm
//! c1 = 0.8
//! ```
//!
//! Keys are case-sensitive, values are trimmed, `#` and `;` start comments.
//! Numbers accept `pi` in the forms `pi`, `2pi`, `2*pi`, `pi/2`, `3pi/4` as
//! well as plain fractions such as `2/3`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::ConfigError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut ini = Ini::default();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find(['#', ';']) {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::Syntax { line: line_no, message: "unterminated section header".into() })?
                    .trim();
                if name.is_empty() {
                    return Err(ConfigError::Syntax { line: line_no, message: "empty section name".into() });
                }
                ini.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: line_no, message: format!("expected key = value, got {line:?}") })?;
            let section = current
                .as_ref()
                .ok_or_else(|| ConfigError::Syntax { line: line_no, message: "key outside any section".into() })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax { line: line_no, message: "empty key".into() });
            }
            let entries = ini.sections.get_mut(section).expect("section registered on header");
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(ConfigError::Syntax { line: line_no, message: format!("duplicate key {section}.{key}") });
            }
        }
        Ok(ini)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections.entry(section.to_string()).or_default().insert(key.to_string(), value.into());
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    pub fn keys(&self, section: &str) -> impl Iterator<Item = &str> {
        self.sections.get(section).into_iter().flat_map(|m| m.keys().map(String::as_str))
    }

    pub fn sections(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    pub fn number(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(section, key)
            .map(|v| parse_number(v).ok_or_else(|| ConfigError::invalid(section, key, v, "a number")))
            .transpose()
    }

    pub fn require_number(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        self.number(section, key)?.ok_or_else(|| ConfigError::Missing { section: section.into(), key: key.into() })
    }

    pub fn number_or(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.number(section, key)?.unwrap_or(default))
    }

    pub fn count(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(section, key)
            .map(|v| v.parse::<usize>().map_err(|_| ConfigError::invalid(section, key, v, "a non-negative integer")))
            .transpose()
    }

    pub fn flag(&self, section: &str, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => parse_bool(v).ok_or_else(|| ConfigError::invalid(section, key, v, "true or false")),
        }
    }
}

pub fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

fn parse_factor(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some(coef) = s.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        let k = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().ok()?,
        };
        return Some(k * PI);
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Parses a decimal, a fraction `a/b`, or a multiple of `pi`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_factor(den)?;
            if den == 0.0 {
                return None;
            }
            parse_factor(num)? / den
        }
        None => parse_factor(s)?,
    };
    value.is_finite().then_some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("0.25"), Some(0.25));
        assert_eq!(parse_number("2/3"), Some(2.0 / 3.0));
        assert_eq!(parse_number("pi"), Some(PI));
        assert_eq!(parse_number("2pi"), Some(2.0 * PI));
        assert_eq!(parse_number("2*pi"), Some(2.0 * PI));
        assert_eq!(parse_number("pi/2"), Some(PI / 2.0));
        assert_eq!(parse_number("3pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_number("-1e-3"), Some(-1e-3));
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(parse_number("abc"), None);
        assert_eq!(parse_number("inf"), None);
        assert_eq!(parse_number(""), None);
    }

    #[test]
    fn sections_and_comments() {
        let ini = Ini::parse("# top\n[state]\nfamily = mmm ; trailing\nc1=0.8\n\n[model]\ng = 1/2\n").unwrap();
        assert_eq!(ini.get("state", "family"), Some("mmm"));
        assert_eq!(ini.require_number("state", "c1").unwrap(), 0.8);
        assert_eq!(ini.number("model", "g").unwrap(), Some(0.5));
        assert_eq!(ini.number("model", "t_s").unwrap(), None);
        assert!(ini.require_number("model", "t_s").is_err());
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let err = Ini::parse("[state]\nfamily mmm\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }));
        assert!(matches!(Ini::parse("c1 = 1\n"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(Ini::parse("[state\n"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(Ini::parse("[a]\nx=1\nx=2\n"), Err(ConfigError::Syntax { line: 3, .. })));
        let ini = Ini::parse("[grid]\nsamples = many\n").unwrap();
        let err = ini.count("grid", "samples").unwrap_err();
        assert!(err.to_string().contains("grid.samples"));
    }
}
