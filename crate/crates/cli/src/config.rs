//! Line-oriented `key=value` configuration checked against a per-command schema.

use std::fmt::Display;
use std::str::FromStr;

use crate::error::CliError;

/// A recognized key with its default value; an empty default means "required".
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
}

pub const fn key(name: &'static str, default: &'static str) -> Key {
    Key { name, default }
}

/// The fully resolved settings of one command, in schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    command: &'static str,
    entries: Vec<(&'static str, String)>,
}

/// Splits `key=value` lines, dropping blank lines and `#` comments.
pub fn parse_lines(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        pairs.push(
            parse_pair(line).map_err(|e| CliError::Usage(format!("line {}: {e}", lineno + 1)))?,
        );
    }
    Ok(pairs)
}

fn parse_pair(item: &str) -> Result<(String, String), String> {
    let (k, v) = item
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got '{item}'"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty key in '{item}'"));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

impl Config {
    /// Applies the file settings, then the command-line settings, over the schema defaults.
    pub fn resolve(
        command: &'static str,
        schema: &[Key],
        file: Option<&str>,
        overrides: &[String],
    ) -> Result<Self, CliError> {
        let mut pairs = match file {
            Some(text) => parse_lines(text)?,
            None => Vec::new(),
        };
        for item in overrides {
            pairs.push(parse_pair(item).map_err(CliError::Usage)?);
        }
        let mut entries: Vec<(&'static str, Option<String>)> = schema
            .iter()
            .map(|k| {
                (
                    k.name,
                    (!k.default.is_empty()).then(|| k.default.to_string()),
                )
            })
            .collect();
        for (k, v) in pairs {
            let slot = entries
                .iter_mut()
                .find(|(name, _)| *name == k)
                .ok_or_else(|| {
                    let known: Vec<&str> = schema.iter().map(|k| k.name).collect();
                    CliError::Usage(format!(
                        "unknown key '{k}' for {command}; expected one of: {}",
                        known.join(", ")
                    ))
                })?;
            slot.1 = Some(v);
        }
        let entries = entries
            .into_iter()
            .map(|(name, v)| {
                v.ok_or_else(|| {
                    CliError::Usage(format!("missing required key '{name}' for {command}"))
                })
                .map(|v| (name, v))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { command, entries })
    }

    pub fn command(&self) -> &'static str {
        self.command
    }

    pub fn entries(&self) -> &[(&'static str, String)] {
        &self.entries
    }

    pub fn raw(&self, name: &str) -> &str {
        self.entries
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| v.as_str())
            .unwrap_or_else(|| panic!("key '{name}' is not in the {} schema", self.command))
    }

    pub fn get<T>(&self, name: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        parse_value(name, self.raw(name))
    }

    /// A comma-separated list; empty items are rejected.
    pub fn list<T>(&self, name: &str) -> Result<Vec<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(name)
            .split(',')
            .map(|item| parse_value(name, item))
            .collect()
    }

    pub fn positive(&self, name: &str) -> Result<f64, CliError> {
        let v: f64 = self.get(name)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Usage(format!(
                "{name} must be positive and finite, got {v}"
            )))
        }
    }
}

fn parse_value<T>(name: &str, raw: &str) -> Result<T, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(CliError::Usage(format!("empty value for {name}")));
    }
    raw.parse()
        .map_err(|e| CliError::Usage(format!("invalid value '{raw}' for {name}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &[Key] = &[
        key("n", "128"),
        key("eps", "0.1"),
        key("taus", "1,inf"),
        key("r", ""),
    ];

    fn resolve(file: Option<&str>, overrides: &[&str]) -> Result<Config, CliError> {
        let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        Config::resolve("test", SCHEMA, file, &overrides)
    }

    #[test]
    fn defaults_file_and_flags_layer_in_order() {
        let cfg = resolve(
            Some("# comment\nn = 64\neps=0.2 # trailing\n"),
            &["eps=0.05", "r=2"],
        )
        .unwrap();
        assert_eq!(cfg.get::<usize>("n").unwrap(), 64);
        assert_eq!(cfg.get::<f64>("eps").unwrap(), 0.05);
        assert_eq!(cfg.raw("r"), "2");
        let names: Vec<&str> = cfg.entries().iter().map(|e| e.0).collect();
        assert_eq!(names, ["n", "eps", "taus", "r"]);
    }

    #[test]
    fn unknown_and_missing_keys_are_usage_errors() {
        assert!(matches!(
            resolve(None, &["r=1", "nn=3"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(resolve(None, &[]), Err(CliError::Usage(_))));
        assert!(matches!(
            resolve(Some("n 64"), &["r=1"]),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn typed_access() {
        let cfg = resolve(None, &["r=1", "eps=-1", "n=abc"]).unwrap();
        assert!(cfg.get::<usize>("n").is_err());
        assert!(cfg.positive("eps").is_err());
        let taus: Vec<acsplit::Tau> = cfg.list("taus").unwrap();
        assert_eq!(taus, [acsplit::Tau::Finite(1.0), acsplit::Tau::Infinite]);
    }
}
