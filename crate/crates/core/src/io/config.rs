use std::path::Path;

use serde::Deserialize;
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Reads a TOML configuration file and applies `key=value` overrides on
/// top of it. Missing keys take their defaults; unknown keys are errors.
pub fn parse_config(path: impl AsRef<Path>, overrides: &[String]) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, overrides).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// [`parse_config`] on an in-memory document.
///
/// Each override names a key, dotted for nested tables (`abm.wage=1.2`).
/// Several overrides may share one string separated by whitespace.
/// Values are read as TOML and fall back to bare strings, so
/// `regime=tobin_tax` needs no quotes.
pub fn parse_config_str(text: &str, overrides: &[String]) -> Result<ScenarioConfig> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string().trim_end().to_owned()))?;
    let known = defaults_table();
    for pair in overrides.iter().flat_map(|s| s.split_whitespace()) {
        apply_override(&mut table, &known, pair)?;
    }
    let cfg = ScenarioConfig::deserialize(Value::Table(table)).map_err(|e| Error::Config(e.to_string().trim_end().to_owned()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical TOML form of a configuration. Parsing it back gives an equal
/// configuration.
pub fn config_to_toml(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("configuration serialises to TOML")
}

fn defaults_table() -> Table {
    Table::try_from(ScenarioConfig::default()).expect("configuration serialises to TOML")
}

fn apply_override(table: &mut Table, known: &Table, pair: &str) -> Result<()> {
    let (key, raw) = pair
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{pair}` is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();

    let mut schema = known;
    for (depth, part) in path.iter().enumerate() {
        match schema.get(*part) {
            Some(Value::Table(t)) if depth + 1 < path.len() => schema = t,
            Some(Value::Table(_)) => {
                return Err(Error::Config(format!("override `{pair}`: `{key}` is a table, not a value")))
            }
            Some(_) if depth + 1 == path.len() => {}
            _ => return Err(Error::Config(format!("override `{pair}`: unknown key `{key}`"))),
        }
    }

    let value = parse_value(raw.trim());
    let (last, parents) = path.split_last().expect("split yields at least one part");
    let mut target = table;
    for part in parents {
        let entry = target.entry(part.to_string()).or_insert_with(|| Value::Table(Table::new()));
        target = match entry {
            Value::Table(t) => t,
            _ => return Err(Error::Config(format!("override `{pair}`: `{part}` is not a table in the file"))),
        };
    }
    target.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_owned()))
}
