//! `key = value` config files. Lines may carry `#` comments; keys are the
//! long flag names. Command-line flags always win over config values.

use std::collections::HashMap;
use std::path::Path;

pub struct Config(HashMap<String, String>);

impl Config {
    pub fn empty() -> Self {
        Self(HashMap::new())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut map = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

/// Flag value if present, else config value parsed by `parse`, else None.
pub fn merge<T>(
    flag: Option<T>,
    cfg: &Config,
    key: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<T>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.raw(key) {
        Some(s) => parse(s).map(Some).map_err(|e| format!("config key `{key}`: {e}")),
        None => Ok(None),
    }
}

pub fn required<T>(v: Option<T>, key: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("missing required parameter --{key}"))
}
