//! `key = value` config files and byte-size parsing.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

/// Environment variable naming a config file whose keys mirror the long flags
/// (`memory-cap` or `memory_cap`). Flags win over file values.
pub const CONFIG_ENV: &str = "THREEFREE_CONFIG";

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

impl FileConfig {
    pub fn from_env() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) => FileConfig::load(Path::new(&path)),
            None => Ok(FileConfig::default()),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        FileConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim().trim_matches('"').to_string();
            values.insert(key, value);
        }
        Ok(FileConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("config key {key}: cannot parse {v:?}"))
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<bool, String> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "yes" | "1" | "on") => Ok(true),
            Some("false" | "no" | "0" | "off") => Ok(false),
            Some(v) => Err(format!("config key {key}: expected a boolean, got {v:?}")),
        }
    }
}

/// Parses sizes such as `4GiB`, `512MiB`, `1.5G`, `1000000`.
pub fn parse_bytes(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let split = s
        .find(|c: char| !(c.is_ascii_digit() || c == '.'))
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let num: f64 = num
        .parse()
        .map_err(|_| format!("invalid byte quantity {s:?}"))?;
    let scale: u64 = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 1,
        "k" | "kb" => 1_000,
        "kib" => 1 << 10,
        "m" | "mb" => 1_000_000,
        "mib" => 1 << 20,
        "g" | "gb" => 1_000_000_000,
        "gib" => 1 << 30,
        "t" | "tb" => 1_000_000_000_000,
        "tib" => 1 << 40,
        other => return Err(format!("unknown byte unit {other:?}")),
    };
    Ok((num * scale as f64) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(parse_bytes("4GiB").unwrap(), 4 << 30);
        assert_eq!(parse_bytes("512 MiB").unwrap(), 512 << 20);
        assert_eq!(parse_bytes("1.5G").unwrap(), 1_500_000_000);
        assert_eq!(parse_bytes("1000").unwrap(), 1000);
        assert!(parse_bytes("lots").is_err());
        assert!(parse_bytes("3 parsecs").is_err());
    }

    #[test]
    fn config_lines() {
        let c =
            FileConfig::parse("# comment\nn = 12\nmemory_cap = \"1GiB\"\nsymmetry=yes\n").unwrap();
        assert_eq!(c.parsed::<usize>("n").unwrap(), Some(12));
        assert_eq!(c.get("memory-cap"), Some("1GiB"));
        assert!(c.flag("symmetry").unwrap());
        assert!(!c.flag("progress").unwrap());
        assert!(FileConfig::parse("nonsense").is_err());
    }
}
