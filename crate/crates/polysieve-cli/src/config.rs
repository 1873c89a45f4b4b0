//! Flag and config-file parsing. Config files are `key = value` text; any
//! flag given on the command line overrides the file.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub values: BTreeMap<String, String>,
    pub positional: Vec<String>,
}

pub fn parse_args(args: &[String]) -> Result<RawConfig, String> {
    let mut cfg = RawConfig::default();
    let mut file_values: BTreeMap<String, String> = BTreeMap::new();
    let mut i = 0;
    let mut flag_values: BTreeMap<String, String> = BTreeMap::new();
    while i < args.len() {
        let a = &args[i];
        if let Some(name) = a.strip_prefix("--") {
            let (key, val) = if let Some((k, v)) = name.split_once('=') {
                (k.to_string(), v.to_string())
            } else {
                let v = args
                    .get(i + 1)
                    .ok_or_else(|| format!("flag --{name} needs a value"))?;
                i += 1;
                (name.to_string(), v.clone())
            };
            if key == "config" {
                let text = std::fs::read_to_string(&val)
                    .map_err(|e| format!("cannot read config {val}: {e}"))?;
                for line in text.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let (k, v) = line
                        .split_once('=')
                        .ok_or_else(|| format!("config line `{line}` is not key = value"))?;
                    file_values.insert(k.trim().to_string(), v.trim().to_string());
                }
            } else {
                flag_values.insert(key, val);
            }
            i += 1;
        } else {
            cfg.positional.push(a.clone());
            i += 1;
        }
    }
    cfg.values = file_values;
    cfg.values.extend(flag_values);
    Ok(cfg)
}

impl RawConfig {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_i64(&self, key: &str) -> Result<Option<i64>, String> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("{key} = {v} is not an integer"))
            })
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, String> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("{key} = {v} is not a non-negative integer"))
            })
            .transpose()
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, String> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("{key} = {v} is not a number"))
            })
            .transpose()
    }

    /// Comma-separated integer vector, e.g. `--u 1,2,0`.
    pub fn get_vec_i64(&self, key: &str) -> Result<Option<Vec<i64>>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| format!("{key} entry `{t}` is not an integer"))
                })
                .collect::<Result<Vec<i64>, String>>()
                .map(Some),
        }
    }

    pub fn get_vec_u64(&self, key: &str) -> Result<Option<Vec<u64>>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| format!("{key} entry `{t}` is not a prime"))
                })
                .collect::<Result<Vec<u64>, String>>()
                .map(Some),
        }
    }
}
