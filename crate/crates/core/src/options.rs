//! Layered key-value settings. A value set at a later layer overrides one
//! from an earlier layer whatever the order of the calls; each value
//! remembers the layer it came from.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::store::DEFAULT_REPO_URL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Default,
    ConfigFile,
    Environment,
    CallSite,
}

impl Layer {
    pub const ALL: [Layer; 4] = [Layer::Default, Layer::ConfigFile, Layer::Environment, Layer::CallSite];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Default => "default",
            Layer::ConfigFile => "config",
            Layer::Environment => "env",
            Layer::CallSite => "flag",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OptionError {
    #[error("unknown setting {key:?} ({layer})")]
    UnknownKey { key: String, layer: Layer },
    #[error("bad value {value:?} for {key} ({layer}): {reason}")]
    InvalidValue { key: String, value: String, layer: Layer, reason: String },
    #[error("{path}:{line}: expected key=value, got {text:?}")]
    Syntax { path: PathBuf, line: usize, text: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Recognised keys with their built-in defaults, if any.
pub const KEYS: &[(&str, Option<&str>)] = &[
    ("backend", Some("memory")),
    ("data_dir", None),
    ("repo_url", Some(DEFAULT_REPO_URL)),
    ("fetch_policy", Some("prompt")),
    ("organism", Some("hs")),
    ("id_kind", Some("protein")),
    ("id_column", Some("Protein")),
    ("fc_column", Some("log2FC")),
    ("pvalue_column", Some("p.value")),
    ("max_pvalue", Some("0.05")),
    ("min_abs_log2fc", Some("1.0")),
    ("direction", Some("both")),
    ("min_weight", Some("400")),
    ("include_absent", Some("false")),
    ("alpha", Some("0.05")),
    ("adjustment", Some("bh")),
    ("format", Some("svg")),
    ("node_size", Some("3")),
    ("include_isolated", Some("true")),
    ("color_up", Some("red")),
    ("color_down", Some("blue")),
];

pub const ENV_PREFIX: &str = "BIOREL_";

/// Environment variable naming `key`, e.g. `BIOREL_DATA_DIR`.
pub fn env_var(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.to_ascii_uppercase())
}

fn known(key: &str) -> Option<&'static str> {
    KEYS.iter().map(|(k, _)| *k).find(|k| *k == key)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<&'static str, (String, Layer)>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every key with a built-in default, at the default layer.
    pub fn with_defaults() -> Self {
        let mut s = Settings::new();
        for (k, v) in KEYS {
            if let Some(v) = v {
                s.values.insert(k, (v.to_string(), Layer::Default));
            }
        }
        s
    }

    /// Records `value` unless a later layer already set `key`.
    pub fn set(&mut self, layer: Layer, key: &str, value: impl Into<String>) -> Result<(), OptionError> {
        let key = known(key).ok_or_else(|| OptionError::UnknownKey { key: key.to_string(), layer })?;
        match self.values.get(key) {
            Some((_, held)) if *held > layer => {}
            _ => {
                self.values.insert(key, (value.into(), layer));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    pub fn source(&self, key: &str) -> Option<Layer> {
        self.values.get(key).map(|(_, l)| *l)
    }

    /// (key, value, layer) in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, Layer)> {
        self.values.iter().map(|(k, (v, l))| (*k, v.as_str(), *l))
    }

    /// Parses the value of `key`, if set.
    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, OptionError>
    where
        T::Err: fmt::Display,
    {
        let Some((value, layer)) = self.values.get(key) else { return Ok(None) };
        value.trim().parse().map(Some).map_err(|e: T::Err| OptionError::InvalidValue {
            key: key.to_string(),
            value: value.clone(),
            layer: *layer,
            reason: e.to_string(),
        })
    }

    pub fn flag(&self, key: &str) -> Result<Option<bool>, OptionError> {
        let Some((value, layer)) = self.values.get(key) else { return Ok(None) };
        match value.trim().to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" | "on" => Ok(Some(true)),
            "false" | "no" | "0" | "off" => Ok(Some(false)),
            _ => Err(OptionError::InvalidValue {
                key: key.to_string(),
                value: value.clone(),
                layer: *layer,
                reason: "expected true or false".into(),
            }),
        }
    }

    /// Reads `key = value` lines; `#` starts a comment line.
    pub fn load_config_text(&mut self, path: &Path, text: &str) -> Result<(), OptionError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(OptionError::Syntax { path: path.to_path_buf(), line: i + 1, text: line.to_string() });
            };
            self.set(Layer::ConfigFile, k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn load_config_file(&mut self, path: &Path) -> Result<(), OptionError> {
        let text = std::fs::read_to_string(path).map_err(|e| OptionError::Io { path: path.to_path_buf(), source: e })?;
        self.load_config_text(path, &text)
    }

    /// Applies `BIOREL_<KEY>` variables; other variables are ignored.
    pub fn apply_env<I, K, V>(&mut self, vars: I)
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        for (name, value) in vars {
            let name = name.as_ref();
            let Some(key) = name.strip_prefix(ENV_PREFIX) else { continue };
            if self.set(Layer::Environment, &key.to_ascii_lowercase(), value).is_err() {
                log::warn!("ignoring unknown variable {name}");
            }
        }
    }
}
