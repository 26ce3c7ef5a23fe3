//! Engine configuration.
//!
//! A config file is flat `key = value` text (blank lines and `#` comments
//! ignored) using the same keys as the long CLI flags. Values from the
//! command line replace values from the file. Everything is validated in
//! [`EngineConfig::from_pairs`] before any command runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::metrics::EqOddVariant;
use crate::records::Split;
use crate::report::{OutputUnits, TableFormat};
use crate::stats::MetricName;

pub const CONFIG_ENV: &str = "NHFAIR_CONFIG";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: String, line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("cannot read config {path}: {reason}")]
    Read { path: String, reason: String },
}

pub const KEYS: [&str; 14] = [
    "tolerance",
    "eqodd",
    "alpha",
    "units",
    "format",
    "metric",
    "out",
    "svg",
    "cells",
    "baseline",
    "baseline-id",
    "threads",
    "split",
    "exclude",
];

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    /// Slack for no-harm and zone comparisons, in utility units.
    pub tolerance: f64,
    pub eqodd_variant: EqOddVariant,
    pub alpha: f64,
    pub output_units: OutputUnits,
    pub format: TableFormat,
    pub metric: MetricName,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub cells: Option<PathBuf>,
    pub baseline: Option<String>,
    pub baseline_id: Option<String>,
    /// 0 lets the thread pool pick.
    pub threads: usize,
    pub split: Option<Split>,
    pub exclude: Vec<String>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            tolerance: 0.0,
            eqodd_variant: EqOddVariant::Diagonal,
            alpha: 0.05,
            output_units: OutputUnits::Percent,
            format: TableFormat::Csv,
            metric: MetricName::Utility,
            out: None,
            svg: None,
            cells: None,
            baseline: None,
            baseline_id: None,
            threads: 0,
            split: None,
            exclude: Vec::new(),
        }
    }
}

/// Parses `key = value` lines.
pub fn parse_config_text(
    text: &str,
    origin: &str,
) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            path: origin.to_string(),
            line: i + 1,
        })?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config_text(&text, &path.display().to_string())
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

impl EngineConfig {
    /// Builds a validated config from merged key/value pairs.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let mut cfg = EngineConfig::default();
        for (key, value) in pairs {
            let v = value.as_str();
            match key.as_str() {
                "tolerance" => {
                    let t: f64 = v.parse().map_err(|_| invalid(key, v, "not a number"))?;
                    if !t.is_finite() || t < 0.0 {
                        return Err(invalid(key, v, "must be finite and >= 0"));
                    }
                    cfg.tolerance = t;
                }
                "eqodd" => cfg.eqodd_variant = v.parse().map_err(|e: String| invalid(key, v, e))?,
                "alpha" => {
                    let a: f64 = v.parse().map_err(|_| invalid(key, v, "not a number"))?;
                    if (a - 0.05).abs() > 1e-12 && (a - 0.10).abs() > 1e-12 {
                        return Err(invalid(key, v, "supported values are 0.05 and 0.10"));
                    }
                    cfg.alpha = a;
                }
                "units" => cfg.output_units = v.parse().map_err(|e: String| invalid(key, v, e))?,
                "format" => cfg.format = v.parse().map_err(|e: String| invalid(key, v, e))?,
                "metric" => cfg.metric = v.parse().map_err(|e: String| invalid(key, v, e))?,
                "out" => cfg.out = Some(PathBuf::from(v)),
                "svg" => cfg.svg = Some(PathBuf::from(v)),
                "cells" => cfg.cells = Some(PathBuf::from(v)),
                "baseline" => cfg.baseline = Some(v.to_string()),
                "baseline-id" => cfg.baseline_id = Some(v.to_string()),
                "threads" => {
                    cfg.threads = v
                        .parse()
                        .map_err(|_| invalid(key, v, "not a non-negative integer"))?
                }
                "split" => cfg.split = Some(v.parse().map_err(|e: String| invalid(key, v, e))?),
                "exclude" => {
                    cfg.exclude = v
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect()
                }
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut pairs = parse_config_text(
            "# engine\ntolerance = 0.005\nalpha=0.10\n\nmetric = gap\nbaseline_id = erm_s0\n",
            "cfg",
        )
        .unwrap();
        pairs.insert("alpha".into(), "0.05".into());
        let cfg = EngineConfig::from_pairs(&pairs).unwrap();
        assert_eq!(cfg.tolerance, 0.005);
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.metric, MetricName::Gap);
        assert_eq!(cfg.baseline_id.as_deref(), Some("erm_s0"));
    }

    #[test]
    fn rejects_bad_values() {
        assert_eq!(
            parse_config_text("nonsense\n", "cfg").unwrap_err(),
            ConfigError::Syntax {
                path: "cfg".into(),
                line: 1
            }
        );
        assert!(matches!(
            parse_config_text("colour = red", "cfg"),
            Err(ConfigError::UnknownKey(_))
        ));
        for (k, v) in [
            ("tolerance", "-1"),
            ("tolerance", "nan"),
            ("alpha", "0.01"),
            ("eqodd", "partial"),
            ("format", "xml"),
            ("threads", "-2"),
        ] {
            let pairs = BTreeMap::from([(k.to_string(), v.to_string())]);
            assert!(
                matches!(
                    EngineConfig::from_pairs(&pairs),
                    Err(ConfigError::InvalidValue { .. })
                ),
                "{k} = {v}"
            );
        }
    }
}
