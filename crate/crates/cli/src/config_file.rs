//! Experiment files: flat `key = value` lines, `#` comments, and an optional
//! `[sweep]` section whose values are comma-separated lists.
//!
//! ```text
//! # base parameters
//! N = 64
//! W = 8
//! T_sw = 2ms
//!
//! [sweep]
//! L = 0.1, 0.5, 0.9
//! T_sw = 0.5ms, 1ms, 2ms
//! ```

use std::fmt;
use std::path::Path;

use twdm_core::{SimConfig, SimError};

use crate::params;

/// A config problem, tied to the line that caused it when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{l}: {}", self.file, self.message),
            None => write!(f, "{}: {}", self.file, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// A swept parameter and the line that declared it.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: &'static str,
    pub values: Vec<String>,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentFile {
    pub name: String,
    pub base: SimConfig,
    pub axes: Vec<Axis>,
    /// Canonical key to the line that set it, for both sections.
    lines: Vec<(&'static str, usize)>,
}

impl ExperimentFile {
    pub fn empty(name: &str) -> Self {
        ExperimentFile {
            name: name.to_string(),
            base: SimConfig::default(),
            axes: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            file: name.clone(),
            line: None,
            message: format!("cannot read: {e}"),
        })?;
        Self::parse(&name, &text)
    }

    pub fn parse(name: &str, text: &str) -> Result<Self, ConfigError> {
        let mut out = ExperimentFile::empty(name);
        let mut in_sweep = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| ConfigError {
                file: name.to_string(),
                line: Some(line),
                message,
            };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(section) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                match section.trim() {
                    "sweep" => in_sweep = true,
                    other => return Err(err(format!("unknown section [{other}]"))),
                }
                continue;
            }
            let (key, value) = params::split_pair(content).map_err(err)?;
            if out.lines.iter().any(|(k, _)| *k == key) {
                return Err(err(format!("'{key}' is set twice")));
            }
            out.lines.push((key, line));
            if in_sweep {
                if key.ends_with("_per_onu") {
                    return Err(err(format!("'{key}' cannot be swept")));
                }
                let values: Vec<String> = value.split(',').map(|v| v.trim().to_string()).collect();
                // Each value is checked on its own so a typo is reported
                // here rather than when its sweep point is reached.
                for v in &values {
                    let mut probe = SimConfig::default();
                    params::apply(&mut probe, key, v).map_err(err)?;
                }
                out.axes.push(Axis { key, values, line });
            } else {
                params::apply(&mut out.base, key, value).map_err(err)?;
            }
        }
        Ok(out)
    }

    /// Line that set `key`, if the file mentions it.
    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.lines.iter().find(|(k, _)| *k == key).map(|&(_, l)| l)
    }

    pub fn mentions(&self, key: &str) -> bool {
        self.line_of(key).is_some()
    }

    /// Wraps a validation failure of a config derived from this file, pointing
    /// at the line most likely responsible.
    pub fn blame(&self, err: &SimError) -> ConfigError {
        let suspects: Vec<&str> = match err {
            SimError::DelayBoundUnsatisfiable { .. } => vec!["d_max", "d_max_per_onu", "rtt", "rtt_per_onu"],
            SimError::InvalidConfig(msg) => self
                .lines
                .iter()
                .map(|(k, _)| *k)
                .filter(|k| msg.contains(k) || msg.contains(&k.replace('_', " ")))
                .collect(),
            SimError::Invariant { .. } => vec![],
        };
        let line = suspects.iter().filter_map(|k| self.line_of(k)).min();
        ConfigError {
            file: self.name.clone(),
            line,
            message: err.to_string(),
        }
    }
}
