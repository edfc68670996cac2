//! Flat key=value configuration files.
//!
//! Lines are `key = value`; `#` starts a comment. Unknown keys are rejected
//! so typos fail loudly. Command-line flags take precedence over file values,
//! which take precedence over built-in defaults.

use crate::error::{Error, Result};
use std::path::Path;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub gap_threshold_s: Option<i64>,
    pub k: Option<usize>,
    pub ks_fail_threshold: Option<f64>,
    pub seed_value: Option<u64>,
    pub target_log_count: Option<usize>,
    pub duration_jitter_pct: Option<f64>,
    pub quiet_window_start: Option<u32>,
    pub quiet_window_end: Option<u32>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub attempts: Option<u32>,
    pub timeout_s: Option<u64>,
    pub retries: Option<u32>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value '{value}' for key '{key}'")))
}

pub fn parse_config(text: &str) -> Result<FileConfig> {
    let mut config = FileConfig::default();
    for (line_no, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidConfig(format!(
                "line {}: expected 'key = value', got '{raw_line}'",
                line_no + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "gap_threshold_s" => config.gap_threshold_s = Some(parse_value(key, value)?),
            "k" => config.k = Some(parse_value(key, value)?),
            "ks_fail_threshold" => config.ks_fail_threshold = Some(parse_value(key, value)?),
            "seed_value" => config.seed_value = Some(parse_value(key, value)?),
            "target_log_count" => config.target_log_count = Some(parse_value(key, value)?),
            "duration_jitter_pct" => config.duration_jitter_pct = Some(parse_value(key, value)?),
            "quiet_window_start" => config.quiet_window_start = Some(parse_value(key, value)?),
            "quiet_window_end" => config.quiet_window_end = Some(parse_value(key, value)?),
            "endpoint" => config.endpoint = Some(value.to_string()),
            "model" => config.model = Some(value.to_string()),
            "attempts" => config.attempts = Some(parse_value(key, value)?),
            "timeout_s" => config.timeout_s = Some(parse_value(key, value)?),
            "retries" => config.retries = Some(parse_value(key, value)?),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "line {}: unknown key '{other}'",
                    line_no + 1
                )))
            }
        }
    }
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<FileConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
