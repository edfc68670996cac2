//! Grouping usage logs into sessions.
//!
//! Two grouping methods are supported: treating every log as its own unit
//! ([`log_level_units`]) and merging consecutive logs whose inactivity gap is
//! below a threshold ([`sessionize`]). Gaps are measured from the end of the
//! previous log's activity (`start + duration`) to the next log's start; a
//! gap of exactly the threshold splits.

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FindingCode, UsageDataset, UsageLog};

pub const DEFAULT_GAP_THRESHOLD_S: i64 = 60;

/// A maximal run of logs separated by less than the gap threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub start: NaiveDateTime,
    /// Latest activity end over the member logs.
    pub end: NaiveDateTime,
    pub logs: Vec<UsageLog>,
    /// Sum of member durations.
    pub active_s: i64,
    /// end − start in seconds.
    pub span_s: i64,
}

/// Seconds of inactivity between consecutive units (logs or sessions).
/// Negative raw gaps (overlapping activity) are clamped to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSeries {
    pub gaps_s: Vec<i64>,
}

fn seconds_between(a: NaiveDateTime, b: NaiveDateTime) -> i64 {
    (b - a).num_seconds()
}

/// Raw inactivity gap between two consecutive logs, unclamped.
fn raw_gap(prev: &UsageLog, next: &UsageLog) -> i64 {
    seconds_between(prev.end(), next.start)
}

fn require_time_of_day(dataset: &UsageDataset) -> Result<()> {
    if dataset.has_finding(FindingCode::DateOnlyTimestamp) {
        return Err(Error::MissingTimeOfDay);
    }
    Ok(())
}

fn build_session(logs: &[UsageLog]) -> Session {
    let start = logs[0].start;
    let end = logs.iter().map(UsageLog::end).max().expect("non-empty");
    let active_s = logs.iter().map(|l| i64::from(l.duration_s)).sum();
    Session {
        start,
        end,
        logs: logs.to_vec(),
        active_s,
        span_s: seconds_between(start, end),
    }
}

/// Group a normalized dataset into sessions. Consecutive logs share a
/// session iff the inactivity between them is strictly below
/// `gap_threshold_s`; every log lands in exactly one session.
pub fn sessionize(dataset: &UsageDataset, gap_threshold_s: i64) -> Result<Vec<Session>> {
    require_time_of_day(dataset)?;
    let logs = &dataset.logs;
    let mut sessions = Vec::new();
    let mut run_start = 0usize;
    for i in 1..logs.len() {
        if raw_gap(&logs[i - 1], &logs[i]) >= gap_threshold_s {
            sessions.push(build_session(&logs[run_start..i]));
            run_start = i;
        }
    }
    if !logs.is_empty() {
        sessions.push(build_session(&logs[run_start..]));
    }
    Ok(sessions)
}

/// The log-as-session view: each log's duration, plus the inactivity gaps
/// between consecutive logs (clamped at zero when activity overlaps).
pub fn log_level_units(dataset: &UsageDataset) -> Result<(Vec<i64>, GapSeries)> {
    require_time_of_day(dataset)?;
    let durations = dataset
        .logs
        .iter()
        .map(|l| i64::from(l.duration_s))
        .collect();
    let gaps_s = dataset
        .logs
        .windows(2)
        .map(|w| raw_gap(&w[0], &w[1]).max(0))
        .collect();
    Ok((durations, GapSeries { gaps_s }))
}

/// Inactivity between consecutive sessions, clamped at zero.
pub fn session_gaps(sessions: &[Session]) -> GapSeries {
    let gaps_s = sessions
        .windows(2)
        .map(|w| seconds_between(w[0].end, w[1].start).max(0))
        .collect();
    GapSeries { gaps_s }
}

/// Session durations (active seconds per session).
pub fn session_durations(sessions: &[Session]) -> Vec<i64> {
    sessions.iter().map(|s| s.active_s).collect()
}
