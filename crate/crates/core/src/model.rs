//! Usage-log data model and the CSV interchange format.
//!
//! A dataset is a header row plus one row per app-usage event. Two header
//! naming schemes are accepted (`id,timestamp,app,duration` and
//! `id,created-at,app-id,time-seconds`); the canonical output format is the
//! latter. Parsing is lenient where it can be: recoverable problems are
//! recorded as [`StructuralFinding`]s on the dataset instead of being
//! silently dropped or turned into hard errors.

use chrono::{NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};

/// Canonical output header.
pub const CANONICAL_HEADER: [&str; 4] = ["id", "created-at", "app-id", "time-seconds"];

const ID_ALIASES: [&str; 1] = ["id"];
const START_ALIASES: [&str; 3] = ["timestamp", "created-at", "created_at"];
const APP_ALIASES: [&str; 3] = ["app", "app-id", "app_id"];
const DURATION_ALIASES: [&str; 3] = ["duration", "time-seconds", "time_seconds"];

/// One app-usage event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageLog {
    pub id: String,
    /// Start of the event, timezone-naive device-local time.
    pub start: NaiveDateTime,
    pub app_id: String,
    pub duration_s: u32,
}

impl UsageLog {
    /// Moment the event's activity ends.
    pub fn end(&self) -> NaiveDateTime {
        self.start + chrono::Duration::seconds(i64::from(self.duration_s))
    }

    pub fn day(&self) -> NaiveDate {
        self.start.date()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Real,
    Synthetic,
    Baseline,
}

/// The four prompt strategies: level of detail crossed with seed inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PromptLabel {
    P1,
    P2,
    P3,
    P4,
}

impl PromptLabel {
    pub fn detailed(self) -> bool {
        matches!(self, PromptLabel::P3 | PromptLabel::P4)
    }

    pub fn uses_seed(self) -> bool {
        matches!(self, PromptLabel::P2 | PromptLabel::P4)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PromptLabel::P1 => "P1",
            PromptLabel::P2 => "P2",
            PromptLabel::P3 => "P3",
            PromptLabel::P4 => "P4",
        }
    }
}

impl std::str::FromStr for PromptLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(PromptLabel::P1),
            "P2" => Ok(PromptLabel::P2),
            "P3" => Ok(PromptLabel::P3),
            "P4" => Ok(PromptLabel::P4),
            other => Err(Error::InvalidConfig(format!(
                "unknown prompt label '{other}' (expected P1..P4)"
            ))),
        }
    }
}

/// Where a dataset came from and, for generated data, how.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub origin: Origin,
    pub prompt_label: Option<PromptLabel>,
    pub attempt: Option<u32>,
    /// Number of model replies the dataset was assembled from. `None` for
    /// hand-loaded files, which makes S3 not assessable.
    pub reply_count: Option<u32>,
}

impl Provenance {
    pub fn real() -> Self {
        Provenance {
            origin: Origin::Real,
            prompt_label: None,
            attempt: None,
            reply_count: None,
        }
    }

    pub fn baseline() -> Self {
        Provenance {
            origin: Origin::Baseline,
            prompt_label: None,
            attempt: None,
            reply_count: Some(1),
        }
    }

    pub fn synthetic(label: PromptLabel, attempt: u32, reply_count: u32) -> Self {
        Provenance {
            origin: Origin::Synthetic,
            prompt_label: Some(label),
            attempt: Some(attempt),
            reply_count: Some(reply_count),
        }
    }

    /// Unknown origin, e.g. a CSV loaded from disk without run metadata.
    pub fn unknown_file() -> Self {
        Provenance {
            origin: Origin::Synthetic,
            prompt_label: None,
            attempt: None,
            reply_count: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FindingCode {
    MissingColumn,
    BadTimestamp,
    DateOnlyTimestamp,
    NegativeDuration,
    NonNumericDuration,
    DuplicateId,
    UnsortedInput,
    EmptyDataset,
    AggregatedRows,
    OverlapWarning,
    EmptyAppId,
}

impl FindingCode {
    /// Codes whose row could not be turned into a log at all.
    pub fn drops_row(self) -> bool {
        matches!(
            self,
            FindingCode::BadTimestamp | FindingCode::NonNumericDuration | FindingCode::EmptyAppId
        )
    }
}

/// A structural problem found while parsing or normalizing a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralFinding {
    pub code: FindingCode,
    /// 1-based data-row index (header excluded), where applicable.
    pub row: Option<usize>,
    pub detail: String,
}

impl StructuralFinding {
    fn new(code: FindingCode, row: Option<usize>, detail: impl Into<String>) -> Self {
        StructuralFinding {
            code,
            row,
            detail: detail.into(),
        }
    }
}

/// An ordered collection of usage logs plus provenance and any structural
/// findings accumulated while reading it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageDataset {
    pub logs: Vec<UsageLog>,
    pub provenance: Provenance,
    pub violations: Vec<StructuralFinding>,
}

impl UsageDataset {
    pub fn new(logs: Vec<UsageLog>, provenance: Provenance) -> Self {
        UsageDataset {
            logs,
            provenance,
            violations: Vec::new(),
        }
    }

    pub fn has_finding(&self, code: FindingCode) -> bool {
        self.violations.iter().any(|f| f.code == code)
    }

    pub fn findings_with(&self, code: FindingCode) -> Vec<&StructuralFinding> {
        self.violations.iter().filter(|f| f.code == code).collect()
    }

    /// Calendar days covered by log starts, ascending.
    pub fn days(&self) -> Vec<NaiveDate> {
        let mut days: Vec<NaiveDate> = self.logs.iter().map(UsageLog::day).collect();
        days.sort();
        days.dedup();
        days
    }
}

fn header_index(headers: &[String], aliases: &[&str]) -> Option<usize> {
    headers
        .iter()
        .position(|h| aliases.iter().any(|a| h.eq_ignore_ascii_case(a)))
}

/// Accepts full ISO 8601 timestamps (seconds or minute precision, `T` or
/// space separator, optional fraction, optional trailing `Z`). A bare date
/// parses to midnight and is reported via the returned flag.
fn parse_timestamp(raw: &str) -> Option<(NaiveDateTime, bool)> {
    let s = raw.trim();
    let s = s.strip_suffix('Z').unwrap_or(s);
    const FULL: [&str; 6] = [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ];
    for fmt in FULL {
        if let Ok(ts) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some((ts.with_nanosecond(0).unwrap_or(ts), false));
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some((d.and_time(NaiveTime::MIN), true));
    }
    None
}

/// Parses `42`, `42.3` and the comma-decimal form `42,3`. Returns whole
/// seconds (fractions rounded to nearest).
fn parse_duration(raw: &str) -> Option<f64> {
    let s = raw.trim().replace(',', ".");
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parse a CSV dataset. Header aliases are matched case-insensitively.
///
/// Recoverable row problems (date-only timestamps, negative durations,
/// duplicate ids) keep the row and record a finding; rows that cannot form a
/// log at all (bad timestamp, non-numeric duration, empty app name) are
/// dropped and counted. It is a fatal error when a required column is
/// missing, when no data rows exist, or when more than half of the rows fail
/// to parse.
pub fn parse_dataset(csv_text: &str, provenance: Provenance) -> Result<UsageDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(csv_text.as_bytes());

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::FatalParse {
            message: format!("unreadable header row: {e}"),
            findings: vec![StructuralFinding::new(
                FindingCode::MissingColumn,
                None,
                format!("unreadable header row: {e}"),
            )],
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let columns = [
        ("id", header_index(&headers, &ID_ALIASES)),
        ("start", header_index(&headers, &START_ALIASES)),
        ("app", header_index(&headers, &APP_ALIASES)),
        ("duration", header_index(&headers, &DURATION_ALIASES)),
    ];
    let missing: Vec<StructuralFinding> = columns
        .iter()
        .filter(|(_, idx)| idx.is_none())
        .map(|(name, _)| {
            StructuralFinding::new(
                FindingCode::MissingColumn,
                None,
                format!("no header matches the '{name}' column aliases"),
            )
        })
        .collect();
    if !missing.is_empty() {
        return Err(Error::FatalParse {
            message: format!(
                "missing required column(s): {}",
                missing
                    .iter()
                    .map(|f| f.detail.as_str())
                    .collect::<Vec<_>>()
                    .join("; ")
            ),
            findings: missing,
        });
    }
    let idx_id = columns[0].1.unwrap();
    let idx_start = columns[1].1.unwrap();
    let idx_app = columns[2].1.unwrap();
    let idx_dur = columns[3].1.unwrap();

    let mut logs: Vec<UsageLog> = Vec::new();
    let mut findings: Vec<StructuralFinding> = Vec::new();
    let mut row_count = 0usize;
    let mut dropped = 0usize;

    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                row_count += 1;
                dropped += 1;
                findings.push(StructuralFinding::new(
                    FindingCode::BadTimestamp,
                    Some(row_count),
                    format!("unreadable row: {e}"),
                ));
                continue;
            }
        };
        // skip fully blank lines
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        row_count += 1;
        let row = row_count;

        let field = |i: usize| record.get(i).unwrap_or("").trim().to_string();
        let id = field(idx_id);
        let raw_start = field(idx_start);
        let app_id = field(idx_app);
        let raw_dur = field(idx_dur);

        let Some((start, date_only)) = parse_timestamp(&raw_start) else {
            dropped += 1;
            findings.push(StructuralFinding::new(
                FindingCode::BadTimestamp,
                Some(row),
                format!("unparseable timestamp '{raw_start}'"),
            ));
            continue;
        };
        if app_id.is_empty() {
            dropped += 1;
            findings.push(StructuralFinding::new(
                FindingCode::EmptyAppId,
                Some(row),
                "app name is empty after trimming",
            ));
            continue;
        }
        let Some(dur) = parse_duration(&raw_dur) else {
            dropped += 1;
            findings.push(StructuralFinding::new(
                FindingCode::NonNumericDuration,
                Some(row),
                format!("non-numeric duration '{raw_dur}'"),
            ));
            continue;
        };
        if date_only {
            findings.push(StructuralFinding::new(
                FindingCode::DateOnlyTimestamp,
                Some(row),
                format!("timestamp '{raw_start}' has no time of day; midnight assumed"),
            ));
        }
        let duration_s = if dur < 0.0 {
            findings.push(StructuralFinding::new(
                FindingCode::NegativeDuration,
                Some(row),
                format!("negative duration {raw_dur}; clamped to 0"),
            ));
            0
        } else {
            dur.round() as u32
        };
        logs.push(UsageLog {
            id,
            start,
            app_id,
            duration_s,
        });
    }

    if row_count == 0 {
        return Err(Error::FatalParse {
            message: "no data rows".into(),
            findings: vec![StructuralFinding::new(
                FindingCode::EmptyDataset,
                None,
                "file contains a header but no data rows",
            )],
        });
    }
    if dropped * 2 > row_count {
        return Err(Error::FatalParse {
            message: format!("{dropped} of {row_count} rows failed to parse"),
            findings,
        });
    }

    // duplicate ids, in input order
    let mut seen: HashSet<&str> = HashSet::new();
    for (i, log) in logs.iter().enumerate() {
        if !seen.insert(log.id.as_str()) {
            findings.push(StructuralFinding::new(
                FindingCode::DuplicateId,
                Some(i + 1),
                format!("id '{}' occurs more than once", log.id),
            ));
        }
    }

    let mut dataset = UsageDataset {
        logs,
        provenance,
        violations: findings,
    };
    dataset = normalize(dataset);

    // overlap scan over the normalized order
    let overlaps: Vec<StructuralFinding> = dataset
        .logs
        .windows(2)
        .filter(|w| w[0].end() > w[1].start)
        .map(|w| {
            StructuralFinding::new(
                FindingCode::OverlapWarning,
                None,
                format!(
                    "log '{}' runs past the start of log '{}'; derived gaps clamp to 0",
                    w[0].id, w[1].id
                ),
            )
        })
        .collect();
    dataset.violations.extend(overlaps);

    Ok(dataset)
}

/// Stable sort by (start, id). Appends an `UnsortedInput` finding when the
/// input order differed; calling it again is a no-op.
pub fn normalize(mut dataset: UsageDataset) -> UsageDataset {
    let sorted = dataset
        .logs
        .windows(2)
        .all(|w| (w[0].start, &w[0].id) <= (w[1].start, &w[1].id));
    if !sorted {
        dataset
            .logs
            .sort_by(|a, b| (a.start, &a.id).cmp(&(b.start, &b.id)));
        dataset.violations.push(StructuralFinding::new(
            FindingCode::UnsortedInput,
            None,
            "rows were not in chronological order; sorted by (start, id)",
        ));
    }
    dataset
}

/// Serialize to the canonical four-column CSV. Fields containing commas,
/// quotes or newlines are quoted per RFC 4180.
pub fn write_dataset(dataset: &UsageDataset) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(CANONICAL_HEADER).expect("in-memory write");
    for log in &dataset.logs {
        w.write_record([
            log.id.as_str(),
            &log.start.format("%Y-%m-%dT%H:%M:%S").to_string(),
            log.app_id.as_str(),
            &log.duration_s.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}
