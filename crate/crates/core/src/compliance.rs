//! Structural-compliance checks S1–S3.
//!
//! S1 requires correct columns and value formats, S2 requires raw per-event
//! rows rather than aggregated summaries, and S3 requires the dataset to have
//! arrived in a single model reply. S2 cannot be decided from the data with
//! certainty, so it uses a deliberately conservative heuristic that prefers a
//! false pass over a false fail.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::model::{FindingCode, StructuralFinding, UsageDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotAssessable,
    /// Reported for information; never drives an exit code.
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub status: CheckStatus,
    pub findings: Vec<StructuralFinding>,
    pub detail: String,
}

impl CheckResult {
    fn pass(detail: impl Into<String>) -> Self {
        CheckResult {
            status: CheckStatus::Pass,
            findings: Vec::new(),
            detail: detail.into(),
        }
    }

    fn fail(detail: impl Into<String>, findings: Vec<StructuralFinding>) -> Self {
        CheckResult {
            status: CheckStatus::Fail,
            findings,
            detail: detail.into(),
        }
    }

    fn not_assessable(detail: impl Into<String>) -> Self {
        CheckResult {
            status: CheckStatus::NotAssessable,
            findings: Vec::new(),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub s1: CheckResult,
    pub s2: CheckResult,
    pub s3: CheckResult,
}

/// Finding codes that constitute an S1 format violation.
const S1_FAIL_CODES: [FindingCode; 6] = [
    FindingCode::BadTimestamp,
    FindingCode::DateOnlyTimestamp,
    FindingCode::NegativeDuration,
    FindingCode::DuplicateId,
    FindingCode::NonNumericDuration,
    FindingCode::EmptyAppId,
];

/// S1: required fields present with correct formats.
pub fn check_s1(dataset: &UsageDataset) -> CheckResult {
    let findings: Vec<StructuralFinding> = dataset
        .violations
        .iter()
        .filter(|f| S1_FAIL_CODES.contains(&f.code))
        .cloned()
        .collect();
    if findings.is_empty() {
        CheckResult::pass("all rows have well-formed id, timestamp, app and duration values")
    } else {
        CheckResult::fail(
            format!("{} format violation(s) recorded while parsing", findings.len()),
            findings,
        )
    }
}

/// S2: rows describe discrete usage events, not aggregated totals.
///
/// Fails only when all three signals agree: (a) no (app, day) pair occurs
/// twice, (b) timestamps carry no within-day information (all date-only, or
/// identical within each day), and (c) mean duration exceeds 30 minutes.
pub fn check_s2(dataset: &UsageDataset) -> CheckResult {
    let logs = &dataset.logs;
    if logs.is_empty() {
        return CheckResult::not_assessable("no rows to assess");
    }

    let mut per_app_day: HashMap<(&str, chrono::NaiveDate), usize> = HashMap::new();
    for log in logs {
        *per_app_day.entry((log.app_id.as_str(), log.day())).or_insert(0) += 1;
    }
    let one_row_per_app_day = per_app_day.values().all(|&n| n <= 1);

    let all_date_only = dataset
        .violations
        .iter()
        .filter(|f| f.code == FindingCode::DateOnlyTimestamp)
        .count()
        >= logs.len();
    let mut day_times: HashMap<chrono::NaiveDate, Vec<chrono::NaiveTime>> = HashMap::new();
    for log in logs {
        day_times.entry(log.day()).or_default().push(log.start.time());
    }
    let uniform_within_day = day_times
        .values()
        .all(|times| times.windows(2).all(|w| w[0] == w[1]));
    let no_time_information = all_date_only || uniform_within_day;

    let mean_duration =
        logs.iter().map(|l| f64::from(l.duration_s)).sum::<f64>() / logs.len() as f64;
    let long_mean = mean_duration > 1800.0;

    if one_row_per_app_day && no_time_information && long_mean {
        let detail = format!(
            "looks like an aggregated summary: one row per (app, day); {}; mean duration {:.0} s > 1800 s",
            if all_date_only {
                "timestamps are date-only"
            } else {
                "timestamps carry no within-day variation"
            },
            mean_duration
        );
        CheckResult::fail(
            detail.clone(),
            vec![StructuralFinding {
                code: FindingCode::AggregatedRows,
                row: None,
                detail,
            }],
        )
    } else {
        CheckResult::pass(format!(
            "per-event rows (one-row-per-app-day: {one_row_per_app_day}, no-time-info: {no_time_information}, mean duration {mean_duration:.0} s)"
        ))
    }
}

/// S3: complete dataset delivered in a single model reply.
pub fn check_s3(dataset: &UsageDataset) -> CheckResult {
    match dataset.provenance.reply_count {
        Some(1) => CheckResult::pass("dataset produced by a single model reply"),
        Some(n) => CheckResult::fail(format!("dataset assembled from {n} replies"), Vec::new()),
        None => CheckResult::not_assessable("reply count unknown (no run provenance)"),
    }
}

pub fn evaluate_compliance(dataset: &UsageDataset) -> ComplianceReport {
    ComplianceReport {
        s1: check_s1(dataset),
        s2: check_s2(dataset),
        s3: check_s3(dataset),
    }
}
