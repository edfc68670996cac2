//! Machine- and human-readable evaluation reports.
//!
//! The JSON schema is stable: field layout follows the struct declarations
//! here, and every number shown in the printed summary is taken from the
//! same report struct that gets serialized.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

use crate::compliance::{self, CheckStatus, ComplianceReport};
use crate::model::UsageDataset;
use crate::realism::{self, DistComparison, RealismConfig, RealismReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The evaluation knobs that were actually in effect, echoed into every
/// report so runs are auditable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveConfig {
    pub gap_threshold_s: i64,
    pub top_k: usize,
    pub ks_fail_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullReport {
    pub dataset_ref: String,
    pub seed_ref: Option<String>,
    pub compliance: ComplianceReport,
    pub realism: RealismReport,
    pub config_echo: EffectiveConfig,
    pub tool_version: String,
}

pub fn build_full_report(
    dataset_ref: impl Into<String>,
    seed_ref: Option<String>,
    dataset: &UsageDataset,
    seed: Option<&UsageDataset>,
    config: &RealismConfig,
) -> FullReport {
    FullReport {
        dataset_ref: dataset_ref.into(),
        seed_ref,
        compliance: compliance::evaluate_compliance(dataset),
        realism: realism::evaluate_realism(dataset, seed, config),
        config_echo: EffectiveConfig {
            gap_threshold_s: config.gap_threshold_s,
            top_k: config.top_k,
            ks_fail_threshold: config.ks_fail_threshold,
        },
        tool_version: TOOL_VERSION.to_string(),
    }
}

/// Hard criteria for the exit code: S1, S2, B1 and B2. B3–B5 are
/// comparative and never fail a run on their own.
pub fn hard_criteria_pass(report: &FullReport) -> bool {
    [
        report.compliance.s1.status,
        report.compliance.s2.status,
        report.realism.b1.status,
        report.realism.b2.status,
    ]
    .iter()
    .all(|s| *s != CheckStatus::Fail)
}

pub fn status_str(status: CheckStatus) -> &'static str {
    match status {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "fail",
        CheckStatus::NotAssessable => "not_assessable",
        CheckStatus::ReportOnly => "report_only",
    }
}

fn dist_cell(comparison: &DistComparison) -> String {
    match (comparison.ks_stat, comparison.wasserstein_log10) {
        (Some(ks), Some(w)) => format!("KS {ks} / W {w}"),
        _ => match &comparison.histogram {
            Some(h) => format!("{} unit(s), no seed comparison", h.total),
            None => "-".into(),
        },
    }
}

/// Plain-text summary table: criterion, status, key number.
pub fn render_summary(report: &FullReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<28} {:<15} detail", "criterion", "status");
    let mut row = |criterion: &str, status: CheckStatus, value: String| {
        let _ = writeln!(out, "{criterion:<28} {:<15} {value}", status_str(status));
    };
    row(
        "S1 columns and formats",
        report.compliance.s1.status,
        format!("{} finding(s)", report.compliance.s1.findings.len()),
    );
    row(
        "S2 raw event rows",
        report.compliance.s2.status,
        report.compliance.s2.detail.clone(),
    );
    row(
        "S3 single reply",
        report.compliance.s3.status,
        report.compliance.s3.detail.clone(),
    );
    row(
        "B1 daily total",
        report.realism.b1.status,
        format!("{} h", report.realism.b1.total_usage_h),
    );
    row(
        "B2 sleep period",
        report.realism.b2.status,
        format!("longest gap {} s", report.realism.b2.longest_gap_s),
    );
    row(
        "B3 app variety",
        report.realism.b3.status,
        match report.realism.b3.top_k_overlap_pct {
            Some(pct) => format!("{} app(s), top-k overlap {pct}%", report.realism.b3.app_count),
            None => format!("{} app(s)", report.realism.b3.app_count),
        },
    );
    row(
        "B4 durations (log level)",
        report.realism.b4.log_level.status,
        dist_cell(&report.realism.b4.log_level),
    );
    row(
        "B4 durations (session level)",
        report.realism.b4.session_level.status,
        dist_cell(&report.realism.b4.session_level),
    );
    row(
        "B5 gaps (log level)",
        report.realism.b5.log_level.status,
        dist_cell(&report.realism.b5.log_level),
    );
    row(
        "B5 gaps (session level)",
        report.realism.b5.session_level.status,
        dist_cell(&report.realism.b5.session_level),
    );
    out
}

/// Write-then-rename so readers never observe a half-written file.
pub fn write_text_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

pub fn write_json_report(path: &Path, report: &FullReport) -> crate::error::Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    write_text_atomic(path, &json)?;
    Ok(())
}
