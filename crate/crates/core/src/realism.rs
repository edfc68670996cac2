//! Behavioral-realism metrics B1–B5.
//!
//! B1 and B2 are absolute plausibility checks (daily total in a realistic
//! range; a sleep-compatible non-usage period). B3–B5 compare a dataset
//! against a seed: app variety and top-k overlap, and the shapes of the
//! duration and inter-unit gap distributions under both session-grouping
//! methods. Distribution distances are reported as a two-sample
//! Kolmogorov–Smirnov statistic on raw values and a Wasserstein-1 distance on
//! log10(1 + value); there is no canonical pass threshold for these, so they
//! default to report-only status.

use chrono::{Duration, NaiveDate, NaiveDateTime, NaiveTime};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::compliance::{CheckResult, CheckStatus};
use crate::error::{Error, Result};
use crate::model::{FindingCode, UsageDataset};
use crate::session::{self, GapSeries};

/// Inclusive bounds for a realistic daily total, in hours.
pub const B1_MIN_HOURS: f64 = 1.0;
pub const B1_MAX_HOURS: f64 = 20.0;

/// Sleep window: 20:00 through 10:00 the next day.
pub const SLEEP_WINDOW_START_HOUR: u32 = 20;
pub const SLEEP_WINDOW_END_HOUR: u32 = 10;

/// Minimum qualifying non-usage period for B2: five hours.
pub const MIN_SLEEP_GAP_S: i64 = 5 * 3600;

/// Histogram bin edges in seconds; the first bin holds exactly the zeros and
/// the last bin is open-ended above one hour.
pub const HISTOGRAM_EDGES_S: [i64; 6] = [0, 1, 10, 100, 1000, 3600];

#[derive(Debug, Clone)]
pub struct RealismConfig {
    pub gap_threshold_s: i64,
    pub top_k: usize,
    /// Optional KS threshold for B4/B5: when set, a comparison fails iff
    /// D exceeds it; when unset those criteria stay report-only.
    pub ks_fail_threshold: Option<f64>,
    pub aliases: AliasMap,
}

impl Default for RealismConfig {
    fn default() -> Self {
        RealismConfig {
            gap_threshold_s: session::DEFAULT_GAP_THRESHOLD_S,
            top_k: 5,
            ks_fail_threshold: None,
            aliases: AliasMap::bundled(),
        }
    }
}

/// Total usage in hours, unrounded.
pub fn total_usage_hours(dataset: &UsageDataset) -> f64 {
    dataset
        .logs
        .iter()
        .map(|l| f64::from(l.duration_s))
        .sum::<f64>()
        / 3600.0
}

/// Usage seconds per calendar day (a log counts toward the day it starts).
pub fn usage_by_day(dataset: &UsageDataset) -> BTreeMap<NaiveDate, i64> {
    let mut days: BTreeMap<NaiveDate, i64> = BTreeMap::new();
    for log in &dataset.logs {
        *days.entry(log.day()).or_insert(0) += i64::from(log.duration_s);
    }
    days
}

fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

/// B1: every calendar day's total inside [1, 20] hours, inclusive.
pub fn check_b1(dataset: &UsageDataset) -> CheckResult {
    if dataset.logs.is_empty() {
        return CheckResult {
            status: CheckStatus::NotAssessable,
            findings: Vec::new(),
            detail: "no logs".into(),
        };
    }
    let days = usage_by_day(dataset);
    let out_of_range: Vec<String> = days
        .iter()
        .filter(|(_, &s)| {
            let h = s as f64 / 3600.0;
            !(B1_MIN_HOURS..=B1_MAX_HOURS).contains(&h)
        })
        .map(|(d, &s)| format!("{d}: {:.1} h", s as f64 / 3600.0))
        .collect();
    if out_of_range.is_empty() {
        CheckResult {
            status: CheckStatus::Pass,
            findings: Vec::new(),
            detail: format!("total {:.1} h across {} day(s)", total_usage_hours(dataset), days.len()),
        }
    } else {
        CheckResult {
            status: CheckStatus::Fail,
            findings: Vec::new(),
            detail: format!("daily total outside [1, 20] h: {}", out_of_range.join(", ")),
        }
    }
}

/// The longest inactivity period between consecutive logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LongestGap {
    pub gap_s: i64,
    pub gap_start: NaiveDateTime,
    pub gap_end: NaiveDateTime,
}

/// Longest inter-log inactivity (activity end to next start) within the
/// dataset's extent. `None` when fewer than two logs exist. Errors on
/// date-only timestamps.
pub fn longest_gap(dataset: &UsageDataset) -> Result<Option<LongestGap>> {
    if dataset.has_finding(FindingCode::DateOnlyTimestamp) {
        return Err(Error::MissingTimeOfDay);
    }
    let mut best: Option<LongestGap> = None;
    for w in dataset.logs.windows(2) {
        let start = w[0].end();
        let end = w[1].start;
        let gap_s = (end - start).num_seconds().max(0);
        let (gap_start, gap_end) = if gap_s > 0 { (start, end) } else { (end, end) };
        if best.as_ref().is_none_or(|b| gap_s > b.gap_s) {
            best = Some(LongestGap {
                gap_s,
                gap_start,
                gap_end,
            });
        }
    }
    Ok(best)
}

/// Length in seconds of the largest single-window intersection between the
/// interval [start, end) and a sleep window (20:00 to 10:00 next day).
fn sleep_window_overlap_s(start: NaiveDateTime, end: NaiveDateTime) -> i64 {
    if end <= start {
        return 0;
    }
    let mut best = 0i64;
    let mut day = start.date() - Duration::days(1);
    while day <= end.date() {
        let w_start = day.and_time(NaiveTime::from_hms_opt(SLEEP_WINDOW_START_HOUR, 0, 0).unwrap());
        let w_end = (day + Duration::days(1))
            .and_time(NaiveTime::from_hms_opt(SLEEP_WINDOW_END_HOUR, 0, 0).unwrap());
        let lo = start.max(w_start);
        let hi = end.min(w_end);
        if hi > lo {
            best = best.max((hi - lo).num_seconds());
        }
        day += Duration::days(1);
    }
    best
}

/// B2: some non-usage period overlaps the 20:00–10:00 sleep window by at
/// least five hours.
pub fn check_b2(dataset: &UsageDataset) -> CheckResult {
    if dataset.has_finding(FindingCode::DateOnlyTimestamp) {
        return CheckResult {
            status: CheckStatus::NotAssessable,
            findings: Vec::new(),
            detail: "timestamps lack time of day; intervals cannot be verified".into(),
        };
    }
    let mut best_overlap = 0i64;
    let mut best_gap = 0i64;
    for w in dataset.logs.windows(2) {
        let start = w[0].end();
        let end = w[1].start;
        let gap_s = (end - start).num_seconds();
        if gap_s <= 0 {
            continue;
        }
        best_gap = best_gap.max(gap_s);
        best_overlap = best_overlap.max(sleep_window_overlap_s(start, end));
    }
    if best_overlap >= MIN_SLEEP_GAP_S {
        CheckResult {
            status: CheckStatus::Pass,
            findings: Vec::new(),
            detail: format!(
                "a non-usage period overlaps the sleep window by {:.1} h",
                best_overlap as f64 / 3600.0
            ),
        }
    } else {
        CheckResult {
            status: CheckStatus::Fail,
            findings: Vec::new(),
            detail: if best_gap == 0 {
                "usage is continuous; no non-usage interval found".into()
            } else {
                format!(
                    "largest sleep-window overlap is {:.1} h (< 5 h); longest gap {:.1} h",
                    best_overlap as f64 / 3600.0,
                    best_gap as f64 / 3600.0
                )
            },
        }
    }
}

/// Case-folded app-name alias table used when comparing app sets.
#[derive(Debug, Clone, Default)]
pub struct AliasMap {
    map: BTreeMap<String, String>,
}

impl AliasMap {
    pub fn from_csv(text: &str) -> Result<AliasMap> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.eq_ignore_ascii_case("alias,canonical")) {
                continue;
            }
            let (alias, canonical) = line.split_once(',').ok_or_else(|| {
                Error::InvalidConfig(format!("alias file line {} is not 'alias,canonical'", i + 1))
            })?;
            map.insert(
                alias.trim().to_lowercase(),
                canonical.trim().to_lowercase(),
            );
        }
        Ok(AliasMap { map })
    }

    pub fn bundled() -> AliasMap {
        AliasMap::from_csv(crate::assets::APP_ALIASES_CSV).expect("bundled alias file is valid")
    }

    /// Trimmed, case-folded, alias-resolved name for set comparisons.
    pub fn canonical(&self, name: &str) -> String {
        let folded = name.trim().to_lowercase();
        self.map.get(&folded).cloned().unwrap_or(folded)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppStats {
    pub app_count: usize,
    pub per_app_time_s: BTreeMap<String, i64>,
    /// Most-used apps by total time, ties broken by name ascending.
    pub top_k: Vec<String>,
}

pub fn app_stats(dataset: &UsageDataset, k: usize) -> AppStats {
    let mut per_app_time_s: BTreeMap<String, i64> = BTreeMap::new();
    for log in &dataset.logs {
        *per_app_time_s.entry(log.app_id.clone()).or_insert(0) += i64::from(log.duration_s);
    }
    let mut ranked: Vec<(&String, &i64)> = per_app_time_s.iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    AppStats {
        app_count: per_app_time_s.len(),
        top_k: ranked.iter().take(k).map(|(name, _)| (*name).clone()).collect(),
        per_app_time_s,
    }
}

/// Percentage of the k most-used apps shared between a dataset and the seed,
/// as an order-insensitive set intersection over canonical names.
pub fn top_k_overlap(
    dataset: &UsageDataset,
    seed: &UsageDataset,
    k: usize,
    aliases: &AliasMap,
) -> Result<f64> {
    let ds_stats = app_stats(dataset, k);
    let seed_stats = app_stats(seed, k);
    for stats in [&ds_stats, &seed_stats] {
        if k > stats.app_count {
            return Err(Error::KTooLarge {
                k,
                app_count: stats.app_count,
            });
        }
    }
    let ds_set: std::collections::BTreeSet<String> =
        ds_stats.top_k.iter().map(|n| aliases.canonical(n)).collect();
    let shared = seed_stats
        .top_k
        .iter()
        .map(|n| aliases.canonical(n))
        .collect::<std::collections::BTreeSet<String>>()
        .intersection(&ds_set)
        .count();
    Ok(shared as f64 / k as f64 * 100.0)
}

/// Log-binned histogram over non-negative second values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    /// Lower edges; bin i covers [edges[i], edges[i+1]) and the last bin is
    /// unbounded above.
    pub bin_edges_s: Vec<i64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

pub fn build_histogram(values_s: &[i64]) -> Histogram {
    let edges = HISTOGRAM_EDGES_S.to_vec();
    let mut counts = vec![0u64; edges.len()];
    for &v in values_s {
        let v = v.max(0);
        let bin = edges.iter().rposition(|&e| v >= e).unwrap_or(0);
        counts[bin] += 1;
    }
    Histogram {
        bin_edges_s: edges,
        counts,
        total: values_s.len() as u64,
    }
}

/// Render a histogram as `bin_low,bin_high,count` CSV for external plotting.
pub fn histogram_csv(histogram: &Histogram) -> String {
    let mut out = String::from("bin_low,bin_high,count\n");
    for (i, &count) in histogram.counts.iter().enumerate() {
        let low = histogram.bin_edges_s[i];
        let high = histogram
            .bin_edges_s
            .get(i + 1)
            .map(|e| e.to_string())
            .unwrap_or_else(|| "inf".into());
        out.push_str(&format!("{low},{high},{count}\n"));
    }
    out
}

/// Two-sample Kolmogorov–Smirnov statistic: the largest absolute difference
/// between the two empirical CDFs.
pub fn ks_statistic(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::EmptySample("ks statistic needs non-empty samples"));
    }
    let mut a: Vec<f64> = sample_a.to_vec();
    let mut b: Vec<f64> = sample_b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));

    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut stat = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        stat = stat.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(stat)
}

/// Wasserstein-1 distance between two empirical distributions: the integral
/// of |F_a - F_b| over the merged support.
pub fn wasserstein_1d(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::EmptySample("wasserstein distance needs non-empty samples"));
    }
    let mut a: Vec<f64> = sample_a.to_vec();
    let mut b: Vec<f64> = sample_b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));

    let mut all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    all.sort_by(|x, y| x.total_cmp(y));

    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut distance = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    for w in all.windows(2) {
        while i < a.len() && a[i] <= w[0] {
            i += 1;
        }
        while j < b.len() && b[j] <= w[0] {
            j += 1;
        }
        distance += (i as f64 / na - j as f64 / nb).abs() * (w[1] - w[0]);
    }
    Ok(distance)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    /// Two-sample KS statistic on raw values, in [0, 1].
    pub ks_stat: f64,
    /// Wasserstein-1 distance after the log10(1 + v) transform.
    pub wasserstein_log10: f64,
}

/// KS on raw values plus Wasserstein-1 on log10(1 + value).
pub fn compare_distributions(sample_a: &[i64], sample_b: &[i64]) -> Result<DistanceStats> {
    let raw_a: Vec<f64> = sample_a.iter().map(|&v| v as f64).collect();
    let raw_b: Vec<f64> = sample_b.iter().map(|&v| v as f64).collect();
    let log_a: Vec<f64> = sample_a.iter().map(|&v| (1.0 + v as f64).log10()).collect();
    let log_b: Vec<f64> = sample_b.iter().map(|&v| (1.0 + v as f64).log10()).collect();
    Ok(DistanceStats {
        ks_stat: ks_statistic(&raw_a, &raw_b)?,
        wasserstein_log10: wasserstein_1d(&log_a, &log_b)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B1Summary {
    pub total_usage_h: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B2Summary {
    pub longest_gap_s: i64,
    pub qualifying_gap_found: bool,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B3Summary {
    pub app_count: usize,
    pub top_k_overlap_pct: Option<f64>,
    pub status: CheckStatus,
}

/// One distribution comparison: the dataset's own histogram plus distances
/// against the seed when one was supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistComparison {
    pub ks_stat: Option<f64>,
    pub wasserstein_log10: Option<f64>,
    pub histogram: Option<Histogram>,
    pub status: CheckStatus,
}

/// B4/B5 are computed under both grouping methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualComparison {
    pub log_level: DistComparison,
    pub session_level: DistComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealismReport {
    pub b1: B1Summary,
    pub b2: B2Summary,
    pub b3: B3Summary,
    pub b4: DualComparison,
    pub b5: DualComparison,
}

struct UnitSeries {
    log_durations: Vec<i64>,
    log_gaps: Option<Vec<i64>>,
    session_durations: Option<Vec<i64>>,
    session_gaps: Option<Vec<i64>>,
}

fn unit_series(dataset: &UsageDataset, gap_threshold_s: i64) -> UnitSeries {
    let log_durations = dataset
        .logs
        .iter()
        .map(|l| i64::from(l.duration_s))
        .collect();
    let log_gaps = session::log_level_units(dataset)
        .ok()
        .map(|(_, gaps)| gaps.gaps_s);
    let sessions = session::sessionize(dataset, gap_threshold_s).ok();
    let session_durations = sessions.as_ref().map(|s| session::session_durations(s));
    let session_gaps = sessions.as_ref().map(|s| session::session_gaps(s).gaps_s);
    UnitSeries {
        log_durations,
        log_gaps,
        session_durations,
        session_gaps,
    }
}

fn compare_series(
    dataset_series: Option<&Vec<i64>>,
    seed_series: Option<Option<&Vec<i64>>>,
    ks_fail_threshold: Option<f64>,
) -> DistComparison {
    let Some(values) = dataset_series else {
        return DistComparison {
            ks_stat: None,
            wasserstein_log10: None,
            histogram: None,
            status: CheckStatus::NotAssessable,
        };
    };
    let histogram = Some(build_histogram(values));
    let stats = match seed_series {
        // seed supplied and its series available: attempt the comparison
        Some(Some(seed_values)) => match compare_distributions(values, seed_values) {
            Ok(stats) => Some(Ok(stats)),
            Err(_) => Some(Err(())),
        },
        // seed supplied but its series unavailable
        Some(None) => Some(Err(())),
        // no seed: histogram only
        None => None,
    };
    match stats {
        None => DistComparison {
            ks_stat: None,
            wasserstein_log10: None,
            histogram,
            status: CheckStatus::ReportOnly,
        },
        Some(Err(())) => DistComparison {
            ks_stat: None,
            wasserstein_log10: None,
            histogram,
            status: CheckStatus::NotAssessable,
        },
        Some(Ok(stats)) => {
            let status = match ks_fail_threshold {
                Some(threshold) if stats.ks_stat > threshold => CheckStatus::Fail,
                Some(_) => CheckStatus::Pass,
                None => CheckStatus::ReportOnly,
            };
            DistComparison {
                ks_stat: Some(stats.ks_stat),
                wasserstein_log10: Some(stats.wasserstein_log10),
                histogram,
                status,
            }
        }
    }
}

/// Run B1–B5. Comparison statistics are filled only when a seed dataset is
/// supplied; individual metrics degrade to not-assessable instead of
/// aborting the report.
pub fn evaluate_realism(
    dataset: &UsageDataset,
    seed: Option<&UsageDataset>,
    config: &RealismConfig,
) -> RealismReport {
    let b1_check = check_b1(dataset);
    let b1 = B1Summary {
        total_usage_h: round1(total_usage_hours(dataset)),
        status: b1_check.status,
    };

    let b2_check = check_b2(dataset);
    let longest = longest_gap(dataset).ok().flatten();
    let b2 = B2Summary {
        longest_gap_s: longest.map(|g| g.gap_s).unwrap_or(0),
        qualifying_gap_found: b2_check.status == CheckStatus::Pass,
        status: b2_check.status,
    };

    let stats = app_stats(dataset, config.top_k);
    let b3 = match seed {
        None => B3Summary {
            app_count: stats.app_count,
            top_k_overlap_pct: None,
            status: CheckStatus::ReportOnly,
        },
        Some(seed_ds) => match top_k_overlap(dataset, seed_ds, config.top_k, &config.aliases) {
            Ok(pct) => B3Summary {
                app_count: stats.app_count,
                top_k_overlap_pct: Some(pct),
                status: CheckStatus::ReportOnly,
            },
            Err(_) => B3Summary {
                app_count: stats.app_count,
                top_k_overlap_pct: None,
                status: CheckStatus::NotAssessable,
            },
        },
    };

    let ds_series = unit_series(dataset, config.gap_threshold_s);
    let seed_series = seed.map(|s| unit_series(s, config.gap_threshold_s));

    let pick = |f: fn(&UnitSeries) -> Option<&Vec<i64>>| -> Option<Option<&Vec<i64>>> {
        seed_series.as_ref().map(f)
    };
    let threshold = config.ks_fail_threshold;
    let b4 = DualComparison {
        log_level: compare_series(
            Some(&ds_series.log_durations),
            pick(|s| Some(&s.log_durations)),
            threshold,
        ),
        session_level: compare_series(
            ds_series.session_durations.as_ref(),
            pick(|s| s.session_durations.as_ref()),
            threshold,
        ),
    };
    let b5 = DualComparison {
        log_level: compare_series(
            ds_series.log_gaps.as_ref(),
            pick(|s| s.log_gaps.as_ref()),
            threshold,
        ),
        session_level: compare_series(
            ds_series.session_gaps.as_ref(),
            pick(|s| s.session_gaps.as_ref()),
            threshold,
        ),
    };

    RealismReport { b1, b2, b3, b4, b5 }
}

/// Convenience view of the assessable gap series for histogram emission.
pub fn gap_series_for(dataset: &UsageDataset, session_level: bool, gap_threshold_s: i64) -> Result<GapSeries> {
    if session_level {
        let sessions = session::sessionize(dataset, gap_threshold_s)?;
        Ok(session::session_gaps(&sessions))
    } else {
        session::log_level_units(dataset).map(|(_, gaps)| gaps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_dataset, Provenance};

    fn ds(rows: &[(&str, &str, u32)]) -> UsageDataset {
        let mut csv = String::from("id,created-at,app-id,time-seconds\n");
        for (i, (start, app, dur)) in rows.iter().enumerate() {
            csv.push_str(&format!("{},{start},{app},{dur}\n", i + 1));
        }
        parse_dataset(&csv, Provenance::real()).unwrap()
    }

    #[test]
    fn total_usage_rounds_to_one_decimal() {
        // 42.3 h and 6.7 h exactly
        let d = ds(&[
            ("2025-04-18T08:00:00", "A", 152_279),
            ("2025-04-18T08:00:01", "B", 1),
        ]);
        assert_eq!(round1(total_usage_hours(&d)), 42.3);
        let d = ds(&[("2025-04-18T08:00:00", "A", 24_120)]);
        assert_eq!(round1(total_usage_hours(&d)), 6.7);
    }

    #[test]
    fn empty_dataset_total_is_zero() {
        let d = UsageDataset::new(Vec::new(), Provenance::real());
        assert_eq!(total_usage_hours(&d), 0.0);
    }

    #[test]
    fn b1_bounds_inclusive() {
        let exactly_one_hour = ds(&[("2025-04-18T08:00:00", "A", 3600)]);
        assert_eq!(check_b1(&exactly_one_hour).status, CheckStatus::Pass);
        let too_much = ds(&[("2025-04-18T08:00:00", "A", 152_280)]);
        assert_eq!(check_b1(&too_much).status, CheckStatus::Fail);
        let too_little = ds(&[("2025-04-18T08:00:00", "A", 3599)]);
        assert_eq!(check_b1(&too_little).status, CheckStatus::Fail);
    }

    #[test]
    fn longest_gap_exact_difference() {
        let d = ds(&[
            ("2025-04-18T00:10:00", "A", 1003), // ends 00:26:43
            ("2025-04-18T08:00:00", "B", 20),
        ]);
        let gap = longest_gap(&d).unwrap().unwrap();
        assert_eq!(gap.gap_s, 27_197); // 07:33:17
    }

    #[test]
    fn continuous_usage_has_zero_gap() {
        let d = ds(&[
            ("2025-04-18T08:00:00", "A", 300),
            ("2025-04-18T08:05:00", "B", 300),
        ]);
        let gap = longest_gap(&d).unwrap().unwrap();
        assert_eq!(gap.gap_s, 0);
        assert_eq!(check_b2(&d).status, CheckStatus::Fail);
    }

    #[test]
    fn b2_overnight_gap_passes() {
        let d = ds(&[
            ("2025-04-18T00:10:00", "A", 1003),
            ("2025-04-18T08:00:00", "B", 20),
        ]);
        assert_eq!(check_b2(&d).status, CheckStatus::Pass);
    }

    #[test]
    fn b2_daytime_gap_fails() {
        // 6 h gap entirely 11:00-17:00, outside the sleep window
        let d = ds(&[
            ("2025-04-18T10:00:00", "A", 3600), // ends 11:00
            ("2025-04-18T17:00:00", "B", 3600),
        ]);
        assert_eq!(check_b2(&d).status, CheckStatus::Fail);
    }

    #[test]
    fn b2_not_assessable_on_date_only() {
        let csv = "id,created-at,app-id,time-seconds\n1,2025-04-18,A,3600\n";
        let d = parse_dataset(csv, Provenance::real()).unwrap();
        assert_eq!(check_b2(&d).status, CheckStatus::NotAssessable);
    }

    #[test]
    fn sleep_window_intersection_rules() {
        let t = |s: &str| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S").unwrap();
        // 21:00 -> 02:00: 5 h inside the window
        assert_eq!(
            sleep_window_overlap_s(t("2025-04-18T21:00:00"), t("2025-04-19T02:00:00")),
            18_000
        );
        // 18:00 -> 21:30: only 20:00-21:30 counts
        assert_eq!(
            sleep_window_overlap_s(t("2025-04-18T18:00:00"), t("2025-04-18T21:30:00")),
            5_400
        );
        // spanning two nights: a single window caps the credit at 14 h
        assert_eq!(
            sleep_window_overlap_s(t("2025-04-18T20:00:00"), t("2025-04-20T10:00:00")),
            14 * 3600
        );
    }

    #[test]
    fn app_stats_counts_and_order() {
        let d = ds(&[
            ("2025-04-18T08:00:00", "B", 100),
            ("2025-04-18T09:00:00", "A", 100),
            ("2025-04-18T10:00:00", "C", 50),
        ]);
        let stats = app_stats(&d, 2);
        assert_eq!(stats.app_count, 3);
        // tie on time broken by name ascending
        assert_eq!(stats.top_k, vec!["A".to_string(), "B".to_string()]);
    }

    #[test]
    fn single_app_dataset() {
        let d = ds(&[("2025-04-18T08:00:00", "Solo", 100)]);
        let stats = app_stats(&d, 5);
        assert_eq!(stats.app_count, 1);
        assert_eq!(stats.top_k, vec!["Solo".to_string()]);
    }

    #[test]
    fn overlap_is_case_and_alias_insensitive() {
        let seed = ds(&[
            ("2025-04-18T08:00:00", "Google Chrome", 500),
            ("2025-04-18T09:00:00", "WhatsApp", 400),
        ]);
        let synth = ds(&[
            ("2025-04-18T08:00:00", "Chrome", 900),
            ("2025-04-18T09:00:00", "Whatsapp", 800),
        ]);
        let pct = top_k_overlap(&synth, &seed, 2, &AliasMap::bundled()).unwrap();
        assert_eq!(pct, 100.0);
    }

    #[test]
    fn overlap_errors_when_k_exceeds_app_count() {
        let seed = ds(&[("2025-04-18T08:00:00", "A", 500)]);
        let err = top_k_overlap(&seed, &seed, 5, &AliasMap::bundled());
        assert!(matches!(err, Err(Error::KTooLarge { .. })));
    }

    #[test]
    fn self_overlap_is_full() {
        let d = ds(&[
            ("2025-04-18T08:00:00", "A", 500),
            ("2025-04-18T09:00:00", "B", 400),
            ("2025-04-18T10:00:00", "C", 300),
        ]);
        assert_eq!(top_k_overlap(&d, &d, 3, &AliasMap::bundled()).unwrap(), 100.0);
    }

    #[test]
    fn histogram_zero_bin_and_edges() {
        let h = build_histogram(&[0]);
        assert_eq!(h.counts, vec![1, 0, 0, 0, 0, 0]);
        let h = build_histogram(&[1, 9, 10]);
        assert_eq!(h.counts, vec![0, 2, 1, 0, 0, 0]);
        let h = build_histogram(&[3600, 3599, 100_000]);
        assert_eq!(h.counts, vec![0, 0, 0, 0, 1, 2]);
        assert_eq!(h.total, 3);
    }

    #[test]
    fn histogram_csv_format() {
        let h = build_histogram(&[0, 5, 2000]);
        let csv = histogram_csv(&h);
        assert!(csv.starts_with("bin_low,bin_high,count\n0,1,1\n1,10,1\n"));
        assert!(csv.ends_with("3600,inf,0\n"));
    }

    #[test]
    fn ks_identical_and_disjoint() {
        let a = vec![1.0, 2.0, 3.0];
        assert_eq!(ks_statistic(&a, &a).unwrap(), 0.0);
        let b = vec![10_000.0, 20_000.0];
        assert_eq!(ks_statistic(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn ks_empty_sample_errors() {
        assert!(ks_statistic(&[], &[1.0]).is_err());
    }

    /// Exhaustive reference: evaluate both ECDFs at every sample point.
    fn ks_oracle(a: &[f64], b: &[f64]) -> f64 {
        let ecdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        a.iter()
            .chain(b.iter())
            .map(|&x| (ecdf(a, x) - ecdf(b, x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn ks_matches_exhaustive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let na = rng.gen_range(1..=50);
            let nb = rng.gen_range(1..=50);
            // integer-ish values force ties across and within samples
            let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0..30) as f64).collect();
            let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0..30) as f64).collect();
            let got = ks_statistic(&a, &b).unwrap();
            let want = ks_oracle(&a, &b);
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
    }

    #[test]
    fn wasserstein_matches_sorted_difference_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=40);
            let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..100.0)).collect();
            let mut b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..100.0)).collect();
            let got = wasserstein_1d(&a, &b).unwrap();
            a.sort_by(|x, y| x.total_cmp(y));
            b.sort_by(|x, y| x.total_cmp(y));
            // equal-size case: mean absolute difference of order statistics
            let want: f64 =
                a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / n as f64;
            assert!((got - want).abs() < 1e-9, "got {got}, want {want}");
        }
    }

    #[test]
    fn compare_distributions_self_is_zero() {
        let s = compare_distributions(&[1, 5, 60, 700], &[1, 5, 60, 700]).unwrap();
        assert_eq!(s.ks_stat, 0.0);
        assert_eq!(s.wasserstein_log10, 0.0);
    }

    #[test]
    fn evaluate_realism_self_comparison() {
        let d = ds(&[
            ("2025-04-18T00:10:00", "A", 1003),
            ("2025-04-18T08:00:00", "B", 3600),
            ("2025-04-18T10:00:00", "C", 600),
        ]);
        let report = evaluate_realism(&d, Some(&d), &RealismConfig::default());
        assert_eq!(report.b4.log_level.ks_stat, Some(0.0));
        assert_eq!(report.b4.session_level.ks_stat, Some(0.0));
        assert_eq!(report.b5.log_level.wasserstein_log10, Some(0.0));
        assert_eq!(report.b2.status, CheckStatus::Pass);
    }

    #[test]
    fn evaluate_realism_without_seed_is_report_only() {
        let d = ds(&[
            ("2025-04-18T08:00:00", "A", 100),
            ("2025-04-18T09:00:00", "B", 100),
        ]);
        let report = evaluate_realism(&d, None, &RealismConfig::default());
        assert_eq!(report.b3.top_k_overlap_pct, None);
        assert_eq!(report.b4.log_level.status, CheckStatus::ReportOnly);
        assert!(report.b4.log_level.histogram.is_some());
        assert_eq!(report.b4.log_level.ks_stat, None);
    }

    #[test]
    fn evaluate_realism_date_only_degrades() {
        let csv = "id,created-at,app-id,time-seconds\n\
                   1,2025-04-18,A,2880\n2,2025-04-18,B,2880\n";
        let d = parse_dataset(csv, Provenance::real()).unwrap();
        let seed = ds(&[
            ("2025-04-18T08:00:00", "A", 100),
            ("2025-04-18T09:00:00", "B", 100),
        ]);
        let report = evaluate_realism(&d, Some(&seed), &RealismConfig::default());
        // totals still work: 1.6 h
        assert_eq!(report.b1.total_usage_h, 1.6);
        assert_eq!(report.b1.status, CheckStatus::Pass);
        assert_eq!(report.b2.status, CheckStatus::NotAssessable);
        // log-level durations remain comparable; everything session/gap based does not
        assert!(report.b4.log_level.ks_stat.is_some());
        assert_eq!(report.b4.session_level.status, CheckStatus::NotAssessable);
        assert_eq!(report.b5.log_level.status, CheckStatus::NotAssessable);
        assert_eq!(report.b5.session_level.status, CheckStatus::NotAssessable);
    }

    #[test]
    fn ks_threshold_drives_status() {
        let d = ds(&[
            ("2025-04-18T08:00:00", "A", 10),
            ("2025-04-18T09:00:00", "B", 20),
        ]);
        let far = ds(&[
            ("2025-04-18T08:00:00", "A", 5000),
            ("2025-04-18T09:00:00", "B", 6000),
        ]);
        let config = RealismConfig {
            ks_fail_threshold: Some(0.25),
            ..RealismConfig::default()
        };
        let report = evaluate_realism(&d, Some(&far), &config);
        assert_eq!(report.b4.log_level.status, CheckStatus::Fail);
        let self_report = evaluate_realism(&d, Some(&d), &config);
        assert_eq!(self_report.b4.log_level.status, CheckStatus::Pass);
    }
}
