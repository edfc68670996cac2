//! Shared fixture builders for the integration suites.
//!
//! Fixtures are constructed, not hand-typed: each builder places logs so the
//! daily total and the longest inactivity gap hit exact target values, and
//! asserts its own arithmetic before returning the CSV text.

#![allow(dead_code)]

use chrono::{NaiveDate, NaiveDateTime};
use usage_synth::compliance::CheckStatus;

pub const FIXTURE_DAY: &str = "2025-05-01";

const FILLER_POOL: [&str; 17] = [
    "Camera", "Messages", "Notes", "TikTok", "Twitter", "Slack", "Netflix", "Spotify", "YouTube",
    "Gmail", "Discord", "Reddit", "Telegram", "Firefox", "Clock", "Weather", "Photos",
];

fn day() -> NaiveDate {
    FIXTURE_DAY.parse().unwrap()
}

fn fmt(ts: NaiveDateTime) -> String {
    ts.format("%Y-%m-%dT%H:%M:%S").to_string()
}

fn csv_from(rows: &[(NaiveDateTime, &str, i64)]) -> String {
    let mut out = String::from("id,created-at,app-id,time-seconds\n");
    for (i, (ts, app, dur)) in rows.iter().enumerate() {
        out.push_str(&format!("{},{},{app},{dur}\n", i + 1, fmt(*ts)));
    }
    out
}

/// Appends daytime activity worth exactly `total_s` seconds starting at
/// `start`, using small inter-log gaps so no accidental large gap appears.
fn fill_daytime(rows: &mut Vec<(NaiveDateTime, &'static str, i64)>, start: NaiveDateTime, total_s: i64) {
    const DURATIONS: [i64; 8] = [420, 180, 600, 90, 300, 150, 240, 60];
    const GAPS: [i64; 5] = [60, 150, 90, 210, 120];
    let mut remaining = total_s;
    let mut t = start;
    let mut i = 0usize;
    while remaining > 0 {
        let dur = DURATIONS[i % DURATIONS.len()].min(remaining);
        let app = FILLER_POOL[i % FILLER_POOL.len()];
        rows.push((t, app, dur));
        remaining -= dur;
        t += chrono::Duration::seconds(dur + GAPS[i % GAPS.len()]);
        i += 1;
    }
    assert_eq!(
        rows.last().unwrap().0.date(),
        start.date(),
        "daytime fill ran past midnight"
    );
}

/// A day with one early-morning log, a single large overnight gap of exactly
/// `gap_s` seconds, and small-gap daytime activity; durations sum to
/// `total_s` exactly.
pub fn overnight_fixture(total_s: i64, pre_start: &str, pre_dur_s: i64, gap_s: i64) -> String {
    let start: NaiveDateTime = format!("{FIXTURE_DAY}T{pre_start}").parse().unwrap();
    let mut rows = vec![(start, "WhatsApp", pre_dur_s)];
    let wake = start + chrono::Duration::seconds(pre_dur_s + gap_s);
    assert_eq!(wake.date(), day(), "gap must end on the same day");
    fill_daytime(&mut rows, wake, total_s - pre_dur_s);
    assert_eq!(rows.iter().map(|r| r.2).sum::<i64>(), total_s);
    csv_from(&rows)
}

/// Back-to-back logs from 08:00: no inactivity at all.
pub fn continuous_fixture(total_s: i64) -> String {
    let mut rows = Vec::new();
    let mut t: NaiveDateTime = format!("{FIXTURE_DAY}T08:00:00").parse().unwrap();
    let mut remaining = total_s;
    let mut i = 0usize;
    while remaining > 0 {
        let dur = 600.min(remaining);
        rows.push((t, FILLER_POOL[i % FILLER_POOL.len()], dur));
        remaining -= dur;
        t += chrono::Duration::seconds(dur);
        i += 1;
    }
    assert_eq!(rows.iter().map(|r| r.2).sum::<i64>(), total_s);
    csv_from(&rows)
}

/// Date-only timestamps; totals still computable, intervals are not.
pub fn date_only_fixture(total_s: i64) -> String {
    let n = 6;
    assert_eq!(total_s % n, 0);
    let mut out = String::from("id,created-at,app-id,time-seconds\n");
    for i in 0..n {
        out.push_str(&format!(
            "{},{FIXTURE_DAY},{},{}\n",
            i + 1,
            FILLER_POOL[i as usize],
            total_s / n
        ));
    }
    out
}

/// One day whose durations sum far past 24 h via heavily overlapping logs:
/// an 00:00 log, an exact `gap_s` pause, then a stack of long overlapping
/// logs. Mirrors a generator that invents more usage than the day holds.
pub fn overloaded_day_fixture(total_s: i64, gap_s: i64) -> String {
    let first_dur = 1800i64;
    let start: NaiveDateTime = format!("{FIXTURE_DAY}T00:00:00").parse().unwrap();
    let mut rows = vec![(start, "WhatsApp", first_dur)];
    let cluster_start = start + chrono::Duration::seconds(first_dur + gap_s);
    let remaining = total_s - first_dur;
    let cluster_len = 24i64;
    assert_eq!(remaining % cluster_len, 0);
    let each = remaining / cluster_len;
    let apps = ["Google Chrome", "Google Maps", "Lichess", "Whatsapp", "Instagram", "YouTube"];
    for i in 0..cluster_len {
        let t = cluster_start + chrono::Duration::seconds(i * 600);
        rows.push((t, apps[(i % apps.len() as i64) as usize], each));
    }
    let last = rows.last().unwrap();
    assert!(last.0.date() == day());
    assert_eq!(rows.iter().map(|r| r.2).sum::<i64>(), total_s);
    csv_from(&rows)
}

/// A dataset whose five most-used apps are exactly `top5` (descending) with
/// `app_count` distinct apps in total.
pub fn overlap_fixture(top5: [&str; 5], app_count: usize) -> String {
    assert!((5..=5 + FILLER_POOL.len()).contains(&app_count));
    let base: NaiveDateTime = format!("{FIXTURE_DAY}T08:00:00").parse().unwrap();
    let mut rows: Vec<(NaiveDateTime, &str, i64)> = Vec::new();
    for (i, app) in top5.iter().enumerate() {
        rows.push((
            base + chrono::Duration::seconds(i as i64 * 3600),
            app,
            1000 - 100 * i as i64,
        ));
    }
    let fillers: Vec<&str> = FILLER_POOL
        .iter()
        .filter(|f| !top5.contains(*f))
        .take(app_count - 5)
        .copied()
        .collect();
    assert_eq!(fillers.len(), app_count - 5, "filler pool exhausted");
    for (j, app) in fillers.iter().enumerate() {
        rows.push((
            base + chrono::Duration::seconds(6 * 3600 + j as i64 * 1200),
            app,
            10,
        ));
    }
    csv_from(&rows)
}

pub struct Table3Row {
    pub label: &'static str,
    pub csv: String,
    pub expected_hours: f64,
    /// None when intervals cannot be verified (date-only timestamps).
    pub expected_gap_s: Option<i64>,
    pub expect_b1: CheckStatus,
    pub expect_b2: CheckStatus,
}

/// The eight per-attempt fixtures with their expected classifications.
pub fn table3_rows() -> Vec<Table3Row> {
    vec![
        Table3Row {
            label: "P1.1",
            csv: overnight_fixture(24_120, "00:10:00", 1003, 27_197),
            expected_hours: 6.7,
            expected_gap_s: Some(27_197), // 07:33:17
            expect_b1: CheckStatus::Pass,
            expect_b2: CheckStatus::Pass,
        },
        Table3Row {
            label: "P1.2",
            csv: overnight_fixture(7_200, "00:00:00", 900, 30_600),
            expected_hours: 2.0,
            expected_gap_s: Some(30_600), // 08:30:00
            expect_b1: CheckStatus::Pass,
            expect_b2: CheckStatus::Pass,
        },
        Table3Row {
            label: "P2.1",
            csv: overloaded_day_fixture(152_280, 20_460),
            expected_hours: 42.3,
            expected_gap_s: Some(20_460), // 05:41:00
            expect_b1: CheckStatus::Fail,
            expect_b2: CheckStatus::Pass,
        },
        Table3Row {
            label: "P2.2",
            csv: date_only_fixture(5_760),
            expected_hours: 1.6,
            expected_gap_s: None,
            expect_b1: CheckStatus::Pass,
            expect_b2: CheckStatus::NotAssessable,
        },
        Table3Row {
            label: "P3.1",
            csv: overnight_fixture(22_680, "00:00:00", 480, 28_320),
            expected_hours: 6.3,
            expected_gap_s: Some(28_320), // 07:52:00
            expect_b1: CheckStatus::Pass,
            expect_b2: CheckStatus::Pass,
        },
        Table3Row {
            label: "P3.2",
            csv: overnight_fixture(20_880, "00:00:00", 1200, 27_600),
            expected_hours: 5.8,
            expected_gap_s: Some(27_600), // 07:40:00
            expect_b1: CheckStatus::Pass,
            expect_b2: CheckStatus::Pass,
        },
        Table3Row {
            label: "P4.1",
            csv: continuous_fixture(57_240),
            expected_hours: 15.9,
            expected_gap_s: Some(0), // no interval at all
            expect_b1: CheckStatus::Pass,
            expect_b2: CheckStatus::Fail,
        },
        Table3Row {
            label: "P4.2",
            csv: continuous_fixture(32_040),
            expected_hours: 8.9,
            expected_gap_s: Some(0),
            expect_b1: CheckStatus::Pass,
            expect_b2: CheckStatus::Fail,
        },
    ]
}

pub struct OverlapRow {
    pub label: &'static str,
    pub csv: String,
    pub expected_app_count: usize,
    pub expected_overlap_pct: f64,
}

/// Per-attempt app pools with known top-5 overlap against the bundled seed
/// (whose top five are Google Chrome, Google Maps, Lichess, WhatsApp and
/// Instagram). Spelling and naming variants are intentional.
pub fn overlap_rows() -> Vec<OverlapRow> {
    vec![
        OverlapRow {
            label: "P1.1",
            csv: overlap_fixture(["Spotify", "YouTube", "Netflix", "TikTok", "Camera"], 15),
            expected_app_count: 15,
            expected_overlap_pct: 0.0,
        },
        OverlapRow {
            label: "P1.2",
            csv: overlap_fixture(["Instagram", "Spotify", "YouTube", "Messages", "Notes"], 13),
            expected_app_count: 13,
            expected_overlap_pct: 20.0,
        },
        OverlapRow {
            label: "P2.1",
            csv: overlap_fixture(
                ["Google Chrome", "Google Maps", "Lichess", "Whatsapp", "Instagram"],
                10,
            ),
            expected_app_count: 10,
            expected_overlap_pct: 100.0,
        },
        OverlapRow {
            label: "P2.2",
            csv: overlap_fixture(["Chrome", "Maps", "Lichess", "WhatsApp", "Instagram"], 18),
            expected_app_count: 18,
            expected_overlap_pct: 100.0,
        },
        OverlapRow {
            label: "P3.1",
            csv: overlap_fixture(
                ["Google Chrome", "Spotify", "YouTube", "Netflix", "Twitter"],
                10,
            ),
            expected_app_count: 10,
            expected_overlap_pct: 20.0,
        },
        OverlapRow {
            label: "P3.2",
            csv: overlap_fixture(
                ["Google Chrome", "Google Maps", "Instagram", "Slack", "TikTok"],
                9,
            ),
            expected_app_count: 9,
            expected_overlap_pct: 60.0,
        },
        OverlapRow {
            label: "P4.1",
            csv: overlap_fixture(
                ["Google Chrome", "Google Maps", "Lichess", "WhatsApp", "Instagram"],
                18,
            ),
            expected_app_count: 18,
            expected_overlap_pct: 100.0,
        },
        OverlapRow {
            label: "P4.2",
            csv: overlap_fixture(
                ["Google Chrome", "Google Maps", "Lichess", "WhatsApp", "Instagram"],
                16,
            ),
            expected_app_count: 16,
            expected_overlap_pct: 100.0,
        },
    ]
}
