//! Statistical baseline generator.
//!
//! Profiles a seed dataset's empirical distributions (log count per hour of
//! day, app frequency per hour, per-app duration samples) and synthesizes new
//! days by resampling from them. No parametric fitting: a single seed day is
//! far too small for that. The generator is a reproducible comparator for the
//! evaluation pipeline — same profile, date and seed value, same bytes out.

use chrono::{NaiveDate, NaiveDateTime, Timelike};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

use crate::compliance::{check_s1, CheckStatus};
use crate::error::{Error, Result};
use crate::model::{Provenance, UsageDataset, UsageLog};

pub const MIN_SEED_LOGS: usize = 10;

/// Empirical tables computed from a seed dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedProfile {
    /// Number of seed logs starting in each hour of day.
    pub hour_intensity: [f64; 24],
    /// Duration sample per app, in seconds.
    pub per_app_durations_s: BTreeMap<String, Vec<u32>>,
    /// Per hour of day, how often each app was started.
    pub app_freq_by_hour: Vec<BTreeMap<String, f64>>,
    pub total_logs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// Logs to generate per day; defaults to the seed's own count.
    pub target_log_count: Option<usize>,
    pub seed_value: u64,
    /// Uniform jitter applied to resampled durations, in percent.
    pub duration_jitter_pct: f64,
    /// Hours [start, end) during which no log may start. `None` disables.
    pub quiet_window: Option<(u32, u32)>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            target_log_count: None,
            seed_value: 42,
            duration_jitter_pct: 20.0,
            quiet_window: Some((1, 8)),
        }
    }
}

impl GenConfig {
    fn validate(&self) -> Result<()> {
        if self.target_log_count == Some(0) {
            return Err(Error::InvalidConfig("target_log_count must be > 0".into()));
        }
        if !(0.0..=100.0).contains(&self.duration_jitter_pct) {
            return Err(Error::InvalidConfig(
                "duration_jitter_pct must be within [0, 100]".into(),
            ));
        }
        if let Some((start, end)) = self.quiet_window {
            if start > 23 || end > 24 {
                return Err(Error::InvalidConfig(
                    "quiet_window hours must be within 0..=23 / 0..=24".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Build the empirical tables from a seed dataset. The seed must pass S1 and
/// contain at least [`MIN_SEED_LOGS`] logs.
pub fn profile_seed(seed: &UsageDataset) -> Result<SeedProfile> {
    if check_s1(seed).status != CheckStatus::Pass {
        return Err(Error::SeedRejected(
            "seed dataset has S1 format violations".into(),
        ));
    }
    if seed.logs.len() < MIN_SEED_LOGS {
        return Err(Error::SeedRejected(format!(
            "seed has {} logs; at least {MIN_SEED_LOGS} required",
            seed.logs.len()
        )));
    }
    let mut hour_intensity = [0.0f64; 24];
    let mut per_app_durations_s: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    let mut app_freq_by_hour: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new(); 24];
    for log in &seed.logs {
        let hour = log.start.hour() as usize;
        hour_intensity[hour] += 1.0;
        *app_freq_by_hour[hour].entry(log.app_id.clone()).or_insert(0.0) += 1.0;
        per_app_durations_s
            .entry(log.app_id.clone())
            .or_default()
            .push(log.duration_s);
    }
    Ok(SeedProfile {
        hour_intensity,
        per_app_durations_s,
        app_freq_by_hour,
        total_logs: seed.logs.len(),
    })
}

fn in_quiet_window(hour: u32, window: Option<(u32, u32)>) -> bool {
    match window {
        None => false,
        Some((start, end)) if start <= end => hour >= start && hour < end,
        Some((start, end)) => hour >= start || hour < end,
    }
}

/// Deterministic cumulative-weight pick over a slice of (item, weight).
fn weighted_pick<'a, T>(items: &'a [(T, f64)], rng: &mut StdRng) -> &'a T {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut roll = rng.gen_range(0.0..total);
    for (item, weight) in items {
        if roll < *weight {
            return item;
        }
        roll -= weight;
    }
    &items.last().expect("non-empty weights").0
}

fn rng_for(seed_value: u64, date: NaiveDate) -> StdRng {
    use chrono::Datelike;
    let mixed = seed_value ^ (date.num_days_from_ce() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    StdRng::seed_from_u64(mixed)
}

/// Synthesize one day of usage by resampling the profile. Start hours follow
/// `hour_intensity` with quiet-window hours zeroed, apps follow the chosen
/// hour's frequency table, and durations are drawn from the app's sample with
/// uniform jitter. Output is sorted with sequential zero-padded ids.
pub fn generate_day(
    profile: &SeedProfile,
    date: NaiveDate,
    config: &GenConfig,
) -> Result<UsageDataset> {
    config.validate()?;
    let hour_weights: Vec<(u32, f64)> = (0u32..24)
        .filter(|&h| !in_quiet_window(h, config.quiet_window))
        .map(|h| (h, profile.hour_intensity[h as usize]))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    if hour_weights.is_empty() {
        return Err(Error::SeedRejected(
            "no seed activity outside the quiet window".into(),
        ));
    }

    let mut rng = rng_for(config.seed_value, date);
    let count = config.target_log_count.unwrap_or(profile.total_logs);
    let jitter = config.duration_jitter_pct / 100.0;

    let mut draws: Vec<(NaiveDateTime, String, u32)> = Vec::with_capacity(count);
    for _ in 0..count {
        let hour = *weighted_pick(&hour_weights, &mut rng);
        let minute = rng.gen_range(0..60u32);
        let second = rng.gen_range(0..60u32);
        let start = date
            .and_hms_opt(hour, minute, second)
            .expect("valid time of day");

        let apps: Vec<(String, f64)> = profile.app_freq_by_hour[hour as usize]
            .iter()
            .map(|(app, w)| (app.clone(), *w))
            .collect();
        let app = weighted_pick(&apps, &mut rng).clone();

        let sample = &profile.per_app_durations_s[&app];
        let base = f64::from(sample[rng.gen_range(0..sample.len())]);
        let factor = 1.0 + rng.gen_range(-jitter..=jitter);
        let duration = (base * factor).round().max(0.0) as u32;

        draws.push((start, app, duration));
    }
    draws.sort_by_key(|a| a.0);

    let width = count.to_string().len();
    let logs = draws
        .into_iter()
        .enumerate()
        .map(|(i, (start, app_id, duration_s))| UsageLog {
            id: format!("{:0width$}", i + 1),
            start,
            app_id,
            duration_s,
        })
        .collect();
    Ok(UsageDataset::new(logs, Provenance::baseline()))
}

/// One dataset per date, each from an independent stream derived from
/// (seed_value, date), so results do not depend on batch order.
pub fn generate_batch(
    profile: &SeedProfile,
    dates: &[NaiveDate],
    config: &GenConfig,
) -> Result<Vec<UsageDataset>> {
    if dates.is_empty() {
        return Err(Error::InvalidConfig("generate_batch needs at least one date".into()));
    }
    dates
        .iter()
        .map(|&date| generate_day(profile, date, config))
        .collect()
}
