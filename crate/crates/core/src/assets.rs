//! Data files bundled into the binary: a one-day real-usage seed fixture and
//! the app-name alias table used for top-k comparisons.

pub const SEED_FIXTURE_CSV: &str = include_str!("../data/seed_fixture.csv");

pub const APP_ALIASES_CSV: &str = include_str!("../data/app_aliases.csv");
