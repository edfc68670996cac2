//! Synthetic smartphone-usage data: generation and quality evaluation.
//!
//! The toolkit has two halves. The generation side builds the four chat
//! prompts (two hand-written, two self-prompted; with and without seed data),
//! drives an OpenAI-compatible endpoint, and also offers a purely statistical
//! baseline generator that resamples a seed day. The evaluation side parses
//! usage-log CSVs, checks structural compliance (S1–S3) and behavioral
//! realism (B1–B5), and emits machine-readable reports plus distribution
//! histograms for plotting.

pub mod assets;
pub mod baseline;
pub mod compliance;
pub mod config;
pub mod error;
pub mod model;
pub mod pipeline;
pub mod realism;
pub mod report;
pub mod session;

pub use compliance::{CheckResult, CheckStatus, ComplianceReport};
pub use error::{Error, Result};
pub use model::{
    parse_dataset, write_dataset, FindingCode, Origin, PromptLabel, Provenance,
    StructuralFinding, UsageDataset, UsageLog,
};
pub use realism::{evaluate_realism, RealismConfig, RealismReport};
pub use report::{build_full_report, FullReport};
pub use session::{sessionize, Session};
