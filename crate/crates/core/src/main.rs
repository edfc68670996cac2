//! Command-line surface for generating and evaluating usage datasets.
//!
//! Exit codes: 0 all assessable hard criteria (S1, S2, B1, B2) pass; 1 a
//! file is missing or unreadable; 2 a hard criterion failed or an argument /
//! configuration was invalid; 3 fatal parse error; 4 endpoint failure.

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use usage_synth::baseline::{self, GenConfig};
use usage_synth::config::FileConfig;
use usage_synth::error::Error;
use usage_synth::model::{self, PromptLabel, Provenance};
use usage_synth::pipeline::{self, mock::MockServer, EndpointConfig};
use usage_synth::realism::{self, RealismConfig};
use usage_synth::report;
use usage_synth::session;

const EXIT_OK: u8 = 0;
const EXIT_FILE: u8 = 1;
const EXIT_FAIL: u8 = 2;
const EXIT_FATAL_PARSE: u8 = 3;
const EXIT_ENDPOINT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "usage-synth",
    version,
    about = "Generate synthetic smartphone-usage datasets and evaluate their quality"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupingMode {
    Log,
    Session,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesKind {
    Duration,
    Gap,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a dataset against the S and B criteria.
    Check {
        dataset: PathBuf,
        /// Seed dataset for the comparative metrics (B3–B5).
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where to write the JSON report (default: <dataset>.report.json).
        #[arg(long)]
        json_out: Option<PathBuf>,
        /// Session split threshold in seconds.
        #[arg(long)]
        gap_threshold: Option<i64>,
        /// Size of the most-used-apps set for B3.
        #[arg(long)]
        k: Option<usize>,
        /// Fail B4/B5 when the KS statistic exceeds this (off by default).
        #[arg(long)]
        ks_fail_threshold: Option<f64>,
    },
    /// Synthesize a day of usage by resampling a seed dataset.
    GenerateBaseline {
        seed: PathBuf,
        /// Calendar date of the generated day (YYYY-MM-DD).
        date: NaiveDate,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path (default: baseline_<date>.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resolve a prompt to its message text and write it to a file.
    Prompt {
        label: String,
        /// Seed CSV, required for P2/P4 and rejected otherwise.
        #[arg(long)]
        seed: Option<PathBuf>,
        /// Output path (default: prompt_<label>.txt).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run generation attempts against an endpoint and evaluate each reply.
    Run {
        label: String,
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        attempts: Option<u32>,
        /// Use a built-in loopback mock endpoint instead of a real one.
        #[arg(long)]
        mock: bool,
        /// Directory for run artifacts (default: runs).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        gap_threshold: Option<i64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        ks_fail_threshold: Option<f64>,
    },
    /// Emit a log-binned histogram CSV for plotting.
    Histogram {
        dataset: PathBuf,
        /// Group logs into sessions or treat each log as a unit.
        #[arg(long, value_enum)]
        mode: GroupingMode,
        /// Histogram durations or inter-unit gaps.
        #[arg(long, value_enum)]
        kind: SeriesKind,
        /// Output path (default: histogram_<mode>_<kind>.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        gap_threshold: Option<i64>,
    },
    /// Ask the model to write detailed generation prompts (meta-step).
    SelfPrompt {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        mock: bool,
        /// Directory for the captured prompt files (default: self_prompts).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    ExitCode::from(code)
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Io(_) => EXIT_FILE,
        Error::FatalParse { .. } => EXIT_FATAL_PARSE,
        Error::Endpoint(_) => EXIT_ENDPOINT,
        _ => EXIT_FAIL,
    }
}

fn run(command: Command) -> usage_synth::Result<u8> {
    match command {
        Command::Check {
            dataset,
            seed,
            config,
            json_out,
            gap_threshold,
            k,
            ks_fail_threshold,
        } => cmd_check(
            &dataset,
            seed.as_deref(),
            config.as_deref(),
            json_out,
            gap_threshold,
            k,
            ks_fail_threshold,
        ),
        Command::GenerateBaseline {
            seed,
            date,
            config,
            out,
        } => cmd_generate_baseline(&seed, date, config.as_deref(), out),
        Command::Prompt { label, seed, out } => cmd_prompt(&label, seed.as_deref(), out),
        Command::Run {
            label,
            seed,
            config,
            endpoint,
            model,
            attempts,
            mock,
            out_dir,
            gap_threshold,
            k,
            ks_fail_threshold,
        } => cmd_run(RunArgs {
            label,
            seed,
            config,
            endpoint,
            model,
            attempts,
            mock,
            out_dir,
            gap_threshold,
            k,
            ks_fail_threshold,
        }),
        Command::Histogram {
            dataset,
            mode,
            kind,
            out,
            gap_threshold,
        } => cmd_histogram(&dataset, mode, kind, out, gap_threshold),
        Command::SelfPrompt {
            config,
            endpoint,
            model,
            mock,
            out_dir,
        } => cmd_self_prompt(config.as_deref(), endpoint, model, mock, out_dir),
    }
}

fn read_file(path: &Path) -> usage_synth::Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_file_config(path: Option<&Path>) -> usage_synth::Result<FileConfig> {
    match path {
        Some(p) => usage_synth::config::load_config(p),
        None => Ok(FileConfig::default()),
    }
}

fn realism_config(
    file: &FileConfig,
    gap_threshold: Option<i64>,
    k: Option<usize>,
    ks_fail_threshold: Option<f64>,
) -> RealismConfig {
    let defaults = RealismConfig::default();
    RealismConfig {
        gap_threshold_s: gap_threshold
            .or(file.gap_threshold_s)
            .unwrap_or(defaults.gap_threshold_s),
        top_k: k.or(file.k).unwrap_or(defaults.top_k),
        ks_fail_threshold: ks_fail_threshold.or(file.ks_fail_threshold),
        aliases: defaults.aliases,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    dataset_path: &Path,
    seed_path: Option<&Path>,
    config_path: Option<&Path>,
    json_out: Option<PathBuf>,
    gap_threshold: Option<i64>,
    k: Option<usize>,
    ks_fail_threshold: Option<f64>,
) -> usage_synth::Result<u8> {
    let file_config = load_file_config(config_path)?;
    let config = realism_config(&file_config, gap_threshold, k, ks_fail_threshold);

    let dataset_text = read_file(dataset_path)?;
    let dataset = model::parse_dataset(&dataset_text, Provenance::unknown_file())?;
    let seed = match seed_path {
        Some(p) => Some(model::parse_dataset(&read_file(p)?, Provenance::real())?),
        None => None,
    };

    let full_report = report::build_full_report(
        dataset_path.display().to_string(),
        seed_path.map(|p| p.display().to_string()),
        &dataset,
        seed.as_ref(),
        &config,
    );

    print!("{}", report::render_summary(&full_report));
    let json_path = json_out.unwrap_or_else(|| {
        let mut name = dataset_path.as_os_str().to_owned();
        name.push(".report.json");
        PathBuf::from(name)
    });
    report::write_json_report(&json_path, &full_report)?;
    println!("report: {}", json_path.display());

    Ok(if report::hard_criteria_pass(&full_report) {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn cmd_generate_baseline(
    seed_path: &Path,
    date: NaiveDate,
    config_path: Option<&Path>,
    out: Option<PathBuf>,
) -> usage_synth::Result<u8> {
    let file_config = load_file_config(config_path)?;
    let defaults = GenConfig::default();
    let gen_config = GenConfig {
        target_log_count: file_config.target_log_count.or(defaults.target_log_count),
        seed_value: file_config.seed_value.unwrap_or(defaults.seed_value),
        duration_jitter_pct: file_config
            .duration_jitter_pct
            .unwrap_or(defaults.duration_jitter_pct),
        quiet_window: match (file_config.quiet_window_start, file_config.quiet_window_end) {
            (Some(start), Some(end)) if start == end => None,
            (Some(start), Some(end)) => Some((start, end)),
            _ => defaults.quiet_window,
        },
    };

    let seed = model::parse_dataset(&read_file(seed_path)?, Provenance::real())?;
    let profile = baseline::profile_seed(&seed)?;
    let generated = baseline::generate_day(&profile, date, &gen_config)?;
    let csv = model::write_dataset(&generated);

    let out_path = out.unwrap_or_else(|| PathBuf::from(format!("baseline_{date}.csv")));
    report::write_text_atomic(&out_path, &csv)?;

    let stats = realism::app_stats(&generated, 5);
    println!(
        "wrote {}: {} logs, {:.1} h total, {} app(s)",
        out_path.display(),
        generated.logs.len(),
        realism::total_usage_hours(&generated),
        stats.app_count
    );
    Ok(EXIT_OK)
}

fn render_prompt_file(prompt: &pipeline::PromptSpec) -> String {
    let mut out = format!(
        "# prompt {} ({:?}, uses seed: {})\n",
        prompt.label.as_str(),
        prompt.detail,
        prompt.uses_seed
    );
    for (i, message) in prompt.messages.iter().enumerate() {
        out.push_str(&format!("\n--- message {} ({:?}) ---\n", i + 1, message.role));
        out.push_str(&message.text);
        out.push('\n');
    }
    out
}

fn cmd_prompt(
    label: &str,
    seed_path: Option<&Path>,
    out: Option<PathBuf>,
) -> usage_synth::Result<u8> {
    let label: PromptLabel = label.parse()?;
    let seed_text = match seed_path {
        Some(p) => Some(read_file(p)?),
        None => None,
    };
    let prompt = pipeline::build_prompt(label, seed_text.as_deref())?;
    let out_path =
        out.unwrap_or_else(|| PathBuf::from(format!("prompt_{}.txt", label.as_str())));
    report::write_text_atomic(&out_path, &render_prompt_file(&prompt))?;
    println!("wrote {}", out_path.display());
    Ok(EXIT_OK)
}

struct RunArgs {
    label: String,
    seed: Option<PathBuf>,
    config: Option<PathBuf>,
    endpoint: Option<String>,
    model: Option<String>,
    attempts: Option<u32>,
    mock: bool,
    out_dir: Option<PathBuf>,
    gap_threshold: Option<i64>,
    k: Option<usize>,
    ks_fail_threshold: Option<f64>,
}

#[derive(serde::Serialize)]
struct AttemptSummary {
    attempt: u32,
    s1: Option<String>,
    s2: Option<String>,
    b1_total_usage_h: Option<f64>,
    b1: Option<String>,
    b2: Option<String>,
    error: Option<String>,
}

fn cmd_run(args: RunArgs) -> usage_synth::Result<u8> {
    let label: PromptLabel = args.label.parse()?;
    let file_config = load_file_config(args.config.as_deref())?;
    let attempts = args.attempts.or(file_config.attempts).unwrap_or(2);
    if attempts == 0 {
        return Err(Error::InvalidConfig("attempts must be at least 1".into()));
    }
    let eval_config = realism_config(
        &file_config,
        args.gap_threshold,
        args.k,
        args.ks_fail_threshold,
    );

    // the mock lives for the duration of the runs
    let mock_server = args.mock.then(MockServer::start_default);
    let base_url = match (&mock_server, args.endpoint.or(file_config.endpoint)) {
        (Some(mock), _) => mock.base_url(),
        (None, Some(endpoint)) => endpoint,
        (None, None) => {
            return Err(Error::InvalidConfig(
                "no endpoint: pass --endpoint, set it in the config file, or use --mock".into(),
            ))
        }
    };
    let model_name = args
        .model
        .or(file_config.model)
        .unwrap_or_else(|| "mock-model".to_string());
    let mut endpoint_config = EndpointConfig::new(base_url, model_name);
    if let Some(timeout) = file_config.timeout_s {
        endpoint_config.timeout_s = timeout;
    }
    if let Some(retries) = file_config.retries {
        endpoint_config.retries = retries;
    }

    let seed_text = match &args.seed {
        Some(p) => Some(read_file(p)?),
        None => None,
    };
    let seed_dataset = match &seed_text {
        Some(text) => Some(model::parse_dataset(text, Provenance::real())?),
        None => None,
    };
    let prompt = pipeline::build_prompt(label, seed_text.as_deref())?;

    let out_dir = args.out_dir.unwrap_or_else(|| PathBuf::from("runs"));
    let mut summaries: Vec<AttemptSummary> = Vec::new();

    for attempt in 1..=attempts {
        let attempt_dir = out_dir
            .join(label.as_str())
            .join(format!("attempt{attempt}"));
        std::fs::create_dir_all(&attempt_dir)?;

        let raw_path = attempt_dir.join("raw_reply.txt");
        let mut sink = |raw: &str| -> usage_synth::Result<()> {
            report::write_text_atomic(&raw_path, raw)?;
            Ok(())
        };
        let run = pipeline::run_generation_with_sink(
            &prompt,
            &endpoint_config,
            attempt,
            Some(&mut sink),
        )?;
        report::write_text_atomic(
            &attempt_dir.join("run.json"),
            &serde_json::to_string_pretty(&run)?,
        )?;

        let summary = match &run.extracted_csv {
            None => {
                println!(
                    "attempt {attempt}: no CSV block found in the reply ({})",
                    run.extraction_warnings.join("; ")
                );
                AttemptSummary {
                    attempt,
                    s1: None,
                    s2: None,
                    b1_total_usage_h: None,
                    b1: None,
                    b2: None,
                    error: Some("no CSV block found in reply".into()),
                }
            }
            Some(csv) => {
                report::write_text_atomic(&attempt_dir.join("extracted.csv"), csv)?;
                match model::parse_dataset(
                    csv,
                    Provenance::synthetic(label, attempt, run.reply_count),
                ) {
                    Err(e) => {
                        println!("attempt {attempt}: extracted CSV failed to parse: {e}");
                        AttemptSummary {
                            attempt,
                            s1: None,
                            s2: None,
                            b1_total_usage_h: None,
                            b1: None,
                            b2: None,
                            error: Some(format!("fatal parse: {e}")),
                        }
                    }
                    Ok(dataset) => {
                        let full = report::build_full_report(
                            raw_path.display().to_string(),
                            args.seed.as_ref().map(|p| p.display().to_string()),
                            &dataset,
                            seed_dataset.as_ref(),
                            &eval_config,
                        );
                        report::write_json_report(&attempt_dir.join("report.json"), &full)?;
                        println!("attempt {attempt}:");
                        print!("{}", report::render_summary(&full));
                        AttemptSummary {
                            attempt,
                            s1: Some(report::status_str(full.compliance.s1.status).into()),
                            s2: Some(report::status_str(full.compliance.s2.status).into()),
                            b1_total_usage_h: Some(full.realism.b1.total_usage_h),
                            b1: Some(report::status_str(full.realism.b1.status).into()),
                            b2: Some(report::status_str(full.realism.b2.status).into()),
                            error: None,
                        }
                    }
                }
            }
        };
        summaries.push(summary);
    }

    report::write_text_atomic(
        &out_dir.join(label.as_str()).join("summary.json"),
        &serde_json::to_string_pretty(&summaries)?,
    )?;

    println!("\nattempt  total_h  S1              B1              B2");
    for s in &summaries {
        println!(
            "{:<8} {:<8} {:<15} {:<15} {}",
            s.attempt,
            s.b1_total_usage_h
                .map(|h| h.to_string())
                .unwrap_or_else(|| "-".into()),
            s.s1.clone().unwrap_or_else(|| "-".into()),
            s.b1.clone().unwrap_or_else(|| "-".into()),
            s.b2.clone().unwrap_or_else(|| "-".into()),
        );
    }
    Ok(EXIT_OK)
}

fn cmd_histogram(
    dataset_path: &Path,
    mode: GroupingMode,
    kind: SeriesKind,
    out: Option<PathBuf>,
    gap_threshold: Option<i64>,
) -> usage_synth::Result<u8> {
    let dataset = model::parse_dataset(&read_file(dataset_path)?, Provenance::unknown_file())?;
    let threshold = gap_threshold.unwrap_or(session::DEFAULT_GAP_THRESHOLD_S);

    let values: Vec<i64> = match (mode, kind) {
        (GroupingMode::Log, SeriesKind::Duration) => dataset
            .logs
            .iter()
            .map(|l| i64::from(l.duration_s))
            .collect(),
        (GroupingMode::Log, SeriesKind::Gap) => {
            realism::gap_series_for(&dataset, false, threshold)?.gaps_s
        }
        (GroupingMode::Session, SeriesKind::Duration) => {
            session::session_durations(&session::sessionize(&dataset, threshold)?)
        }
        (GroupingMode::Session, SeriesKind::Gap) => {
            realism::gap_series_for(&dataset, true, threshold)?.gaps_s
        }
    };

    let histogram = realism::build_histogram(&values);
    let out_path = out.unwrap_or_else(|| {
        let mode_name = match mode {
            GroupingMode::Log => "log",
            GroupingMode::Session => "session",
        };
        let kind_name = match kind {
            SeriesKind::Duration => "duration",
            SeriesKind::Gap => "gap",
        };
        PathBuf::from(format!("histogram_{mode_name}_{kind_name}.csv"))
    });
    report::write_text_atomic(&out_path, &realism::histogram_csv(&histogram))?;
    println!(
        "wrote {}: {} unit(s) across {} bins",
        out_path.display(),
        histogram.total,
        histogram.counts.len()
    );
    Ok(EXIT_OK)
}

fn cmd_self_prompt(
    config_path: Option<&Path>,
    endpoint: Option<String>,
    model_name: Option<String>,
    mock: bool,
    out_dir: Option<PathBuf>,
) -> usage_synth::Result<u8> {
    let file_config = load_file_config(config_path)?;
    let mock_server = mock.then(|| {
        MockServer::start(vec![
            pipeline::mock::MockReply::ok(
                "You are a data generator. Produce rows with id, created-at, app-id and time-seconds columns for one plausible day.",
            ),
            pipeline::mock::MockReply::ok(
                "You are a synthetic data generator expanding a seed dataset. Keep the id, created-at, app-id and time-seconds schema and do not copy rows.",
            ),
        ])
    });
    let base_url = match (&mock_server, endpoint.or(file_config.endpoint)) {
        (Some(server), _) => server.base_url(),
        (None, Some(url)) => url,
        (None, None) => {
            return Err(Error::InvalidConfig(
                "no endpoint: pass --endpoint, set it in the config file, or use --mock".into(),
            ))
        }
    };
    let model_name = model_name
        .or(file_config.model)
        .unwrap_or_else(|| "mock-model".to_string());
    let mut endpoint_config = EndpointConfig::new(base_url, model_name);
    if let Some(timeout) = file_config.timeout_s {
        endpoint_config.timeout_s = timeout;
    }
    if let Some(retries) = file_config.retries {
        endpoint_config.retries = retries;
    }

    let result = pipeline::self_prompt(&endpoint_config)?;
    let dir = out_dir.unwrap_or_else(|| PathBuf::from("self_prompts"));
    std::fs::create_dir_all(&dir)?;
    // captured prompts become new template files; the bundled ones stay as-is
    report::write_text_atomic(&dir.join("detailed_prompt.txt"), &result.detailed_prompt_text)?;
    report::write_text_atomic(&dir.join("seeded_prompt.txt"), &result.follow_up_text)?;
    report::write_text_atomic(
        &dir.join("transcript.json"),
        &serde_json::to_string_pretty(&result.transcript)?,
    )?;
    println!(
        "wrote {} and {} ({} transcript messages)",
        dir.join("detailed_prompt.txt").display(),
        dir.join("seeded_prompt.txt").display(),
        result.transcript.len()
    );
    Ok(EXIT_OK)
}
