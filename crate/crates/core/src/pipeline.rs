//! Prompt construction, chat-completion transport and reply handling.
//!
//! The four generation prompts ship as bundled template files and are
//! reproduced byte-exactly; seed data is inlined into the message text rather
//! than uploaded, since file-upload APIs are vendor-specific. Every
//! generation run uses a fresh conversation and requests exactly one
//! completion, so single-reply compliance (S3) stays measurable.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PromptLabel;

pub mod templates {
    //! Bundled prompt texts, verbatim. Do not edit; regenerated variants
    //! from self-prompting are written as new files, never over these.

    pub const P1_MESSAGE_1: &str = include_str!("../prompts/p1_message1.txt");
    pub const P1_MESSAGE_2: &str = include_str!("../prompts/p1_message2.txt");
    pub const P2_MESSAGE_1: &str = include_str!("../prompts/p2_message1.txt");
    pub const P2_MESSAGE_2: &str = include_str!("../prompts/p2_message2.txt");
    pub const P3: &str = include_str!("../prompts/p3.txt");
    pub const P4: &str = include_str!("../prompts/p4.txt");
    pub const SELF_PROMPT_META: &str = include_str!("../prompts/self_prompt_meta.txt");
    pub const SELF_PROMPT_FOLLOWUP: &str = include_str!("../prompts/self_prompt_followup.txt");
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub text: String,
}

impl Message {
    pub fn user(text: impl Into<String>) -> Self {
        Message {
            role: Role::User,
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetailLevel {
    NonDetailed,
    Detailed,
}

/// One of the four prompt strategies resolved to concrete message text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub label: PromptLabel,
    pub detail: DetailLevel,
    pub uses_seed: bool,
    pub messages: Vec<Message>,
}

/// Resolve a prompt label to its messages. Seed CSV must be supplied for
/// P2/P4 and must be absent otherwise; seeded prompts embed the CSV inline
/// after the instruction text.
pub fn build_prompt(label: PromptLabel, seed_csv: Option<&str>) -> Result<PromptSpec> {
    match (label.uses_seed(), seed_csv) {
        (true, None) => {
            return Err(Error::SeedMismatch {
                label: label.as_str().into(),
                message: "requires seed data but none was supplied".into(),
            })
        }
        (false, Some(_)) => {
            return Err(Error::SeedMismatch {
                label: label.as_str().into(),
                message: "does not take seed data but some was supplied".into(),
            })
        }
        _ => {}
    }
    let with_seed = |text: &str| format!("{text}\n\n{}", seed_csv.unwrap_or_default());
    let messages = match label {
        PromptLabel::P1 => vec![
            Message::user(templates::P1_MESSAGE_1),
            Message::user(templates::P1_MESSAGE_2),
        ],
        PromptLabel::P2 => vec![
            Message::user(with_seed(templates::P2_MESSAGE_1)),
            Message::user(templates::P2_MESSAGE_2),
        ],
        PromptLabel::P3 => vec![Message::user(templates::P3)],
        PromptLabel::P4 => vec![Message::user(with_seed(templates::P4))],
    };
    Ok(PromptSpec {
        label,
        detail: if label.detailed() {
            DetailLevel::Detailed
        } else {
            DetailLevel::NonDetailed
        },
        uses_seed: label.uses_seed(),
        messages,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    /// Base URL; `/chat/completions` is appended.
    pub base_url: String,
    pub model: String,
    #[serde(skip_serializing, default)]
    pub api_key: Option<String>,
    pub timeout_s: u64,
    pub retries: u32,
    /// Left unset by default; hosted chat products do not expose sampling
    /// controls, so none are assumed.
    pub temperature: Option<f64>,
}

pub const API_KEY_ENV_VAR: &str = "USAGE_SYNTH_API_KEY";

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            base_url: base_url.into(),
            model: model.into(),
            api_key: std::env::var(API_KEY_ENV_VAR).ok(),
            timeout_s: 300,
            retries: 2,
            temperature: None,
        }
    }
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: String,
}

/// Blocking client for an OpenAI-compatible chat-completion endpoint.
pub struct ChatClient {
    config: EndpointConfig,
    http: reqwest::blocking::Client,
}

impl ChatClient {
    pub fn new(config: EndpointConfig) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(config.timeout_s))
            .build()
            .map_err(|e| Error::Endpoint(format!("client construction failed: {e}")))?;
        Ok(ChatClient { config, http })
    }

    pub fn endpoint_url(&self) -> String {
        format!(
            "{}/chat/completions",
            self.config.base_url.trim_end_matches('/')
        )
    }

    /// Request exactly one completion for the given conversation. Transport
    /// failures are retried up to the configured count; HTTP error statuses
    /// are surfaced immediately with their body.
    pub fn complete(&self, messages: &[Message]) -> Result<String> {
        let body = CompletionRequest {
            model: &self.config.model,
            messages: messages
                .iter()
                .map(|m| WireMessage {
                    role: m.role.as_str(),
                    content: &m.text,
                })
                .collect(),
            temperature: self.config.temperature,
        };
        let url = self.endpoint_url();
        let mut last_transport_error = String::new();
        for attempt in 0..=self.config.retries {
            let mut request = self.http.post(&url).json(&body);
            if let Some(key) = &self.config.api_key {
                request = request.bearer_auth(key);
            }
            match request.send() {
                Err(e) => {
                    last_transport_error = e.to_string();
                    if attempt == self.config.retries {
                        return Err(Error::Endpoint(format!(
                            "transport failure after {} attempt(s): {last_transport_error}",
                            attempt + 1
                        )));
                    }
                }
                Ok(response) => {
                    let status = response.status();
                    let text = response
                        .text()
                        .map_err(|e| Error::Endpoint(format!("unreadable response body: {e}")))?;
                    if status.as_u16() >= 400 {
                        return Err(Error::Endpoint(format!("HTTP {status}: {text}")));
                    }
                    let parsed: CompletionResponse = serde_json::from_str(&text).map_err(|e| {
                        Error::Endpoint(format!("malformed completion payload: {e}; body: {text}"))
                    })?;
                    return parsed
                        .choices
                        .into_iter()
                        .next()
                        .map(|c| c.message.content)
                        .ok_or_else(|| Error::Endpoint("empty choices array".into()));
                }
            }
        }
        Err(Error::Endpoint(last_transport_error))
    }
}

/// Record of one generation attempt against an endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRun {
    pub prompt: PromptSpec,
    pub attempt: u32,
    pub endpoint: String,
    pub model_name: String,
    pub reply_count: u32,
    pub raw_replies: Vec<String>,
    pub extracted_csv: Option<String>,
    pub extraction_warnings: Vec<String>,
    /// Procedure notes recorded with every run (seed delivery, role split).
    pub notes: Vec<String>,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

fn run_notes(prompt: &PromptSpec) -> Vec<String> {
    let mut notes = vec!["all prompt text sent as user-role messages".to_string()];
    if prompt.uses_seed {
        notes.push("seed data inlined in the message text, not uploaded as a file".to_string());
    }
    notes
}

/// Callback that persists a raw reply; invoked before any extraction runs.
pub type RawReplySink<'a> = &'a mut dyn FnMut(&str) -> Result<()>;

/// Execute one generation attempt in a fresh conversation. The raw reply is
/// handed to `raw_sink` (when given) before any extraction or parsing runs.
pub fn run_generation_with_sink(
    prompt: &PromptSpec,
    config: &EndpointConfig,
    attempt: u32,
    mut raw_sink: Option<RawReplySink<'_>>,
) -> Result<GenerationRun> {
    let client = ChatClient::new(config.clone())?;
    let started_at = Utc::now();
    let reply = client.complete(&prompt.messages)?;
    let finished_at = Utc::now();
    if let Some(sink) = raw_sink.as_mut() {
        sink(&reply)?;
    }
    let (extracted_csv, extraction_warnings) = match extract_csv(&reply) {
        Ok(extraction) => (Some(extraction.csv_text), extraction.warnings),
        Err(e) => (None, vec![format!("extraction failed: {e}")]),
    };
    Ok(GenerationRun {
        prompt: prompt.clone(),
        attempt,
        endpoint: client.endpoint_url(),
        model_name: config.model.clone(),
        reply_count: 1,
        raw_replies: vec![reply],
        extracted_csv,
        extraction_warnings,
        notes: run_notes(prompt),
        started_at,
        finished_at,
    })
}

pub fn run_generation(
    prompt: &PromptSpec,
    config: &EndpointConfig,
    attempt: u32,
) -> Result<GenerationRun> {
    run_generation_with_sink(prompt, config, attempt, None)
}

/// Outcome of the self-prompting meta-step: a detailed generation prompt and
/// its seeded variant, captured from one conversation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfPromptResult {
    pub detailed_prompt_text: String,
    pub follow_up_text: String,
    /// Full four-message conversation for audit.
    pub transcript: Vec<Message>,
}

/// Ask the model to write a detailed generation prompt, then — in the same
/// conversation — the seeded variant.
pub fn self_prompt(config: &EndpointConfig) -> Result<SelfPromptResult> {
    let client = ChatClient::new(config.clone())?;
    let mut transcript = vec![Message::user(templates::SELF_PROMPT_META)];
    let detailed = client.complete(&transcript)?;
    transcript.push(Message {
        role: Role::Assistant,
        text: detailed.clone(),
    });
    transcript.push(Message::user(templates::SELF_PROMPT_FOLLOWUP));
    let follow_up = client.complete(&transcript)?;
    transcript.push(Message {
        role: Role::Assistant,
        text: follow_up.clone(),
    });
    Ok(SelfPromptResult {
        detailed_prompt_text: detailed,
        follow_up_text: follow_up,
        transcript,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvExtraction {
    pub csv_text: String,
    pub warnings: Vec<String>,
}

/// Split one CSV line respecting double-quoted fields.
fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if in_quotes && chars.peek() == Some(&'"') => {
                current.push('"');
                chars.next();
            }
            '"' => in_quotes = !in_quotes,
            ',' if !in_quotes => {
                fields.push(current.trim().to_string());
                current = String::new();
            }
            _ => current.push(c),
        }
    }
    fields.push(current.trim().to_string());
    fields
}

fn is_header_line(line: &str) -> bool {
    let fields: Vec<String> = split_csv_line(line)
        .iter()
        .map(|f| f.to_lowercase())
        .collect();
    let has = |aliases: &[&str]| fields.iter().any(|f| aliases.contains(&f.as_str()));
    has(&["id"])
        && has(&["timestamp", "created-at", "created_at"])
        && has(&["app", "app-id", "app_id"])
        && has(&["duration", "time-seconds", "time_seconds"])
}

/// Pull the CSV block out of a model reply: code fences and surrounding
/// prose are stripped, and the longest contiguous block starting with a
/// recognized header line wins. Errors when no header-like line exists.
pub fn extract_csv(raw_reply: &str) -> Result<CsvExtraction> {
    let lines: Vec<&str> = raw_reply
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim_start().starts_with("```"))
        .collect();

    let mut blocks: Vec<(usize, usize)> = Vec::new(); // (start line, line count)
    let mut i = 0;
    while i < lines.len() {
        if is_header_line(lines[i]) {
            let width = split_csv_line(lines[i]).len();
            let mut end = i + 1;
            while end < lines.len()
                && !lines[end].trim().is_empty()
                && split_csv_line(lines[end]).len() == width
                && !is_header_line(lines[end])
            {
                end += 1;
            }
            blocks.push((i, end - i));
            i = end;
        } else {
            i += 1;
        }
    }

    let Some(&(best_start, best_len)) = blocks.iter().max_by_key(|(_, len)| *len) else {
        return Err(Error::NoCsvFound);
    };
    let mut warnings = Vec::new();
    if blocks.len() > 1 {
        warnings.push(format!(
            "{} CSV blocks found; chose the longest ({} lines)",
            blocks.len(),
            best_len
        ));
    }
    let mut csv_text = lines[best_start..best_start + best_len].join("\n");
    csv_text.push('\n');
    Ok(CsvExtraction { csv_text, warnings })
}

pub mod mock {
    //! Minimal in-process chat-completion endpoint for dry runs and tests.

    use std::io::{Read, Write};
    use std::net::{TcpListener, TcpStream};
    use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
    use std::sync::{Arc, Mutex};
    use std::thread::JoinHandle;

    /// A clean one-day reply wrapped the way chat models usually answer.
    pub const DEFAULT_REPLY: &str = "Here is a synthetic day of smartphone usage:\n\n```csv\nid,created-at,app-id,time-seconds\n1,2025-05-02T00:12:00,WhatsApp,45\n2,2025-05-02T08:04:10,WhatsApp,60\n3,2025-05-02T08:10:30,Google Chrome,420\n4,2025-05-02T08:30:00,Instagram,180\n5,2025-05-02T09:15:00,Google Maps,300\n6,2025-05-02T10:02:00,Lichess,600\n7,2025-05-02T11:30:00,WhatsApp,30\n8,2025-05-02T12:15:00,Google Chrome,540\n9,2025-05-02T13:40:00,Spotify,900\n10,2025-05-02T15:05:00,Instagram,240\n11,2025-05-02T16:20:00,Google Maps,180\n12,2025-05-02T18:00:00,Lichess,480\n13,2025-05-02T19:30:00,WhatsApp,90\n14,2025-05-02T20:45:00,Google Chrome,360\n15,2025-05-02T21:30:00,Instagram,150\n16,2025-05-02T22:10:00,WhatsApp,60\n```\n\nLet me know if you need another day.\n";

    #[derive(Debug, Clone)]
    pub struct MockReply {
        pub status: u16,
        pub content: String,
    }

    impl MockReply {
        /// Successful completion whose message content is `text`.
        pub fn ok(text: impl Into<String>) -> Self {
            MockReply {
                status: 200,
                content: text.into(),
            }
        }

        /// Error status with a literal body.
        pub fn error(status: u16, body: impl Into<String>) -> Self {
            MockReply {
                status,
                content: body.into(),
            }
        }
    }

    /// Loopback HTTP server answering `/chat/completions` from a scripted
    /// reply list, round-robin. Never leaves 127.0.0.1.
    pub struct MockServer {
        addr: std::net::SocketAddr,
        stop: Arc<AtomicBool>,
        hits: Arc<AtomicUsize>,
        requests: Arc<Mutex<Vec<(String, String)>>>,
        handle: Option<JoinHandle<()>>,
    }

    impl MockServer {
        pub fn start(replies: Vec<MockReply>) -> MockServer {
            assert!(!replies.is_empty(), "mock needs at least one reply");
            let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
            let addr = listener.local_addr().expect("local addr");
            let stop = Arc::new(AtomicBool::new(false));
            let hits = Arc::new(AtomicUsize::new(0));
            let requests = Arc::new(Mutex::new(Vec::new()));

            let thread_stop = Arc::clone(&stop);
            let thread_hits = Arc::clone(&hits);
            let thread_requests = Arc::clone(&requests);
            let handle = std::thread::spawn(move || {
                for stream in listener.incoming() {
                    if thread_stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    let n = thread_hits.fetch_add(1, Ordering::SeqCst);
                    let reply = replies[n % replies.len()].clone();
                    handle_connection(stream, reply, &thread_requests);
                }
            });

            MockServer {
                addr,
                stop,
                hits,
                requests,
                handle: Some(handle),
            }
        }

        pub fn start_default() -> MockServer {
            MockServer::start(vec![MockReply::ok(DEFAULT_REPLY)])
        }

        pub fn base_url(&self) -> String {
            format!("http://{}", self.addr)
        }

        pub fn hits(&self) -> usize {
            self.hits.load(Ordering::SeqCst)
        }

        /// JSON bodies of the requests received so far.
        pub fn request_bodies(&self) -> Vec<String> {
            self.requests.lock().unwrap().iter().map(|(_, b)| b.clone()).collect()
        }

        /// Raw request heads (method line and headers) received so far.
        pub fn request_heads(&self) -> Vec<String> {
            self.requests.lock().unwrap().iter().map(|(h, _)| h.clone()).collect()
        }
    }

    impl Drop for MockServer {
        fn drop(&mut self) {
            self.stop.store(true, Ordering::SeqCst);
            // unblock the accept loop
            let _ = TcpStream::connect(self.addr);
            if let Some(handle) = self.handle.take() {
                let _ = handle.join();
            }
        }
    }

    fn handle_connection(
        mut stream: TcpStream,
        reply: MockReply,
        requests: &Arc<Mutex<Vec<(String, String)>>>,
    ) {
        let mut buf = Vec::new();
        let mut chunk = [0u8; 4096];
        let header_end = loop {
            match stream.read(&mut chunk) {
                Ok(0) => return,
                Ok(n) => {
                    buf.extend_from_slice(&chunk[..n]);
                    if let Some(pos) = find_header_end(&buf) {
                        break pos;
                    }
                    if buf.len() > 1 << 20 {
                        return;
                    }
                }
                Err(_) => return,
            }
        };
        let head = String::from_utf8_lossy(&buf[..header_end]).to_string();
        let content_length = head
            .lines()
            .find_map(|l| {
                let (name, value) = l.split_once(':')?;
                name.eq_ignore_ascii_case("content-length")
                    .then(|| value.trim().parse::<usize>().ok())?
            })
            .unwrap_or(0);
        let body_start = header_end + 4;
        while buf.len() < body_start + content_length {
            match stream.read(&mut chunk) {
                Ok(0) => break,
                Ok(n) => buf.extend_from_slice(&chunk[..n]),
                Err(_) => return,
            }
        }
        let body = String::from_utf8_lossy(&buf[body_start..]).to_string();
        requests.lock().unwrap().push((head, body));

        let payload = if reply.status == 200 {
            serde_json::json!({
                "choices": [{ "message": { "role": "assistant", "content": reply.content } }]
            })
            .to_string()
        } else {
            reply.content.clone()
        };
        let response = format!(
            "HTTP/1.1 {} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
            reply.status,
            if reply.status == 200 { "OK" } else { "Error" },
            payload.len(),
            payload
        );
        let _ = stream.write_all(response.as_bytes());
        let _ = stream.flush();
    }

    fn find_header_end(buf: &[u8]) -> Option<usize> {
        buf.windows(4).position(|w| w == b"\r\n\r\n")
    }
}
