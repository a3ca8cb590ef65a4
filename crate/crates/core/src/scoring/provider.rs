//! Provider abstraction. A request carries `{model, prompt, params}`; a
//! response carries `{text, usage}`. Transport lives behind the trait.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::AlternativeId;

/// Cell a request is scoring. Not part of the wire payload; scripted
/// providers use it to pick a reply.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRef {
    pub alternative_id: AlternativeId,
    pub criterion_id: String,
}

impl std::fmt::Display for CellRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(alternative {}, criterion {})", self.alternative_id, self.criterion_id)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecodingParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderRequest {
    pub model: String,
    pub prompt: String,
    pub params: DecodingParams,
    #[serde(skip)]
    pub cell: Option<CellRef>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderResponse {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProviderError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("rate limited")]
    RateLimited { retry_after: Option<Duration> },
    #[error("request rejected: {0}")]
    Rejected(String),
}

impl ProviderError {
    pub fn is_retryable(&self) -> bool {
        !matches!(self, ProviderError::Rejected(_))
    }
}

pub trait LlmProvider: Send + Sync {
    fn model(&self) -> &str;
    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError>;
}

/// Reply scripted for one attempt. `!transport`, `!reject` and `!rate_limit` simulate
/// the matching failures.
fn scripted_reply(text: &str) -> Result<ProviderResponse, ProviderError> {
    match text.trim() {
        "!transport" => Err(ProviderError::Transport("scripted transport failure".into())),
        "!reject" => Err(ProviderError::Rejected("scripted rejection".into())),
        "!rate_limit" => Err(ProviderError::RateLimited { retry_after: Some(Duration::ZERO) }),
        _ => Ok(ProviderResponse { text: text.to_string(), usage: None }),
    }
}

#[derive(Debug, Clone, Deserialize)]
struct ScriptFile {
    #[serde(default = "default_mock_model")]
    model: String,
    #[serde(default = "default_reply_template")]
    reply_template: String,
    #[serde(default)]
    fallback: Option<String>,
    #[serde(default)]
    row: Vec<ScriptRow>,
    #[serde(default)]
    cell: Vec<ScriptCell>,
}

#[derive(Debug, Clone, Deserialize)]
struct ScriptRow {
    alternative: u32,
    ratings: HashMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
struct ScriptCell {
    alternative: u32,
    criterion: String,
    replies: Vec<String>,
}

fn default_mock_model() -> String {
    "scripted-mock".into()
}

fn default_reply_template() -> String {
    "Rating: {rating}/10".into()
}

fn format_rating(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Deterministic provider driven by a TOML script.
///
/// Each cell owns a reply sequence; attempt `k` gets reply `k`, and the last
/// reply repeats once the sequence is exhausted. Cells listed under
/// `[[row]]` reply with `reply_template` and their rating. Cells without a
/// script use `fallback`, or are rejected.
#[derive(Debug)]
pub struct ScriptedProvider {
    model: String,
    replies: HashMap<CellRef, Vec<String>>,
    fallback: Option<String>,
    attempts: Mutex<HashMap<CellRef, usize>>,
    calls: AtomicUsize,
}

impl ScriptedProvider {
    pub fn new(model: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            replies: HashMap::new(),
            fallback: None,
            attempts: Mutex::new(HashMap::new()),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        let file: ScriptFile = toml::from_str(text)?;
        let mut provider = Self::new(file.model);
        provider.fallback = file.fallback;
        for row in file.row {
            for (criterion, rating) in row.ratings {
                let reply = file.reply_template.replace("{rating}", &format_rating(rating));
                provider.replies.insert(CellRef { alternative_id: AlternativeId(row.alternative), criterion_id: criterion }, vec![reply]);
            }
        }
        for cell in file.cell {
            provider
                .replies
                .insert(CellRef { alternative_id: AlternativeId(cell.alternative), criterion_id: cell.criterion }, cell.replies);
        }
        Ok(provider)
    }

    pub fn with_replies(mut self, alternative: u32, criterion: &str, replies: &[&str]) -> Self {
        self.replies.insert(
            CellRef { alternative_id: AlternativeId(alternative), criterion_id: criterion.to_string() },
            replies.iter().map(|s| s.to_string()).collect(),
        );
        self
    }

    pub fn with_fallback(mut self, reply: impl Into<String>) -> Self {
        self.fallback = Some(reply.into());
        self
    }

    /// Number of `complete` calls served so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmProvider for ScriptedProvider {
    fn model(&self) -> &str {
        &self.model
    }

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let cell = request
            .cell
            .as_ref()
            .ok_or_else(|| ProviderError::Rejected("scripted provider needs the request's cell".into()))?;
        let attempt = {
            let mut attempts = self.attempts.lock().expect("attempt counter poisoned");
            let slot = attempts.entry(cell.clone()).or_insert(0);
            *slot += 1;
            *slot - 1
        };
        match self.replies.get(cell) {
            Some(seq) if !seq.is_empty() => scripted_reply(&seq[attempt.min(seq.len() - 1)]),
            _ => match &self.fallback {
                Some(reply) => scripted_reply(reply),
                None => Err(ProviderError::Rejected(format!("no scripted reply for {cell}"))),
            },
        }
    }
}

/// Environment-driven settings for a live provider.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveConfig {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub model: String,
    pub concurrency: usize,
    pub retries: u32,
    pub timeout: Duration,
}

pub const ENV_ENDPOINT: &str = "MCDM_LLM_ENDPOINT";
pub const ENV_API_KEY: &str = "MCDM_LLM_API_KEY";
pub const ENV_MODEL: &str = "MCDM_LLM_MODEL";
pub const ENV_CONCURRENCY: &str = "MCDM_LLM_CONCURRENCY";
pub const ENV_RETRIES: &str = "MCDM_LLM_RETRIES";

impl LiveConfig {
    pub fn from_env() -> Result<Self, ProviderError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, ProviderError> {
        let endpoint = get(ENV_ENDPOINT).ok_or_else(|| ProviderError::Rejected(format!("{ENV_ENDPOINT} is not set")))?;
        let model = get(ENV_MODEL).unwrap_or_else(|| "gpt-4".into());
        let parse_num = |key: &str, default: u64| -> Result<u64, ProviderError> {
            match get(key) {
                None => Ok(default),
                Some(v) => v.trim().parse().map_err(|_| ProviderError::Rejected(format!("{key}={v} is not a number"))),
            }
        };
        Ok(Self {
            endpoint,
            api_key: get(ENV_API_KEY),
            model,
            concurrency: parse_num(ENV_CONCURRENCY, 4)?.max(1) as usize,
            retries: parse_num(ENV_RETRIES, 3)?.max(1) as u32,
            timeout: Duration::from_secs(120),
        })
    }
}

/// Client for an OpenAI-compatible `chat/completions` endpoint.
pub struct HttpChatProvider {
    config: LiveConfig,
    client: reqwest::blocking::Client,
}

impl HttpChatProvider {
    pub fn new(config: LiveConfig) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        Ok(Self { config, client })
    }

    pub fn config(&self) -> &LiveConfig {
        &self.config
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
    #[serde(flatten)]
    params: &'a DecodingParams,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReply,
}

#[derive(Deserialize)]
struct ChatReply {
    content: String,
}

impl LlmProvider for HttpChatProvider {
    fn model(&self) -> &str {
        &self.config.model
    }

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        let body = ChatRequest {
            model: &request.model,
            messages: vec![ChatMessage { role: "user", content: &request.prompt }],
            params: &request.params,
        };
        let mut call = self.client.post(&self.config.endpoint).json(&body);
        if let Some(key) = &self.config.api_key {
            call = call.bearer_auth(key);
        }
        let response = call.send().map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = response.status();
        if status.as_u16() == 429 {
            let retry_after = response
                .headers()
                .get("retry-after")
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.trim().parse::<u64>().ok())
                .map(Duration::from_secs);
            return Err(ProviderError::RateLimited { retry_after });
        }
        if status.is_server_error() {
            return Err(ProviderError::Transport(format!("server returned {status}")));
        }
        if !status.is_success() {
            let text = response.text().unwrap_or_default();
            return Err(ProviderError::Rejected(format!("{status}: {}", text.trim())));
        }
        let parsed: ChatResponse = response.json().map_err(|e| ProviderError::Transport(format!("bad response body: {e}")))?;
        let text = parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| ProviderError::Transport("response has no choices".into()))?;
        Ok(ProviderResponse { text, usage: parsed.usage })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(alt: u32, crit: &str) -> ProviderRequest {
        ProviderRequest {
            model: "m".into(),
            prompt: "p".into(),
            params: DecodingParams::default(),
            cell: Some(CellRef { alternative_id: AlternativeId(alt), criterion_id: crit.into() }),
        }
    }

    #[test]
    fn script_sequences_repeat_last_reply() {
        let p = ScriptedProvider::new("m").with_replies(1, "c", &["a", "b"]);
        let texts: Vec<_> = (0..3).map(|_| p.complete(&req(1, "c")).unwrap().text).collect();
        assert_eq!(texts, ["a", "b", "b"]);
        assert_eq!(p.calls(), 3);
    }

    #[test]
    fn script_rows_and_failures() {
        let script = r#"
            model = "mock"
            [[row]]
            alternative = 2
            ratings = { c = 7, d = 4.5 }
            [[cell]]
            alternative = 3
            criterion = "c"
            replies = ["!transport", "Rating: 2/10"]
        "#;
        let p = ScriptedProvider::from_toml(script).unwrap();
        assert_eq!(p.model(), "mock");
        assert_eq!(p.complete(&req(2, "c")).unwrap().text, "Rating: 7/10");
        assert_eq!(p.complete(&req(2, "d")).unwrap().text, "Rating: 4.5/10");
        assert!(matches!(p.complete(&req(3, "c")), Err(ProviderError::Transport(_))));
        assert_eq!(p.complete(&req(3, "c")).unwrap().text, "Rating: 2/10");
        assert!(matches!(p.complete(&req(9, "c")), Err(ProviderError::Rejected(_))));
    }

    #[test]
    fn live_config_from_lookup() {
        let env: HashMap<&str, &str> = [(ENV_ENDPOINT, "http://x/v1/chat/completions"), (ENV_CONCURRENCY, "8")].into();
        let cfg = LiveConfig::from_lookup(|k| env.get(k).map(|v| v.to_string())).unwrap();
        assert_eq!(cfg.concurrency, 8);
        assert_eq!(cfg.retries, 3);
        assert!(LiveConfig::from_lookup(|_| None).is_err());
    }

    #[test]
    fn wire_request_omits_cell() {
        let json = serde_json::to_value(req(1, "c")).unwrap();
        assert_eq!(json, serde_json::json!({"model": "m", "prompt": "p", "params": {}}));
    }
}
