use std::sync::Mutex;
use std::time::{Duration, Instant};

use log::{debug, warn};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{Error, Result};

/// Environment variable holding the API key.
pub const API_KEY_ENV: &str = "SPANOVERLAP_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmClientConfig {
    /// Base URL of an OpenAI-compatible API; `/chat/completions` is appended.
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub samples_per_instruction: usize,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub backoff_initial_ms: u64,
    pub backoff_max_ms: u64,
    /// `0` disables rate limiting.
    pub requests_per_minute: u32,
}

impl Default for LlmClientConfig {
    fn default() -> Self {
        LlmClientConfig {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-3.5-turbo-0125".into(),
            temperature: 0.7,
            max_tokens: 512,
            samples_per_instruction: 1,
            timeout_secs: 60,
            max_retries: 5,
            backoff_initial_ms: 1000,
            backoff_max_ms: 30_000,
            requests_per_minute: 0,
        }
    }
}

impl LlmClientConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_instruction == 0 {
            return Err(Error::Config("samples_per_instruction must be at least 1".into()));
        }
        Ok(())
    }

    /// Delay before retry number `attempt` (1-based): initial * 2^(attempt-1),
    /// capped.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let factor = 1u64.checked_shl(attempt.saturating_sub(1)).unwrap_or(u64::MAX);
        Duration::from_millis(self.backoff_initial_ms.saturating_mul(factor).min(self.backoff_max_ms))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    /// HTTP attempts made, including the successful one.
    pub attempts: u32,
}

/// Blocking chat-completions client with retry on 429/5xx and an optional
/// request-rate limit shared by all threads using the client.
pub struct ChatClient {
    config: LlmClientConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
    next_slot: Mutex<Option<Instant>>,
}

impl ChatClient {
    pub fn new(config: LlmClientConfig, api_key: Option<String>) -> Result<Self> {
        config.validate()?;
        let agent = ureq::AgentBuilder::new().timeout(Duration::from_secs(config.timeout_secs)).build();
        Ok(ChatClient { config, api_key, agent, next_slot: Mutex::new(None) })
    }

    /// Client with the key from [`API_KEY_ENV`].
    pub fn from_env(config: LlmClientConfig) -> Result<Self> {
        let key = std::env::var(API_KEY_ENV)
            .map_err(|_| Error::Config(format!("{API_KEY_ENV} is not set")))?;
        ChatClient::new(config, Some(key))
    }

    pub fn config(&self) -> &LlmClientConfig {
        &self.config
    }

    fn wait_for_slot(&self) {
        if self.config.requests_per_minute == 0 {
            return;
        }
        let interval = Duration::from_secs_f64(60.0 / f64::from(self.config.requests_per_minute));
        let wait = {
            let mut slot = self.next_slot.lock().expect("rate limiter poisoned");
            let now = Instant::now();
            let start = slot.map_or(now, |s| s.max(now));
            *slot = Some(start + interval);
            start.saturating_duration_since(now)
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }

    /// Send one user message and return the assistant text.
    pub fn complete(&self, prompt: &str) -> Result<Completion> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        });
        let mut attempt = 0;
        loop {
            attempt += 1;
            self.wait_for_slot();
            let mut req = self.agent.post(&url).set("Content-Type", "application/json");
            if let Some(key) = &self.api_key {
                req = req.set("Authorization", &format!("Bearer {key}"));
            }
            let retryable = match req.send_json(body.clone()) {
                Ok(resp) => {
                    debug!("POST {url}: 200 after {attempt} attempt(s)");
                    let text = resp.into_string().map_err(|e| Error::Protocol(e.to_string()))?;
                    return Ok(Completion { text: extract_content(&text)?, attempts: attempt });
                }
                Err(ureq::Error::Status(code, resp)) if code == 429 || code >= 500 => {
                    format!("HTTP {code}: {}", resp.into_string().unwrap_or_default())
                }
                Err(ureq::Error::Status(code, resp)) => {
                    return Err(Error::Transport(format!("HTTP {code}: {}", resp.into_string().unwrap_or_default())));
                }
                Err(ureq::Error::Transport(t)) => t.to_string(),
            };
            if attempt > self.config.max_retries {
                return Err(Error::Transport(format!("giving up after {attempt} attempts: {retryable}")));
            }
            let delay = self.config.backoff(attempt);
            warn!("attempt {attempt} failed ({retryable}); retrying in {delay:?}");
            std::thread::sleep(delay);
        }
    }
}

/// `choices[0].message.content` of a chat-completions body.
pub fn extract_content(body: &str) -> Result<String> {
    let v: Value = serde_json::from_str(body).map_err(|e| Error::Protocol(format!("body is not JSON: {e}")))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(String::from)
        .ok_or_else(|| Error::Protocol("missing choices[0].message.content".into()))
}
