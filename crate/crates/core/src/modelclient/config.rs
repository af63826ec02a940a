use serde::{Deserialize, Serialize};

use crate::error::ClientError;

/// Which backend answers requests.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backend {
    #[default]
    /// An OpenAI-style `POST {base_url}/chat/completions` endpoint.
    ChatCompletions,
    /// Always answers with `response`.
    Canned { response: String },
    /// Builds text satisfying the count controls in the prompt.
    Constructive,
}

fn default_timeout() -> f64 {
    60.0
}
fn default_retries() -> u32 {
    3
}
fn default_parallel() -> usize {
    4
}
fn default_max_tokens() -> u32 {
    1024
}
fn default_backoff() -> u64 {
    500
}

/// Endpoint settings as read from a JSON config file.
///
/// Only the *name* of the token's environment variable is stored here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    #[serde(flatten)]
    pub backend: Backend,
    #[serde(default)]
    pub base_url: String,
    #[serde(default)]
    pub model: String,
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_parallel")]
    pub max_parallel: usize,
    /// Zero by default so evaluation runs are reproducible.
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    /// First retry delay; doubles on each further attempt.
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            backend: Backend::default(),
            base_url: String::new(),
            model: String::new(),
            token_env: None,
            timeout_secs: default_timeout(),
            max_retries: default_retries(),
            max_parallel: default_parallel(),
            temperature: 0.0,
            max_tokens: default_max_tokens(),
            backoff_ms: default_backoff(),
        }
    }
}

impl EndpointConfig {
    pub fn check(&self) -> Result<(), ClientError> {
        if self.max_parallel < 1 {
            return Err(ClientError::Config(
                "max_parallel must be at least 1".into(),
            ));
        }
        if !(self.timeout_secs > 0.0) || !self.timeout_secs.is_finite() {
            return Err(ClientError::Config("timeout_secs must be positive".into()));
        }
        if self.backend == Backend::ChatCompletions && self.base_url.is_empty() {
            return Err(ClientError::Config(
                "base_url is required for chat_completions".into(),
            ));
        }
        Ok(())
    }
}
