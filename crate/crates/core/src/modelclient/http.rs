use std::fmt;
use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};

use crate::dataset::Prompt;
use crate::error::ClientError;

use super::config::EndpointConfig;
use super::Transport;

/// A bearer token that never prints.
#[derive(Clone)]
pub struct Secret(String);

impl Secret {
    pub fn new(value: String) -> Self {
        Self(value)
    }

    fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Secret(***)")
    }
}

/// Chat-completions client: system prompt as the system message, prompt
/// body as the user message.
#[derive(Debug)]
pub struct ChatCompletionsTransport {
    client: Client,
    url: String,
    model: String,
    token: Option<Secret>,
    temperature: f64,
    max_tokens: u32,
}

impl ChatCompletionsTransport {
    pub fn new(cfg: &EndpointConfig) -> Result<Self, ClientError> {
        let token = match &cfg.token_env {
            Some(var) => Some(Secret::new(std::env::var(var).map_err(|_| {
                ClientError::Auth(format!("environment variable {var} is not set"))
            })?)),
            None => None,
        };
        Self::with_token(cfg, token)
    }

    pub fn with_token(cfg: &EndpointConfig, token: Option<Secret>) -> Result<Self, ClientError> {
        let client = Client::builder()
            .timeout(Duration::from_secs_f64(cfg.timeout_secs))
            .build()
            .map_err(|e| ClientError::Config(e.to_string()))?;
        Ok(Self {
            client,
            url: format!("{}/chat/completions", cfg.base_url.trim_end_matches('/')),
            model: cfg.model.clone(),
            token,
            temperature: cfg.temperature,
            max_tokens: cfg.max_tokens,
        })
    }

    pub fn request_body(&self, prompt: &Prompt) -> Value {
        json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": prompt.system},
                {"role": "user", "content": prompt.user},
            ],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        })
    }
}

fn classify(err: reqwest::Error) -> ClientError {
    if err.is_timeout() {
        ClientError::Timeout
    } else {
        ClientError::Connection(err.without_url().to_string())
    }
}

pub(crate) fn parse_content(body: &Value) -> Result<String, ClientError> {
    body.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| ClientError::MalformedResponse("missing choices[0].message.content".into()))
}

impl Transport for ChatCompletionsTransport {
    fn send(&self, prompt: &Prompt) -> Result<String, ClientError> {
        let mut req = self.client.post(&self.url).json(&self.request_body(prompt));
        if let Some(token) = &self.token {
            req = req.bearer_auth(token.expose());
        }
        let resp = req.send().map_err(classify)?;
        let status = resp.status();
        match status {
            s if s.is_success() => {}
            StatusCode::UNAUTHORIZED | StatusCode::FORBIDDEN => {
                return Err(ClientError::Auth(format!("HTTP {}", status.as_u16())))
            }
            StatusCode::TOO_MANY_REQUESTS => return Err(ClientError::RateLimited),
            StatusCode::REQUEST_TIMEOUT => return Err(ClientError::Timeout),
            s if s.is_server_error() => return Err(ClientError::Server(s.as_u16())),
            s => {
                let body = resp.text().unwrap_or_default();
                return Err(ClientError::Rejected {
                    status: s.as_u16(),
                    body: body.chars().take(200).collect(),
                });
            }
        }
        let text = resp.text().map_err(classify)?;
        let body: Value = serde_json::from_str(&text)
            .map_err(|e| ClientError::MalformedResponse(e.to_string()))?;
        parse_content(&body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn secret_is_redacted() {
        let s = Secret::new("sk-very-secret".into());
        assert_eq!(format!("{s:?}"), "Secret(***)");
        let cfg = EndpointConfig {
            base_url: "http://127.0.0.1:9/v1/".into(),
            ..Default::default()
        };
        let t = ChatCompletionsTransport::with_token(&cfg, Some(s)).unwrap();
        let dbg = format!("{t:?}");
        assert!(!dbg.contains("sk-very-secret"));
        assert_eq!(t.url, "http://127.0.0.1:9/v1/chat/completions");
    }

    #[test]
    fn body_shape() {
        let cfg = EndpointConfig {
            base_url: "http://x".into(),
            model: "m1".into(),
            ..Default::default()
        };
        let t = ChatCompletionsTransport::with_token(&cfg, None).unwrap();
        let body = t.request_body(&Prompt {
            system: "sys".into(),
            user: "usr".into(),
        });
        assert_eq!(body["model"], "m1");
        assert_eq!(body["messages"][0]["role"], "system");
        assert_eq!(body["messages"][1]["content"], "usr");
        assert_eq!(body["temperature"], 0.0);
    }

    #[test]
    fn content_extraction() {
        let ok = json!({"choices": [{"message": {"role": "assistant", "content": "hello"}}]});
        assert_eq!(parse_content(&ok).unwrap(), "hello");
        assert!(matches!(
            parse_content(&json!({"choices": []})),
            Err(ClientError::MalformedResponse(_))
        ));
    }

    #[test]
    fn missing_token_variable() {
        let cfg = EndpointConfig {
            base_url: "http://x".into(),
            token_env: Some("LINGCTL_SURELY_UNSET_VAR".into()),
            ..Default::default()
        };
        assert!(matches!(
            ChatCompletionsTransport::new(&cfg),
            Err(ClientError::Auth(_))
        ));
    }
}
