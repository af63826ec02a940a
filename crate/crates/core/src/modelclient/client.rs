use std::thread;
use std::time::Duration;

use log::debug;

use crate::dataset::Prompt;
use crate::error::ClientError;

use super::config::EndpointConfig;
use super::Transport;

const MAX_BACKOFF_MS: u64 = 30_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Completion {
    pub text: String,
    pub attempts: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub error: ClientError,
    pub attempts: u32,
}

/// A transport plus retry policy.
pub struct ModelClient<T: Transport> {
    transport: T,
    max_retries: u32,
    backoff_ms: u64,
}

impl<T: Transport> ModelClient<T> {
    pub fn new(transport: T, cfg: &EndpointConfig) -> Self {
        Self {
            transport,
            max_retries: cfg.max_retries,
            backoff_ms: cfg.backoff_ms,
        }
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    fn delay(&self, attempt: u32) -> Duration {
        let factor = 1u64 << (attempt - 1).min(20);
        Duration::from_millis(self.backoff_ms.saturating_mul(factor).min(MAX_BACKOFF_MS))
    }

    /// Sends `prompt`, retrying transient failures up to `max_retries`
    /// times with exponential backoff.
    pub fn complete(&self, prompt: &Prompt) -> Result<Completion, Failure> {
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.transport.send(prompt) {
                Ok(text) => return Ok(Completion { text, attempts }),
                Err(e) if e.is_transient() && attempts <= self.max_retries => {
                    debug!("attempt {attempts} failed: {e}; retrying");
                    thread::sleep(self.delay(attempts));
                }
                Err(error) => return Err(Failure { error, attempts }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    /// Replays a fixed script of outcomes, then keeps returning the last.
    struct Scripted(Mutex<Vec<Result<String, ClientError>>>);

    impl Transport for Scripted {
        fn send(&self, _: &Prompt) -> Result<String, ClientError> {
            let mut s = self.0.lock().unwrap();
            if s.len() > 1 {
                s.remove(0)
            } else {
                s[0].clone()
            }
        }
    }

    fn cfg(retries: u32) -> EndpointConfig {
        EndpointConfig {
            max_retries: retries,
            backoff_ms: 1,
            ..Default::default()
        }
    }

    fn prompt() -> Prompt {
        Prompt {
            system: String::new(),
            user: "hi".into(),
        }
    }

    #[test]
    fn retries_rate_limits_then_succeeds() {
        let t = Scripted(Mutex::new(vec![
            Err(ClientError::RateLimited),
            Err(ClientError::RateLimited),
            Ok("done".into()),
        ]));
        let c = ModelClient::new(t, &cfg(3));
        assert_eq!(
            c.complete(&prompt()).unwrap(),
            Completion {
                text: "done".into(),
                attempts: 3
            }
        );
    }

    #[test]
    fn gives_up_after_max_retries() {
        let t = Scripted(Mutex::new(vec![Err(ClientError::Timeout)]));
        let f = ModelClient::new(t, &cfg(2))
            .complete(&prompt())
            .unwrap_err();
        assert_eq!(f.error, ClientError::Timeout);
        assert_eq!(f.attempts, 3);
    }

    #[test]
    fn permanent_errors_are_not_retried() {
        let t = Scripted(Mutex::new(vec![Err(ClientError::Auth("HTTP 401".into()))]));
        let f = ModelClient::new(t, &cfg(5))
            .complete(&prompt())
            .unwrap_err();
        assert_eq!(f.attempts, 1);
    }

    #[test]
    fn backoff_doubles_and_caps() {
        let c = ModelClient::new(
            Scripted(Mutex::new(vec![Ok(String::new())])),
            &EndpointConfig {
                backoff_ms: 500,
                ..Default::default()
            },
        );
        assert_eq!(c.delay(1), Duration::from_millis(500));
        assert_eq!(c.delay(3), Duration::from_millis(2000));
        assert_eq!(c.delay(40), Duration::from_millis(MAX_BACKOFF_MS));
    }
}
