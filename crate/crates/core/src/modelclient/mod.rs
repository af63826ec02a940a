//! Model endpoints: an HTTP chat-completions client, offline mocks, retry
//! handling and a resumable batch runner.

mod batch;
mod client;
mod config;
mod http;
mod mock;

pub use batch::{load_ledger, run_batch, CompletionRecord};
pub use client::{Completion, Failure, ModelClient};
pub use config::{Backend, EndpointConfig};
pub use http::{ChatCompletionsTransport, Secret};
pub use mock::{constructive_mock, CannedTransport, ConstructiveTransport};

use crate::dataset::Prompt;
use crate::error::ClientError;

/// Sends one prompt and returns the raw response text.
pub trait Transport: Send + Sync {
    fn send(&self, prompt: &Prompt) -> Result<String, ClientError>;

    /// Offline transports report zero latency so their ledgers are
    /// reproducible byte for byte.
    fn simulated(&self) -> bool {
        false
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn send(&self, prompt: &Prompt) -> Result<String, ClientError> {
        (**self).send(prompt)
    }

    fn simulated(&self) -> bool {
        (**self).simulated()
    }
}

/// Builds the transport named by `cfg.backend`.
pub fn transport_from_config(cfg: &EndpointConfig) -> Result<Box<dyn Transport>, ClientError> {
    cfg.check()?;
    Ok(match &cfg.backend {
        Backend::ChatCompletions => Box::new(ChatCompletionsTransport::new(cfg)?),
        Backend::Canned { response } => Box::new(CannedTransport::new(response.clone())),
        Backend::Constructive => Box::new(ConstructiveTransport),
    })
}
