//! Reconstruction through external decoders.
//!
//! The client renders a prompt, enforces the ±15% output-length window and
//! retries violations up to a bound. Transport failures back off
//! exponentially between attempts.

mod http;
mod mock;
mod prompt;

use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::strategies::StrategyId;
use crate::text::{Chunk, Lang, RetentionBudget};

pub use http::{parse_response, HttpDecoder, DEFAULT_API_KEY_HEADER};
pub use mock::{MockDecoder, MockKind, PAD_UNIT};
pub use prompt::{PromptTemplate, TemplateKind, SKELETON_PLACEHOLDER, TARGET_LEN_PLACEHOLDER};

/// Accepted output length, in percent of the estimate (inclusive).
pub const WINDOW_LOW_PCT: usize = 85;
pub const WINDOW_HIGH_PCT: usize = 115;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecoderError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("decoder returned HTTP {0}")]
    Status(u16),
    #[error("malformed decoder response: {0}")]
    Protocol(String),
    #[error("no decoder attempt succeeded after {attempts} tries: {last}")]
    Exhausted { attempts: u32, last: Box<DecoderError> },
    #[error("invalid decoder endpoint `{0}`")]
    BadEndpoint(String),
    #[error("original length estimate must be at least 1")]
    ZeroEstimate,
}

/// One call handed to a decoder backend.
#[derive(Debug, Clone, Copy)]
pub struct DecodeCall<'a> {
    pub prompt: &'a str,
    pub skeleton: &'a str,
    pub target_len: usize,
    /// Upper edge of the acceptance window.
    pub max_chars: usize,
}

/// A text-to-text decoder backend.
pub trait Decoder: Send + Sync {
    fn name(&self) -> String;
    fn decode(&self, call: &DecodeCall<'_>) -> Result<String, DecoderError>;
}

/// Builds a decoder from `mock:<kind>` or an `http(s)://` URL.
pub fn decoder_from_endpoint(
    endpoint: &str,
    timeout: Duration,
    api_key: Option<(String, String)>,
) -> Result<Arc<dyn Decoder>, DecoderError> {
    if let Some(kind) = endpoint.strip_prefix("mock:") {
        let kind: MockKind = kind
            .parse()
            .map_err(|_| DecoderError::BadEndpoint(endpoint.to_string()))?;
        return Ok(Arc::new(MockDecoder::new(kind)));
    }
    if endpoint.starts_with("http://") || endpoint.starts_with("https://") {
        let mut d = HttpDecoder::new(endpoint, timeout);
        if let Some((header, key)) = api_key {
            d = d.with_api_key(header, key);
        }
        return Ok(Arc::new(d));
    }
    Err(DecoderError::BadEndpoint(endpoint.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionRequest {
    pub id: String,
    pub skeleton: String,
    pub original_len_estimate: usize,
    pub lang: Lang,
    pub template: TemplateKind,
    pub strategy: Option<StrategyId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub id: String,
    pub text: String,
    pub attempts: u32,
    pub accepted: bool,
    pub latency_ms: Vec<f64>,
}

/// Whether `len` lies within [85%, 115%] of `estimate`, boundaries included.
pub fn within_window(len: usize, estimate: usize) -> bool {
    100 * len >= WINDOW_LOW_PCT * estimate && 100 * len <= WINDOW_HIGH_PCT * estimate
}

/// Distance of the length ratio from 1, used to rank rejected attempts.
fn length_error(len: usize, estimate: usize) -> f64 {
    (len as f64 / estimate as f64 - 1.0).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub backoff_base: Duration,
    pub backoff_max: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 3,
            backoff_base: Duration::from_millis(500),
            backoff_max: Duration::from_secs(8),
        }
    }
}

impl RetryPolicy {
    pub fn immediate(max_retries: u32) -> Self {
        Self {
            max_retries,
            backoff_base: Duration::ZERO,
            backoff_max: Duration::ZERO,
        }
    }

    fn backoff(&self, failures: u32) -> Duration {
        let factor = 1u32.checked_shl(failures.saturating_sub(1)).unwrap_or(u32::MAX);
        self.backoff_base.saturating_mul(factor).min(self.backoff_max)
    }
}

/// Decoder front end: prompt templating, retries, bounded concurrency.
#[derive(Clone)]
pub struct ReconstructionClient {
    decoder: Arc<dyn Decoder>,
    policy: RetryPolicy,
    max_in_flight: usize,
    custom_template: Option<PromptTemplate>,
}

impl ReconstructionClient {
    pub fn new(decoder: Arc<dyn Decoder>, policy: RetryPolicy) -> Self {
        Self {
            decoder,
            policy,
            max_in_flight: 4,
            custom_template: None,
        }
    }

    pub fn mock(kind: MockKind, max_retries: u32) -> Self {
        Self::new(Arc::new(MockDecoder::new(kind)), RetryPolicy::immediate(max_retries))
    }

    pub fn with_max_in_flight(mut self, n: usize) -> Self {
        self.max_in_flight = n.max(1);
        self
    }

    /// Overrides the built-in reconstruction template.
    pub fn with_template(mut self, template: PromptTemplate) -> Self {
        self.custom_template = Some(template);
        self
    }

    pub fn decoder_name(&self) -> String {
        self.decoder.name()
    }

    pub fn policy(&self) -> &RetryPolicy {
        &self.policy
    }

    pub fn template_for(&self, req: &ReconstructionRequest) -> PromptTemplate {
        match (&self.custom_template, req.template) {
            (Some(t), TemplateKind::Reconstruct) => t.clone(),
            _ => PromptTemplate::builtin(req.template, req.lang),
        }
    }

    pub fn render_prompt(&self, req: &ReconstructionRequest) -> String {
        self.template_for(req)
            .render(&req.skeleton, req.original_len_estimate)
    }

    /// Runs up to `max_retries + 1` attempts and returns the first accepted
    /// output, or else the attempt whose length is closest to the estimate.
    pub fn reconstruct(&self, req: &ReconstructionRequest) -> Result<ReconstructionResult, DecoderError> {
        let estimate = req.original_len_estimate;
        if estimate == 0 {
            return Err(DecoderError::ZeroEstimate);
        }
        let prompt = self.render_prompt(req);
        let call = DecodeCall {
            prompt: &prompt,
            skeleton: &req.skeleton,
            target_len: estimate,
            max_chars: (WINDOW_HIGH_PCT * estimate) / 100,
        };
        let mut latency_ms = Vec::new();
        let mut best: Option<(f64, String)> = None;
        let mut last_err = None;
        let mut failures = 0;
        let max_attempts = self.policy.max_retries + 1;
        for attempt in 1..=max_attempts {
            let started = Instant::now();
            let outcome = self.decoder.decode(&call);
            latency_ms.push(started.elapsed().as_secs_f64() * 1e3);
            match outcome {
                Ok(text) => {
                    let len = text.chars().count();
                    if len > 0 && within_window(len, estimate) {
                        return Ok(ReconstructionResult {
                            id: req.id.clone(),
                            text,
                            attempts: attempt,
                            accepted: true,
                            latency_ms,
                        });
                    }
                    let err = length_error(len, estimate);
                    if best.as_ref().is_none_or(|(e, _)| err < *e) {
                        best = Some((err, text));
                    }
                }
                Err(e) => {
                    failures += 1;
                    warn!("{}: attempt {attempt} failed: {e}", req.id);
                    last_err = Some(e);
                    if attempt < max_attempts {
                        thread::sleep(self.policy.backoff(failures));
                    }
                }
            }
        }
        match best {
            Some((_, text)) => Ok(ReconstructionResult {
                id: req.id.clone(),
                text,
                attempts: max_attempts,
                accepted: false,
                latency_ms,
            }),
            None => Err(DecoderError::Exhausted {
                attempts: max_attempts,
                last: Box::new(last_err.expect("every attempt failed")),
            }),
        }
    }

    /// Reconstructs a batch with at most `max_in_flight` concurrent requests.
    /// Results keep the input order.
    pub fn reconstruct_many(
        &self,
        reqs: &[ReconstructionRequest],
    ) -> Vec<Result<ReconstructionResult, DecoderError>> {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.max_in_flight)
            .build()
        {
            Ok(pool) => pool.install(|| reqs.par_iter().map(|r| self.reconstruct(r)).collect()),
            Err(_) => reqs.iter().map(|r| self.reconstruct(r)).collect(),
        }
    }
}

/// Summarization baseline: asks the decoder to compress the original text to
/// `round(r_keep L)` units. The output is evaluated directly.
pub fn summarize_to_length(
    chunk: &Chunk,
    budget: &RetentionBudget,
    client: &ReconstructionClient,
) -> Result<ReconstructionResult, DecoderError> {
    let req = summarize_request(chunk, budget);
    client.reconstruct(&req)
}

pub fn summarize_request(chunk: &Chunk, budget: &RetentionBudget) -> ReconstructionRequest {
    ReconstructionRequest {
        id: chunk.id().to_string(),
        skeleton: chunk.text().to_string(),
        original_len_estimate: budget.target(chunk.len()),
        lang: chunk.lang(),
        template: TemplateKind::Summarize,
        strategy: Some(StrategyId::Summarize),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};

    fn request(skeleton: &str, estimate: usize) -> ReconstructionRequest {
        ReconstructionRequest {
            id: "r".into(),
            skeleton: skeleton.into(),
            original_len_estimate: estimate,
            lang: Lang::English,
            template: TemplateKind::Reconstruct,
            strategy: None,
        }
    }

    #[test]
    fn window_boundaries_inclusive() {
        assert!(within_window(85, 100));
        assert!(within_window(115, 100));
        assert!(!within_window(84, 100));
        assert!(!within_window(116, 100));
        // 17/20 = 0.85 exactly, 23/20 = 1.15 exactly
        assert!(within_window(17, 20));
        assert!(within_window(23, 20));
        assert!(!within_window(0, 1));
    }

    #[test]
    fn echo_accepts_on_first_attempt() {
        let client = ReconstructionClient::mock(MockKind::Echo, 3);
        let sk = "x".repeat(100);
        let res = client.reconstruct(&request(&sk, 100)).unwrap();
        assert!(res.accepted);
        assert_eq!(res.attempts, 1);
        assert_eq!(res.latency_ms.len(), 1);
    }

    #[test]
    fn oversized_output_rejected_after_all_attempts() {
        for max_retries in [0, 1, 4] {
            let client = ReconstructionClient::mock(MockKind::RepeatLoop, max_retries);
            let res = client.reconstruct(&request(&"y".repeat(50), 100)).unwrap();
            assert!(!res.accepted);
            assert_eq!(res.attempts, max_retries + 1);
            assert_eq!(res.latency_ms.len() as u32, max_retries + 1);
        }
    }

    #[test]
    fn pad_to_estimate_accepts() {
        let client = ReconstructionClient::mock(MockKind::PadToEstimate, 2);
        let res = client.reconstruct(&request("ab", 5)).unwrap();
        assert!(res.accepted);
        assert_eq!(res.attempts, 1);
        assert_eq!(res.text, "ab___");
    }

    #[test]
    fn empty_output_is_a_violation() {
        let client = ReconstructionClient::mock(MockKind::Echo, 1);
        let res = client.reconstruct(&request("", 10)).unwrap();
        assert!(!res.accepted);
        assert_eq!(res.attempts, 2);
    }

    #[test]
    fn transport_failures_exhaust() {
        let client = ReconstructionClient::mock(MockKind::Fail, 2);
        let err = client.reconstruct(&request("abc", 3)).unwrap_err();
        assert!(matches!(err, DecoderError::Exhausted { attempts: 3, .. }));
    }

    struct Scripted {
        calls: AtomicU32,
        outputs: Vec<Result<String, DecoderError>>,
    }

    impl Decoder for Scripted {
        fn name(&self) -> String {
            "scripted".into()
        }
        fn decode(&self, _: &DecodeCall<'_>) -> Result<String, DecoderError> {
            let i = self.calls.fetch_add(1, Ordering::SeqCst) as usize;
            self.outputs[i.min(self.outputs.len() - 1)].clone()
        }
    }

    #[test]
    fn best_attempt_is_closest_and_transport_errors_retry() {
        let dec = Scripted {
            calls: AtomicU32::new(0),
            outputs: vec![
                Err(DecoderError::Transport("reset".into())),
                Ok("z".repeat(150)),
                Ok("z".repeat(125)),
                Ok("z".repeat(200)),
            ],
        };
        let client = ReconstructionClient::new(Arc::new(dec), RetryPolicy::immediate(3));
        let res = client.reconstruct(&request("abc", 100)).unwrap();
        assert!(!res.accepted);
        assert_eq!(res.attempts, 4);
        assert_eq!(res.text.len(), 125);

        let dec = Scripted {
            calls: AtomicU32::new(0),
            outputs: vec![Err(DecoderError::Status(503)), Ok("w".repeat(100))],
        };
        let client = ReconstructionClient::new(Arc::new(dec), RetryPolicy::immediate(3));
        let res = client.reconstruct(&request("abc", 100)).unwrap();
        assert!(res.accepted);
        assert_eq!(res.attempts, 2);
    }

    #[test]
    fn summarize_target_in_prompt() {
        let text: String = "abcdefghij".repeat(16);
        let chunk = Chunk::english("s", text).unwrap();
        let budget = RetentionBudget::new(0.1).unwrap();
        let req = summarize_request(&chunk, &budget);
        assert_eq!(req.original_len_estimate, 16);
        let client = ReconstructionClient::mock(MockKind::Echo, 0);
        assert!(client.render_prompt(&req).contains("at most 16 characters"));

        let full = summarize_request(&chunk, &RetentionBudget::new(1.0).unwrap());
        assert_eq!(full.original_len_estimate, 160);
        let res = summarize_to_length(&chunk, &RetentionBudget::new(1.0).unwrap(), &client).unwrap();
        assert!(res.accepted);
    }

    #[test]
    fn batch_keeps_order() {
        let client = ReconstructionClient::mock(MockKind::Echo, 0).with_max_in_flight(3);
        let reqs: Vec<_> = (1..20)
            .map(|i| {
                let mut r = request(&"a".repeat(i), i);
                r.id = format!("c{i}");
                r
            })
            .collect();
        let out = client.reconstruct_many(&reqs);
        for (r, o) in reqs.iter().zip(out) {
            assert_eq!(o.unwrap().id, r.id);
        }
    }

    #[test]
    fn endpoint_parsing() {
        assert!(decoder_from_endpoint("mock:echo", Duration::from_secs(1), None).is_ok());
        assert!(decoder_from_endpoint("http://localhost:1/x", Duration::from_secs(1), None).is_ok());
        assert!(matches!(
            decoder_from_endpoint("ftp://x", Duration::from_secs(1), None),
            Err(DecoderError::BadEndpoint(_))
        ));
        assert!(decoder_from_endpoint("mock:nope", Duration::from_secs(1), None).is_err());
    }
}
