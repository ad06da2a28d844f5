use std::io::Read;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::decoder::{DecodeCall, Decoder, DecoderError};

pub const DEFAULT_API_KEY_HEADER: &str = "x-api-key";

#[derive(Serialize)]
struct WireRequest<'a> {
    prompt: &'a str,
    max_chars: usize,
}

#[derive(Deserialize)]
struct WireResponse {
    text: String,
}

/// Extracts `text` from a decoder response body.
pub fn parse_response(body: &[u8]) -> Result<String, DecoderError> {
    serde_json::from_slice::<WireResponse>(body)
        .map(|r| r.text)
        .map_err(|e| DecoderError::Protocol(e.to_string()))
}

/// Decoder reached over HTTP.
///
/// Sends `POST {"prompt": .., "max_chars": ..}` and expects `{"text": ..}`.
pub struct HttpDecoder {
    url: String,
    api_key: Option<(String, String)>,
    agent: ureq::Agent,
}

impl HttpDecoder {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        Self {
            url: url.into(),
            api_key: None,
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }

    pub fn with_api_key(mut self, header: impl Into<String>, key: impl Into<String>) -> Self {
        self.api_key = Some((header.into(), key.into()));
        self
    }
}

impl Decoder for HttpDecoder {
    fn name(&self) -> String {
        self.url.clone()
    }

    fn decode(&self, call: &DecodeCall<'_>) -> Result<String, DecoderError> {
        let mut req = self.agent.post(&self.url);
        if let Some((header, key)) = &self.api_key {
            req = req.set(header, key);
        }
        let body = WireRequest {
            prompt: call.prompt,
            max_chars: call.max_chars,
        };
        match req.send_json(&body) {
            Ok(resp) => {
                let mut body = Vec::new();
                resp.into_reader()
                    .read_to_end(&mut body)
                    .map_err(|e| DecoderError::Transport(e.to_string()))?;
                parse_response(&body)
            }
            Err(ureq::Error::Status(code, _)) => Err(DecoderError::Status(code)),
            Err(e) => Err(DecoderError::Transport(e.to_string())),
        }
    }
}
