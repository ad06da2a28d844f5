use std::str::FromStr;

use crate::decoder::{DecodeCall, Decoder, DecoderError};

/// Fill unit appended by [`MockKind::PadToEstimate`].
pub const PAD_UNIT: char = '_';
const REPEAT_PREFIX: usize = 10;
const REPEAT_FACTOR: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MockKind {
    /// Returns the skeleton unchanged.
    Echo,
    /// Pads the skeleton with [`PAD_UNIT`] up to the target length.
    PadToEstimate,
    /// Returns at most half the target length of the skeleton.
    Truncating,
    /// Cycles the first ten skeleton units out to three times the target.
    RepeatLoop,
    /// Always fails with a transport error.
    Fail,
}

impl FromStr for MockKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "echo" => Ok(MockKind::Echo),
            "pad_to_estimate" => Ok(MockKind::PadToEstimate),
            "truncating" => Ok(MockKind::Truncating),
            "repeat_loop" => Ok(MockKind::RepeatLoop),
            "fail" => Ok(MockKind::Fail),
            other => Err(format!("unknown mock decoder `{other}`")),
        }
    }
}

/// Deterministic decoder used in tests and dry runs.
#[derive(Debug, Clone, Copy)]
pub struct MockDecoder {
    pub kind: MockKind,
}

impl MockDecoder {
    pub fn new(kind: MockKind) -> Self {
        Self { kind }
    }
}

impl Decoder for MockDecoder {
    fn name(&self) -> String {
        format!("mock:{:?}", self.kind).to_lowercase()
    }

    fn decode(&self, call: &DecodeCall<'_>) -> Result<String, DecoderError> {
        let sk = call.skeleton;
        Ok(match self.kind {
            MockKind::Echo => sk.to_string(),
            MockKind::PadToEstimate => {
                let have = sk.chars().count();
                let mut out = sk.to_string();
                out.extend(std::iter::repeat(PAD_UNIT).take(call.target_len.saturating_sub(have)));
                out
            }
            MockKind::Truncating => sk.chars().take(call.target_len / 2).collect(),
            MockKind::RepeatLoop => {
                let head: Vec<char> = sk.chars().take(REPEAT_PREFIX).collect();
                if head.is_empty() {
                    String::new()
                } else {
                    head.iter()
                        .cycle()
                        .take(REPEAT_FACTOR * call.target_len)
                        .collect()
                }
            }
            MockKind::Fail => return Err(DecoderError::Transport("mock transport failure".into())),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(skeleton: &str, target_len: usize) -> DecodeCall<'_> {
        DecodeCall {
            prompt: "",
            skeleton,
            target_len,
            max_chars: target_len,
        }
    }

    #[test]
    fn behaviours() {
        let echo = MockDecoder::new(MockKind::Echo);
        assert_eq!(echo.decode(&call("abc", 3)).unwrap(), "abc");
        let pad = MockDecoder::new(MockKind::PadToEstimate);
        assert_eq!(pad.decode(&call("ab", 5)).unwrap(), "ab___");
        let rep = MockDecoder::new(MockKind::RepeatLoop);
        let out = rep.decode(&call("abcdefghijklmnop", 7)).unwrap();
        assert_eq!(out.chars().count(), 21);
        assert!(out.starts_with("abcdefghijabcdefghij"));
        let trunc = MockDecoder::new(MockKind::Truncating);
        assert_eq!(trunc.decode(&call("abcdefgh", 8)).unwrap(), "abcd");
        assert!(MockDecoder::new(MockKind::Fail).decode(&call("a", 1)).is_err());
    }
}
