use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("similarity process i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("similarity process protocol: {0}")]
    Protocol(String),
    #[error("similarity score {0} outside [0, 1]")]
    OutOfRange(f64),
}

/// Source of a semantic similarity score in `[0, 1]`.
pub trait SimilarityProvider: Send + Sync {
    fn name(&self) -> String;
    fn score(&self, reference: &str, hypothesis: &str) -> Result<f64, SimilarityError>;
}

/// Longest common subsequence length.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// 1 for identical strings, otherwise unit LCS over the longer length.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactMatch;

impl SimilarityProvider for ExactMatch {
    fn name(&self) -> String {
        "exact_match".into()
    }

    fn score(&self, reference: &str, hypothesis: &str) -> Result<f64, SimilarityError> {
        if reference == hypothesis {
            return Ok(1.0);
        }
        let r: Vec<char> = reference.chars().collect();
        let h: Vec<char> = hypothesis.chars().collect();
        Ok(lcs_len(&r, &h) as f64 / r.len().max(h.len()) as f64)
    }
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    #[serde(rename = "ref")]
    reference: &'a str,
    hyp: &'a str,
}

#[derive(Deserialize)]
struct ScoreResponse {
    score: f64,
}

struct ProcessIo {
    _child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

/// Long-running scorer speaking line-delimited JSON on stdin/stdout.
///
/// Requests are serialized through one process handle.
pub struct ExternalProcessSimilarity {
    command: String,
    io: Mutex<ProcessIo>,
}

impl ExternalProcessSimilarity {
    /// Spawns `command` through `sh -c`.
    pub fn spawn(command: &str) -> Result<Self, SimilarityError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            command: command.to_string(),
            io: Mutex::new(ProcessIo {
                _child: child,
                stdin,
                stdout,
            }),
        })
    }
}

impl SimilarityProvider for ExternalProcessSimilarity {
    fn name(&self) -> String {
        format!("process:{}", self.command)
    }

    fn score(&self, reference: &str, hypothesis: &str) -> Result<f64, SimilarityError> {
        let mut io = self.io.lock().map_err(|_| SimilarityError::Protocol("poisoned".into()))?;
        let line = serde_json::to_string(&ScoreRequest {
            reference,
            hyp: hypothesis,
        })
        .map_err(|e| SimilarityError::Protocol(e.to_string()))?;
        writeln!(io.stdin, "{line}")?;
        io.stdin.flush()?;
        let mut reply = String::new();
        if io.stdout.read_line(&mut reply)? == 0 {
            return Err(SimilarityError::Protocol("process closed its output".into()));
        }
        let resp: ScoreResponse =
            serde_json::from_str(reply.trim()).map_err(|e| SimilarityError::Protocol(e.to_string()))?;
        if !(0.0..=1.0).contains(&resp.score) {
            return Err(SimilarityError::OutOfRange(resp.score));
        }
        Ok(resp.score)
    }
}

/// Provider score, or `None` when no provider is configured or it fails.
pub fn similarity(
    reference: &str,
    hypothesis: &str,
    provider: Option<&dyn SimilarityProvider>,
) -> Option<f64> {
    let p = provider?;
    match p.score(reference, hypothesis) {
        Ok(s) => Some(s),
        Err(e) => {
            warn!("similarity provider {} failed: {e}", p.name());
            None
        }
    }
}
