use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::frequency::FrequencyTable;
use crate::semantic::SemanticError;
use crate::text::{word_spans, Chunk, TokenSpan};

/// Zipf score at or above which unigram surprisal is zero.
pub const ZIPF_CEILING: f64 = 8.0;

/// Per-word surprisal in nats, aligned with the chunk's word spans.
#[derive(Debug, Clone, PartialEq)]
pub struct SurprisalScores {
    id: String,
    scores: Vec<f64>,
}

impl SurprisalScores {
    /// Validates count and range against the chunk's word spans.
    pub fn new(chunk: &Chunk, spans: &[TokenSpan], scores: Vec<f64>) -> Result<Self, SemanticError> {
        let expected = word_spans(spans).count();
        if scores.len() != expected {
            return Err(SemanticError::Alignment {
                id: chunk.id().to_string(),
                expected,
                actual: scores.len(),
            });
        }
        if let Some(&bad) = scores.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(SemanticError::BadScore {
                id: chunk.id().to_string(),
                value: bad,
            });
        }
        Ok(Self {
            id: chunk.id().to_string(),
            scores,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub(crate) fn check(&self, chunk: &Chunk, spans: &[TokenSpan]) -> Result<(), SemanticError> {
        let expected = word_spans(spans).count();
        if self.scores.len() != expected {
            return Err(SemanticError::Alignment {
                id: chunk.id().to_string(),
                expected,
                actual: self.scores.len(),
            });
        }
        Ok(())
    }
}

/// `(8 - zipf) ln 10`, clamped at zero; out-of-vocabulary words count as zipf 0.
pub fn unigram_surprisal(zipf: Option<f64>) -> f64 {
    ((ZIPF_CEILING - zipf.unwrap_or(0.0)) * std::f64::consts::LN_10).max(0.0)
}

pub trait SurprisalProvider: Send + Sync {
    fn name(&self) -> String;
    fn scores(&self, chunk: &Chunk, spans: &[TokenSpan]) -> Result<SurprisalScores, SemanticError>;
}

fn word_texts(chunk: &Chunk, spans: &[TokenSpan]) -> Vec<String> {
    word_spans(spans).map(|s| s.text(chunk.units())).collect()
}

/// One surprisal JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurprisalRecord {
    pub id: String,
    pub tokens: Vec<String>,
    pub surprisal: Vec<f64>,
}

/// Precomputed scores keyed by chunk id.
#[derive(Debug, Clone, Default)]
pub struct SurprisalFile {
    records: HashMap<String, SurprisalRecord>,
}

impl SurprisalFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SemanticError> {
        Self::read(BufReader::new(File::open(path)?))
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, SemanticError> {
        let mut records = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: SurprisalRecord = serde_json::from_str(&line).map_err(|e| SemanticError::Json {
                line: i + 1,
                source: e,
            })?;
            if rec.tokens.len() != rec.surprisal.len() {
                return Err(SemanticError::Alignment {
                    id: rec.id,
                    expected: rec.tokens.len(),
                    actual: rec.surprisal.len(),
                });
            }
            if records.insert(rec.id.clone(), rec).is_some() {
                warn!("duplicate surprisal record on line {}; keeping the last", i + 1);
            }
        }
        Ok(Self { records })
    }

    pub fn from_records(records: impl IntoIterator<Item = SurprisalRecord>) -> Self {
        Self {
            records: records.into_iter().map(|r| (r.id.clone(), r)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl SurprisalProvider for SurprisalFile {
    fn name(&self) -> String {
        "file".into()
    }

    fn scores(&self, chunk: &Chunk, spans: &[TokenSpan]) -> Result<SurprisalScores, SemanticError> {
        let rec = self
            .records
            .get(chunk.id())
            .ok_or_else(|| SemanticError::MissingChunk(chunk.id().to_string()))?;
        let words = word_texts(chunk, spans);
        if rec.tokens.len() != words.len() {
            return Err(SemanticError::Alignment {
                id: chunk.id().to_string(),
                expected: words.len(),
                actual: rec.tokens.len(),
            });
        }
        if let Some(index) = rec.tokens.iter().zip(&words).position(|(a, b)| a != b) {
            return Err(SemanticError::TokenMismatch {
                id: chunk.id().to_string(),
                index,
                expected: words[index].clone(),
                actual: rec.tokens[index].clone(),
            });
        }
        SurprisalScores::new(chunk, spans, rec.surprisal.clone())
    }
}

/// Context-free surprisal from a Zipf frequency table.
#[derive(Debug, Clone)]
pub struct UnigramSurprisal {
    table: FrequencyTable,
}

impl UnigramSurprisal {
    pub fn new(table: FrequencyTable) -> Self {
        Self { table }
    }
}

impl SurprisalProvider for UnigramSurprisal {
    fn name(&self) -> String {
        "unigram".into()
    }

    fn scores(&self, chunk: &Chunk, spans: &[TokenSpan]) -> Result<SurprisalScores, SemanticError> {
        let scores = word_texts(chunk, spans)
            .iter()
            .map(|w| unigram_surprisal(self.table.lookup(w)))
            .collect();
        SurprisalScores::new(chunk, spans, scores)
    }
}

#[derive(Serialize)]
struct ProcessRequest<'a> {
    id: &'a str,
    tokens: &'a [String],
}

#[derive(Deserialize)]
struct ProcessReply {
    surprisal: Vec<f64>,
}

struct Pipe {
    stdin: BufWriter<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

/// Long-running scorer speaking line JSON on stdin/stdout.
///
/// Each request is `{"id", "tokens"}`; the reply is `{"surprisal": [...]}`.
/// Calls on one handle are serialized.
pub struct ExternalProcessSurprisal {
    command: String,
    child: Mutex<Child>,
    pipe: Mutex<Pipe>,
}

impl ExternalProcessSurprisal {
    pub fn spawn(command: &str) -> Result<Self, SemanticError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        Ok(Self {
            command: command.to_string(),
            child: Mutex::new(child),
            pipe: Mutex::new(Pipe {
                stdin: BufWriter::new(stdin),
                stdout: BufReader::new(stdout),
            }),
        })
    }
}

impl Drop for ExternalProcessSurprisal {
    fn drop(&mut self) {
        if let Ok(child) = self.child.get_mut() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

impl SurprisalProvider for ExternalProcessSurprisal {
    fn name(&self) -> String {
        format!("process:{}", self.command)
    }

    fn scores(&self, chunk: &Chunk, spans: &[TokenSpan]) -> Result<SurprisalScores, SemanticError> {
        let tokens = word_texts(chunk, spans);
        let req = serde_json::to_string(&ProcessRequest {
            id: chunk.id(),
            tokens: &tokens,
        })
        .expect("requests serialize");
        let mut pipe = self.pipe.lock().unwrap_or_else(|e| e.into_inner());
        writeln!(pipe.stdin, "{req}")?;
        pipe.stdin.flush()?;
        let mut line = String::new();
        if pipe.stdout.read_line(&mut line)? == 0 {
            return Err(SemanticError::Process("scorer closed its output".into()));
        }
        let reply: ProcessReply =
            serde_json::from_str(&line).map_err(|e| SemanticError::Process(format!("bad reply: {e}")))?;
        SurprisalScores::new(chunk, spans, reply.surprisal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    #[test]
    fn unigram_formula() {
        assert_eq!(unigram_surprisal(Some(8.0)), 0.0);
        assert_eq!(unigram_surprisal(Some(8.5)), 0.0);
        assert!((unigram_surprisal(Some(3.0)) - 5.0 * 10f64.ln()).abs() < 1e-12);
        assert!((unigram_surprisal(Some(3.0)) - 11.513).abs() < 1e-3);
        assert_eq!(unigram_surprisal(None), unigram_surprisal(Some(0.0)));
    }

    fn chunk5() -> (Chunk, Vec<TokenSpan>) {
        let c = Chunk::english("c1", "One two, three four five.").unwrap();
        let s = tokenize(&c);
        (c, s)
    }

    fn record(tokens: &[&str], scores: &[f64]) -> SurprisalRecord {
        SurprisalRecord {
            id: "c1".into(),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            surprisal: scores.to_vec(),
        }
    }

    #[test]
    fn file_scores_accepted_verbatim() {
        let (c, s) = chunk5();
        let f = SurprisalFile::from_records([record(
            &["One", "two", "three", "four", "five"],
            &[1.0, 2.0, 0.5, 3.0, 4.0],
        )]);
        assert_eq!(f.scores(&c, &s).unwrap().scores(), &[1.0, 2.0, 0.5, 3.0, 4.0]);
    }

    #[test]
    fn misalignment_names_counts() {
        let (c, s) = chunk5();
        let f = SurprisalFile::from_records([record(&["One", "two"], &[1.0, 2.0])]);
        let err = f.scores(&c, &s).unwrap_err();
        assert_eq!(
            err.to_string(),
            "surprisal for chunk `c1` has 2 scores, expected 5 word tokens"
        );
        let other = Chunk::english("zz", "x").unwrap();
        assert!(matches!(
            f.scores(&other, &tokenize(&other)),
            Err(SemanticError::MissingChunk(_))
        ));
    }

    #[test]
    fn token_text_must_match() {
        let (c, s) = chunk5();
        let f = SurprisalFile::from_records([record(
            &["One", "two", "three", "for", "five"],
            &[1.0; 5],
        )]);
        assert!(matches!(
            f.scores(&c, &s),
            Err(SemanticError::TokenMismatch { index: 3, .. })
        ));
    }

    #[test]
    fn jsonl_parsing() {
        let input = "{\"id\":\"a\",\"tokens\":[\"x\"],\"surprisal\":[0.5]}\n\n{bad";
        let err = SurprisalFile::read(input.as_bytes()).unwrap_err();
        assert!(matches!(err, SemanticError::Json { line: 3, .. }));
        let f = SurprisalFile::read(input.lines().next().unwrap().as_bytes()).unwrap();
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn negative_scores_rejected() {
        let (c, s) = chunk5();
        assert!(matches!(
            SurprisalScores::new(&c, &s, vec![1.0, -1.0, 0.0, 0.0, 0.0]),
            Err(SemanticError::BadScore { .. })
        ));
    }

    #[test]
    fn external_process_round_trip() {
        let (c, s) = chunk5();
        let p = ExternalProcessSurprisal::spawn(
            r#"while read -r line; do echo '{"surprisal":[1,2,3,4,5]}'; done"#,
        )
        .unwrap();
        assert_eq!(p.scores(&c, &s).unwrap().scores(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(p.scores(&c, &s).unwrap().len(), 5);
    }
}
