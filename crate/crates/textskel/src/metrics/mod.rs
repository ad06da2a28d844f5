//! Lexical fidelity metrics and their aggregation.

mod aggregate;
mod similarity;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::strategies::StrategyId;
use crate::text::{tokenize_units, Chunk, Lang, SpanKind};

pub use aggregate::{aggregate, confidence_interval, CellSummary, METRICS, Z_95};
pub use similarity::{
    lcs_len, similarity, ExactMatch, ExternalProcessSimilarity, SimilarityError, SimilarityProvider,
};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("character error rate is undefined for an empty reference")]
    EmptyReference,
}

/// Unit-level Levenshtein distance with unit costs.
pub fn edit_distance(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Character error rate: edit distance divided by the reference length.
pub fn cer(reference: &str, hypothesis: &str) -> Result<f64, MetricError> {
    let r: Vec<char> = reference.chars().collect();
    if r.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let h: Vec<char> = hypothesis.chars().collect();
    Ok(edit_distance(&r, &h) as f64 / r.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeL {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// LCS-based ROUGE-L over word sequences.
pub fn rouge_l<S: PartialEq>(reference: &[S], hypothesis: &[S]) -> RougeL {
    let lcs = lcs_len(reference, hypothesis) as f64;
    let precision = if hypothesis.is_empty() {
        0.0
    } else {
        lcs / hypothesis.len() as f64
    };
    let recall = if reference.is_empty() {
        0.0
    } else {
        lcs / reference.len() as f64
    };
    let f = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    RougeL {
        precision,
        recall,
        f,
    }
}

/// Lowercased tokens for ROUGE-L; punctuation and whitespace are dropped.
pub fn rouge_tokens(text: &str, lang: Lang) -> Vec<String> {
    let units: Vec<char> = text.chars().collect();
    tokenize_units(&units, lang)
        .into_iter()
        .filter(|s| !matches!(s.kind, SpanKind::Punct | SpanKind::Whitespace))
        .map(|s| s.text(&units).to_lowercase())
        .collect()
}

pub fn rouge_l_text(reference: &str, hypothesis: &str, lang: Lang) -> RougeL {
    rouge_l(&rouge_tokens(reference, lang), &rouge_tokens(hypothesis, lang))
}

/// Fraction of annotated entity mentions surviving contiguously in the
/// skeleton. `None` without annotations.
pub fn entity_preservation(chunk: &Chunk, skeleton_text: &str) -> Option<f64> {
    let ents = chunk.entities()?;
    if ents.is_empty() {
        return None;
    }
    let kept = ents
        .iter()
        .filter(|e| skeleton_text.contains(e.surface.as_str()))
        .count();
    Some(kept as f64 / ents.len() as f64)
}

/// Per-chunk metric row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub strategy: StrategyId,
    pub r_keep: f64,
    pub chunk_id: String,
    pub cer: f64,
    pub rouge_l_f: f64,
    pub entity_pres: Option<f64>,
    pub retention: f64,
    pub sim: Option<f64>,
    pub attempts: Option<u32>,
}

/// Scores one chunk.
///
/// `skeleton` drives retention and entity preservation; `hypothesis` (the
/// reconstruction, or the skeleton when no decoder ran) drives CER and
/// ROUGE-L.
pub fn evaluate_chunk(
    chunk: &Chunk,
    strategy: StrategyId,
    r_keep: f64,
    skeleton: &str,
    hypothesis: &str,
    attempts: Option<u32>,
    provider: Option<&dyn SimilarityProvider>,
) -> MetricReport {
    MetricReport {
        strategy,
        r_keep,
        chunk_id: chunk.id().to_string(),
        cer: cer(chunk.text(), hypothesis).expect("chunks are never empty"),
        rouge_l_f: rouge_l_text(chunk.text(), hypothesis, chunk.lang()).f,
        entity_pres: entity_preservation(chunk, skeleton),
        retention: skeleton.chars().count() as f64 / chunk.len() as f64,
        sim: similarity(chunk.text(), hypothesis, provider),
        attempts,
    }
}
