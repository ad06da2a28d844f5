use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::{ReconstructionClient, ReconstructionRequest, TemplateKind};
use crate::frequency::{Bucket, SchemeMode};
use crate::metrics::SimilarityProvider;
use crate::text::Chunk;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("cannot access calibration table: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed calibration table: {0}")]
    Json(#[from] serde_json::Error),
    #[error("calibration score for {bucket} is {value}, outside [0, 1]")]
    OutOfRange { bucket: Bucket, value: f64 },
    #[error("bucket {bucket} is not part of scheme {scheme}")]
    ForeignBucket { bucket: Bucket, scheme: &'static str },
    #[error("every calibration chunk failed for bucket {0}")]
    AllFailed(Bucket),
    #[error("cannot bucket chunk `{id}`: {reason}")]
    Bucketing { id: String, reason: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default)]
    pub corpus: String,
    #[serde(default)]
    pub created: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub decoder: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub similarity: String,
    #[serde(default)]
    pub chunks: usize,
    /// Buckets with no units in any calibration chunk (scored 1.0).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub absent: Vec<Bucket>,
    /// Per-bucket count of chunks whose reconstruction or scoring failed.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub failures: BTreeMap<Bucket, usize>,
}

/// Per-bucket full-deletion similarity scores `B_k^full`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub scheme: SchemeMode,
    pub b_full: BTreeMap<Bucket, f64>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl CalibrationTable {
    pub fn from_pairs(scheme: SchemeMode, pairs: impl IntoIterator<Item = (Bucket, f64)>) -> Self {
        Self {
            scheme,
            b_full: pairs.into_iter().collect(),
            provenance: Provenance::default(),
        }
    }

    pub fn b_full(&self, bucket: Bucket) -> Option<f64> {
        self.b_full.get(&bucket).copied()
    }

    pub fn validate(&self) -> Result<(), CalibrationError> {
        for (&bucket, &value) in &self.b_full {
            if !(0.0..=1.0).contains(&value) {
                return Err(CalibrationError::OutOfRange { bucket, value });
            }
            if !self.scheme.buckets().contains(&bucket) {
                return Err(CalibrationError::ForeignBucket {
                    bucket,
                    scheme: self.scheme.as_str(),
                });
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, CalibrationError> {
        let t: Self = serde_json::from_str(s)?;
        t.validate()?;
        Ok(t)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CalibrationError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration tables serialize")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CalibrationError> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

/// Measures `B_k^full` for every bucket of `scheme`.
///
/// For each bucket, every chunk containing it is stripped of that bucket's
/// units, reconstructed and scored against the original. The bucket's score
/// is the mean over chunks that succeeded. `bucketer` labels each unit of a
/// chunk.
pub fn calibrate<F>(
    chunks: &[Chunk],
    scheme: SchemeMode,
    bucketer: F,
    client: &ReconstructionClient,
    sim: &dyn SimilarityProvider,
    mut provenance: Provenance,
) -> Result<CalibrationTable, CalibrationError>
where
    F: Fn(&Chunk) -> Result<Vec<Bucket>, String>,
{
    let labels: Vec<Vec<Bucket>> = chunks
        .iter()
        .map(|c| {
            bucketer(c).map_err(|reason| CalibrationError::Bucketing {
                id: c.id().to_string(),
                reason,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut b_full = BTreeMap::new();
    for &bucket in scheme.buckets() {
        let mut reqs = Vec::new();
        let mut sources = Vec::new();
        for (chunk, units) in chunks.iter().zip(&labels) {
            if !units.contains(&bucket) {
                continue;
            }
            let keep: Vec<bool> = units.iter().map(|&b| b != bucket).collect();
            reqs.push(ReconstructionRequest {
                id: chunk.id().to_string(),
                skeleton: chunk.masked_text(&keep),
                original_len_estimate: chunk.len(),
                lang: chunk.lang(),
                template: TemplateKind::Reconstruct,
                strategy: None,
            });
            sources.push(chunk);
        }
        if reqs.is_empty() {
            b_full.insert(bucket, 1.0);
            provenance.absent.push(bucket);
            continue;
        }
        let mut scores = Vec::new();
        let mut failed = 0;
        for (chunk, res) in sources.iter().zip(client.reconstruct_many(&reqs)) {
            let scored = res
                .map_err(|e| e.to_string())
                .and_then(|r| sim.score(chunk.text(), &r.text).map_err(|e| e.to_string()));
            match scored {
                Ok(s) => scores.push(s),
                Err(e) => {
                    warn!("calibration {bucket} / {}: {e}", chunk.id());
                    failed += 1;
                }
            }
        }
        if scores.is_empty() {
            return Err(CalibrationError::AllFailed(bucket));
        }
        if failed > 0 {
            provenance.failures.insert(bucket, failed);
        }
        b_full.insert(bucket, scores.iter().sum::<f64>() / scores.len() as f64);
    }
    provenance.chunks = chunks.len();
    provenance.decoder = client.decoder_name();
    provenance.similarity = sim.name();
    Ok(CalibrationTable {
        scheme,
        b_full,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::MockKind;
    use crate::frequency::{classify, BucketScheme, FrequencyTable};
    use crate::metrics::ExactMatch;
    use crate::text::tokenize;

    fn six_class(table: FrequencyTable) -> impl Fn(&Chunk) -> Result<Vec<Bucket>, String> {
        move |c: &Chunk| {
            let spans = tokenize(c);
            Ok(classify(c, &spans, &table, &BucketScheme::six_class()).unit_buckets(&spans))
        }
    }

    #[test]
    fn echo_pipeline_scores_whitespace_loss() {
        let chunks = vec![Chunk::english("c", "a b").unwrap()];
        let client = ReconstructionClient::mock(MockKind::Echo, 0);
        let table = FrequencyTable::from_pairs([("a", 5.0), ("b", 5.0)]);
        let t = calibrate(
            &chunks,
            SchemeMode::SixClass,
            six_class(table),
            &client,
            &ExactMatch,
            Provenance::default(),
        )
        .unwrap();
        // deleting the space leaves "ab": LCS 2 over 3 units
        assert!((t.b_full(Bucket::Whitespace).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        // HIGH removes both letters: skeleton " " → LCS 1 / 3
        assert!((t.b_full(Bucket::High).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // absent buckets are flagged and neutral
        assert_eq!(t.b_full(Bucket::Punct), Some(1.0));
        assert!(t.provenance.absent.contains(&Bucket::Punct));
        assert!(t.provenance.absent.contains(&Bucket::Low));
    }

    struct Fixed(Vec<(&'static str, f64)>);
    impl SimilarityProvider for Fixed {
        fn name(&self) -> String {
            "fixed".into()
        }
        fn score(&self, reference: &str, _: &str) -> Result<f64, crate::metrics::SimilarityError> {
            Ok(self.0.iter().find(|(r, _)| *r == reference).unwrap().1)
        }
    }

    #[test]
    fn bucket_score_is_mean_over_chunks() {
        let chunks = vec![
            Chunk::english("a", "x y").unwrap(),
            Chunk::english("b", "z w").unwrap(),
        ];
        let client = ReconstructionClient::mock(MockKind::Echo, 0);
        let sim = Fixed(vec![("x y", 0.8), ("z w", 0.6)]);
        let t = calibrate(
            &chunks,
            SchemeMode::SixClass,
            six_class(FrequencyTable::from_pairs([("q", 1.0)])),
            &client,
            &sim,
            Provenance::default(),
        )
        .unwrap();
        assert!((t.b_full(Bucket::Whitespace).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn all_failures_is_an_error() {
        let chunks = vec![Chunk::english("a", "x y").unwrap()];
        let client = ReconstructionClient::mock(MockKind::Fail, 0);
        let err = calibrate(
            &chunks,
            SchemeMode::SixClass,
            six_class(FrequencyTable::from_pairs([("q", 1.0)])),
            &client,
            &ExactMatch,
            Provenance::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CalibrationError::AllFailed(_)));
    }

    #[test]
    fn json_shape_and_validation() {
        let json = r#"{"scheme":"3","b_full":{"LOW":0.2,"MID":0.7,"HIGH":0.95},"provenance":{"corpus":"bbc","created":"2026-01-01"}}"#;
        let t = CalibrationTable::from_json(json).unwrap();
        assert_eq!(t.scheme, SchemeMode::ThreeClass);
        assert_eq!(t.b_full(Bucket::High), Some(0.95));
        let back = CalibrationTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);

        let bad = r#"{"scheme":"3","b_full":{"LOW":1.2}}"#;
        assert!(matches!(
            CalibrationTable::from_json(bad),
            Err(CalibrationError::OutOfRange { .. })
        ));
        let foreign = r#"{"scheme":"3","b_full":{"PUNCT":0.5}}"#;
        assert!(matches!(
            CalibrationTable::from_json(foreign),
            Err(CalibrationError::ForeignBucket { .. })
        ));
    }
}
