//! Character- and word-level deletion strategies.
//!
//! Every strategy produces a [`DeletionMask`]; the skeleton is the masked
//! subsequence of the chunk.

mod quota;
mod step;
mod stochastic;
mod wordfreq;
mod wordlen;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frequency::Bucket;
use crate::text::Chunk;

pub use quota::apportion;
pub use step::step_delete;
pub use stochastic::{stochastic_delete, Distribution, StochasticParams};
pub use wordfreq::{delete_by_bucket_quotas, wordfreq_delete};
pub use wordlen::{wordlen_delete, WordLenStage};

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("unknown deletion distribution `{0}`")]
    UnknownDistribution(String),
    #[error("hybrid weight {0} outside [0, 1]")]
    BadAlpha(f64),
    #[error("profile does not match chunk: {0}")]
    ProfileMismatch(String),
}

/// Strategy identifier as used in skeleton records and on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyId {
    Step,
    Gaussian,
    Bernoulli,
    Poisson,
    WordLen,
    WordFreq,
    Opt,
    Entropy,
    EntropyLp,
    EntropyFreqBkt,
    Hybrid(f64),
    Summarize,
}

impl StrategyId {
    /// Whether the strategy keeps exactly `round(r_keep * L)` units.
    pub fn is_exact_rate(&self) -> bool {
        !matches!(self, StrategyId::WordLen | StrategyId::Summarize)
    }

    pub fn produces_skeleton(&self) -> bool {
        !matches!(self, StrategyId::Summarize)
    }

    pub fn is_seeded(&self) -> bool {
        !matches!(self, StrategyId::Step | StrategyId::Summarize)
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StrategyId::Step => "step",
            StrategyId::Gaussian => "gaussian",
            StrategyId::Bernoulli => "bernoulli",
            StrategyId::Poisson => "poisson",
            StrategyId::WordLen => "wordlen",
            StrategyId::WordFreq => "wordfreq",
            StrategyId::Opt => "opt",
            StrategyId::Entropy => "entropy",
            StrategyId::EntropyLp => "entropy_lp",
            StrategyId::EntropyFreqBkt => "entropy_freqbkt",
            StrategyId::Summarize => "summarize",
            StrategyId::Hybrid(a) => return write!(f, "hybrid@{a}"),
        };
        f.write_str(s)
    }
}

impl FromStr for StrategyId {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "step" => StrategyId::Step,
            "gaussian" => StrategyId::Gaussian,
            "bernoulli" => StrategyId::Bernoulli,
            "poisson" => StrategyId::Poisson,
            "wordlen" => StrategyId::WordLen,
            "wordfreq" => StrategyId::WordFreq,
            "opt" => StrategyId::Opt,
            "entropy" => StrategyId::Entropy,
            "entropy_lp" => StrategyId::EntropyLp,
            "entropy_freqbkt" => StrategyId::EntropyFreqBkt,
            "summarize" => StrategyId::Summarize,
            other => {
                let alpha = other
                    .strip_prefix("hybrid@")
                    .ok_or_else(|| StrategyError::UnknownStrategy(other.to_string()))?;
                let a: f64 = alpha
                    .parse()
                    .map_err(|_| StrategyError::UnknownStrategy(other.to_string()))?;
                if !(0.0..=1.0).contains(&a) {
                    return Err(StrategyError::BadAlpha(a));
                }
                StrategyId::Hybrid(a)
            }
        })
    }
}

impl Serialize for StrategyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StrategyId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-unit keep flags produced by a strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct DeletionMask {
    pub keep: Vec<bool>,
    pub strategy: StrategyId,
    pub seed: Option<u64>,
}

impl DeletionMask {
    pub fn identity(len: usize, strategy: StrategyId, seed: Option<u64>) -> Self {
        Self {
            keep: vec![true; len],
            strategy,
            seed,
        }
    }

    pub fn kept(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    pub fn apply(&self, chunk: &Chunk) -> String {
        chunk.masked_text(&self.keep)
    }

    /// Longest run of consecutive deleted units.
    pub fn longest_deletion_run(&self) -> usize {
        let mut best = 0;
        let mut run = 0;
        for &k in &self.keep {
            run = if k { 0 } else { run + 1 };
            best = best.max(run);
        }
        best
    }

    pub fn into_skeleton(self, chunk: &Chunk, r_keep: f64, extra: SkeletonExtra) -> Skeleton {
        Skeleton {
            id: chunk.id().to_string(),
            strategy: self.strategy,
            r_keep,
            seed: self.seed,
            orig_len: chunk.len(),
            skeleton: self.apply(chunk),
            extra,
        }
    }
}

/// Strategy-specific metadata carried with a skeleton.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SkeletonExtra {
    /// Solved per-bucket deletion ratios `w_k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<BTreeMap<Bucket, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Last WordLen stage that deleted anything.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<u8>,
}

impl SkeletonExtra {
    pub fn is_empty(&self) -> bool {
        self.w.is_none() && self.alpha.is_none() && self.stage.is_none()
    }
}

/// Degraded text plus the metadata needed to reconstruct and audit it.
///
/// Serializes to one skeleton JSONL record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub id: String,
    pub strategy: StrategyId,
    pub r_keep: f64,
    pub seed: Option<u64>,
    pub orig_len: usize,
    pub skeleton: String,
    #[serde(default)]
    pub extra: SkeletonExtra,
}

impl Skeleton {
    pub fn kept(&self) -> usize {
        self.skeleton.chars().count()
    }

    pub fn realized_retention(&self) -> f64 {
        self.kept() as f64 / self.orig_len as f64
    }
}
