//! Surprisal-driven deletion strategies.
//!
//! Scores attach to word spans. Pure entropy and hybrid deletion remove whole
//! words (plus one adjacent whitespace span) in score order and trim the last
//! word to land on the exact unit budget. The two LP variants reuse the
//! bucket allocator and only change the order of deletion inside word buckets.

mod entropy;
mod entropy_lp;
mod hybrid;
mod surprisal;

use thiserror::Error;

use crate::allocation::AllocationError;

pub use entropy::{entropy_delete, entropy_order, token_deletion_mask};
pub use entropy_lp::{entropy_in_freqbuckets_delete, entropy_lp_delete, tertile_buckets, tertile_profile};
pub use hybrid::{frequency_order, hybrid_delete, hybrid_order, HybridConfig};
pub use surprisal::{
    unigram_surprisal, ExternalProcessSurprisal, SurprisalFile, SurprisalProvider, SurprisalRecord,
    SurprisalScores, UnigramSurprisal, ZIPF_CEILING,
};

#[derive(Debug, Error)]
pub enum SemanticError {
    #[error("cannot read surprisal source: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed surprisal record on line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("no surprisal record for chunk `{0}`")]
    MissingChunk(String),
    #[error("surprisal for chunk `{id}` has {actual} scores, expected {expected} word tokens")]
    Alignment { id: String, expected: usize, actual: usize },
    #[error("surprisal token {index} of chunk `{id}` is `{actual}`, expected `{expected}`")]
    TokenMismatch {
        id: String,
        index: usize,
        expected: String,
        actual: String,
    },
    #[error("surprisal for chunk `{id}` contains {value}; scores must be finite and non-negative")]
    BadScore { id: String, value: f64 },
    #[error("surprisal process failed: {0}")]
    Process(String),
    #[error("hybrid weight {0} outside [0, 1]")]
    BadAlpha(f64),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}
