//! Sweep orchestration, encoder timing, lossless comparison and reporting.

mod config;
mod encode;
mod latency;
mod lossless;
mod overhead;
pub mod report;
mod sweep;

use thiserror::Error;

use crate::allocation::CalibrationError;
use crate::corpus::CorpusError;
use crate::decoder::DecoderError;
use crate::frequency::FrequencyError;
use crate::metrics::SimilarityError;
use crate::semantic::SemanticError;
use crate::strategies::StrategyId;

pub use config::{config_hash, parse_r_grid, SimilaritySource, SurprisalSource, SweepConfig, DEFAULT_R_GRID};
pub use encode::{encode, encode_prepared, needs_scores, EncodeError, EncoderContext, PreparedChunk};
pub use latency::{latency_stats, measure_encoder_latency, LatencyPlan, LatencyStats};
pub use lossless::{
    cascaded_ratio, checked_size, lossless_baseline, CascadeRow, LosslessCodec, LosslessReport, LosslessRow,
    ZlibCodec,
};
pub use overhead::{
    cell_header, estimate_original_len, metadata_overhead, OverheadAudit, MAX_METADATA_OVERHEAD,
};
pub use report::emit_report;
pub use sweep::{
    check_startup, read_metrics, read_skeletons, run_sweep, write_metrics, DecoderOptions, ExcludedCell,
    ReconstructionRecord, Resources, RunRecord, SweepOutcome, METRICS_FILE, RECONSTRUCTIONS_FILE, RUN_FILE,
    SKELETONS_FILE, SUMMARY_FILE,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Startup(EncodeError),
    #[error("{strategy} failed on chunk `{chunk}`: {source}")]
    Encode {
        strategy: StrategyId,
        chunk: String,
        #[source]
        source: EncodeError,
    },
    #[error("codec {codec} did not round-trip chunk `{id}`")]
    CodecIntegrity { codec: String, id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Frequency(#[from] FrequencyError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}
