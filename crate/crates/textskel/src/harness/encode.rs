use std::sync::Arc;

use thiserror::Error;

use crate::allocation::{opt_delete, AllocationError, CalibrationTable};
use crate::frequency::{classify, BucketProfile, BucketScheme, FrequencyTable, SchemeMode};
use crate::semantic::{
    entropy_delete, entropy_in_freqbuckets_delete, entropy_lp_delete, hybrid_delete, HybridConfig,
    SemanticError, SurprisalProvider, SurprisalScores,
};
use crate::strategies::{
    step_delete, stochastic_delete, wordfreq_delete, wordlen_delete, Distribution, Skeleton, SkeletonExtra,
    StochasticParams, StrategyError, StrategyId,
};
use crate::text::{tokenize, BudgetError, Chunk, RetentionBudget, TokenSpan};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("strategy {strategy} needs {flag}")]
    MissingPrerequisite { strategy: StrategyId, flag: &'static str },
    #[error("strategy {0} has no skeleton; it runs through the decoder")]
    NotAnEncoder(StrategyId),
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

/// Shared resources the strategies draw on.
#[derive(Clone, Default)]
pub struct EncoderContext {
    pub table: Option<FrequencyTable>,
    /// Bucket scheme for the LP strategies (`opt`, `entropy_freqbkt`).
    pub lp_mode: Option<SchemeMode>,
    pub calibration: Option<CalibrationTable>,
    pub tertile_calibration: Option<CalibrationTable>,
    pub surprisal: Option<Arc<dyn SurprisalProvider>>,
    pub stochastic: StochasticParams,
}

impl EncoderContext {
    pub fn lp_mode(&self) -> SchemeMode {
        self.lp_mode.unwrap_or(SchemeMode::SixClass)
    }

    /// Startup check: fails with the flag that supplies the first missing
    /// resource.
    pub fn require(&self, strategy: StrategyId) -> Result<(), EncodeError> {
        let missing = |flag| Err(EncodeError::MissingPrerequisite { strategy, flag });
        let needs_table = matches!(
            strategy,
            StrategyId::WordFreq | StrategyId::Opt | StrategyId::EntropyFreqBkt | StrategyId::Hybrid(_)
        );
        let needs_scores = matches!(
            strategy,
            StrategyId::Entropy | StrategyId::EntropyLp | StrategyId::EntropyFreqBkt | StrategyId::Hybrid(_)
        );
        if needs_table && self.table.is_none() {
            return missing("--freq-table");
        }
        if matches!(strategy, StrategyId::Opt | StrategyId::EntropyFreqBkt) && self.calibration.is_none() {
            return missing("--calibration");
        }
        if strategy == StrategyId::EntropyLp && self.tertile_calibration.is_none() {
            return missing("--tertile-calibration");
        }
        if needs_scores && self.surprisal.is_none() {
            return missing("--surprisal-file, --surprisal-cmd or --surprisal-fallback");
        }
        Ok(())
    }
}

/// Per-chunk analysis shared across strategies and rates.
pub struct PreparedChunk<'a> {
    pub chunk: &'a Chunk,
    pub spans: Vec<TokenSpan>,
    three_class: Option<BucketProfile>,
    lp_profile: Option<BucketProfile>,
    scores: Option<SurprisalScores>,
}

impl<'a> PreparedChunk<'a> {
    /// Tokenizes and, where the context allows, buckets and scores the chunk.
    pub fn new(chunk: &'a Chunk, ctx: &EncoderContext, with_scores: bool) -> Result<Self, EncodeError> {
        let spans = tokenize(chunk);
        let (three_class, lp_profile) = match &ctx.table {
            Some(table) => (
                Some(classify(chunk, &spans, table, &BucketScheme::three_class())),
                // tertile profiles come from surprisal, not the table
                (ctx.lp_mode() != SchemeMode::Tertile)
                    .then(|| classify(chunk, &spans, table, &BucketScheme::new(ctx.lp_mode()))),
            ),
            None => (None, None),
        };
        let scores = match (&ctx.surprisal, with_scores) {
            (Some(p), true) => Some(p.scores(chunk, &spans)?),
            _ => None,
        };
        Ok(Self {
            chunk,
            spans,
            three_class,
            lp_profile,
            scores,
        })
    }

    pub fn scores(&self) -> Option<&SurprisalScores> {
        self.scores.as_ref()
    }
}

fn need<'b, T>(value: Option<&'b T>, strategy: StrategyId, flag: &'static str) -> Result<&'b T, EncodeError> {
    value.ok_or(EncodeError::MissingPrerequisite { strategy, flag })
}

const SCORES_FLAG: &str = "--surprisal-file, --surprisal-cmd or --surprisal-fallback";

/// Runs one strategy on a prepared chunk.
pub fn encode_prepared(
    p: &PreparedChunk<'_>,
    strategy: StrategyId,
    r_keep: f64,
    seed: u64,
    ctx: &EncoderContext,
) -> Result<Skeleton, EncodeError> {
    let chunk = p.chunk;
    let budget = RetentionBudget::new(r_keep)?;
    let plain = |mask: crate::strategies::DeletionMask| mask.into_skeleton(chunk, r_keep, SkeletonExtra::default());
    let skeleton = match strategy {
        StrategyId::Step => plain(step_delete(chunk, &budget)),
        StrategyId::Gaussian | StrategyId::Bernoulli | StrategyId::Poisson => {
            let dist = match strategy {
                StrategyId::Gaussian => Distribution::Gaussian,
                StrategyId::Bernoulli => Distribution::Bernoulli,
                _ => Distribution::Poisson,
            };
            plain(stochastic_delete(chunk, &budget, dist, seed, &ctx.stochastic))
        }
        StrategyId::WordLen => {
            let (mask, stage) = wordlen_delete(chunk, &budget, seed);
            let extra = SkeletonExtra {
                stage: stage.map(|s| s as u8),
                ..SkeletonExtra::default()
            };
            mask.into_skeleton(chunk, r_keep, extra)
        }
        StrategyId::WordFreq => {
            let profile = need(p.three_class.as_ref(), strategy, "--freq-table")?;
            plain(wordfreq_delete(chunk, &p.spans, &budget, profile, seed)?)
        }
        StrategyId::Opt => {
            let profile = need(p.lp_profile.as_ref(), strategy, "--freq-table")?;
            let calib = need(ctx.calibration.as_ref(), strategy, "--calibration")?;
            opt_delete(chunk, &p.spans, &budget, profile, calib, seed)?
        }
        StrategyId::Entropy => {
            let scores = need(p.scores.as_ref(), strategy, SCORES_FLAG)?;
            plain(entropy_delete(chunk, &p.spans, &budget, scores, seed)?)
        }
        StrategyId::EntropyLp => {
            let scores = need(p.scores.as_ref(), strategy, SCORES_FLAG)?;
            let calib = need(ctx.tertile_calibration.as_ref(), strategy, "--tertile-calibration")?;
            entropy_lp_delete(chunk, &p.spans, &budget, scores, calib, seed)?
        }
        StrategyId::EntropyFreqBkt => {
            let scores = need(p.scores.as_ref(), strategy, SCORES_FLAG)?;
            let profile = need(p.lp_profile.as_ref(), strategy, "--freq-table")?;
            let calib = need(ctx.calibration.as_ref(), strategy, "--calibration")?;
            entropy_in_freqbuckets_delete(chunk, &p.spans, &budget, scores, profile, calib, seed)?
        }
        StrategyId::Hybrid(alpha) => {
            let scores = need(p.scores.as_ref(), strategy, SCORES_FLAG)?;
            let table = need(ctx.table.as_ref(), strategy, "--freq-table")?;
            let cfg = HybridConfig::new(alpha)?;
            hybrid_delete(chunk, &p.spans, &budget, scores, table, cfg, seed)?
        }
        StrategyId::Summarize => return Err(EncodeError::NotAnEncoder(strategy)),
    };
    Ok(skeleton)
}

/// Full encoder path for one chunk: tokenization, bucketing, scoring and
/// deletion.
pub fn encode(
    chunk: &Chunk,
    strategy: StrategyId,
    r_keep: f64,
    seed: u64,
    ctx: &EncoderContext,
) -> Result<Skeleton, EncodeError> {
    let p = PreparedChunk::new(chunk, ctx, needs_scores(strategy))?;
    encode_prepared(&p, strategy, r_keep, seed, ctx)
}

pub fn needs_scores(strategy: StrategyId) -> bool {
    matches!(
        strategy,
        StrategyId::Entropy | StrategyId::EntropyLp | StrategyId::EntropyFreqBkt | StrategyId::Hybrid(_)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::Bucket;
    use crate::semantic::UnigramSurprisal;

    fn full_context() -> EncoderContext {
        let table = FrequencyTable::from_pairs([("the", 7.7), ("a", 7.4), ("market", 4.9), ("rose", 4.3)]);
        let six = SchemeMode::SixClass.buckets().iter().map(|&b| (b, 0.5));
        let tert = SchemeMode::Tertile.buckets().iter().map(|&b| (b, 0.5));
        EncoderContext {
            surprisal: Some(Arc::new(UnigramSurprisal::new(table.clone()))),
            table: Some(table),
            lp_mode: None,
            calibration: Some(CalibrationTable::from_pairs(SchemeMode::SixClass, six)),
            tertile_calibration: Some(CalibrationTable::from_pairs(SchemeMode::Tertile, tert)),
            stochastic: StochasticParams::default(),
        }
    }

    #[test]
    fn every_strategy_dispatches() {
        let ctx = full_context();
        let chunk = Chunk::english("d", "The market rose 3% on a quiet Tuesday, traders said.").unwrap();
        for name in [
            "step", "gaussian", "bernoulli", "poisson", "wordlen", "wordfreq", "opt", "entropy",
            "entropy_lp", "entropy_freqbkt", "hybrid@0.5",
        ] {
            let s: StrategyId = name.parse().unwrap();
            ctx.require(s).unwrap();
            let sk = encode(&chunk, s, 0.5, 11, &ctx).unwrap();
            assert_eq!(sk.strategy, s);
            assert_eq!(sk.orig_len, chunk.len());
        }
        assert!(matches!(
            encode(&chunk, StrategyId::Summarize, 0.5, 1, &ctx),
            Err(EncodeError::NotAnEncoder(_))
        ));
    }

    #[test]
    fn missing_resources_name_the_flag() {
        let ctx = EncoderContext::default();
        let err = ctx.require(StrategyId::Opt).unwrap_err();
        assert_eq!(err.to_string(), "strategy opt needs --freq-table");
        let mut ctx = full_context();
        ctx.calibration = None;
        assert!(ctx.require(StrategyId::Opt).unwrap_err().to_string().contains("--calibration"));
        ctx.tertile_calibration = None;
        assert!(ctx
            .require(StrategyId::EntropyLp)
            .unwrap_err()
            .to_string()
            .contains("--tertile-calibration"));
        ctx.surprisal = None;
        assert!(ctx.require(StrategyId::Entropy).unwrap_err().to_string().contains("--surprisal"));
        assert!(EncoderContext::default().require(StrategyId::Step).is_ok());
    }

    #[test]
    fn lp_mode_switches_profile() {
        let mut ctx = full_context();
        ctx.lp_mode = Some(SchemeMode::ThreeClass);
        ctx.calibration = Some(CalibrationTable::from_pairs(
            SchemeMode::ThreeClass,
            [(Bucket::Low, 0.3), (Bucket::Mid, 0.6), (Bucket::High, 0.9)],
        ));
        let chunk = Chunk::english("d", "the market rose").unwrap();
        let sk = encode(&chunk, StrategyId::Opt, 0.6, 1, &ctx).unwrap();
        assert_eq!(sk.extra.w.unwrap().len(), 3);
    }
}
