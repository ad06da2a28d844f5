use serde::{Deserialize, Serialize};

use crate::frequency::FrequencyTable;
use crate::semantic::{entropy_order, token_deletion_mask, SemanticError, SurprisalScores};
use crate::strategies::{DeletionMask, Skeleton, SkeletonExtra, StrategyId};
use crate::text::{word_spans, Chunk, RetentionBudget, TokenSpan};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    alpha: f64,
}

impl HybridConfig {
    pub const SWEEP: [f64; 3] = [0.3, 0.5, 0.7];

    pub fn new(alpha: f64) -> Result<Self, SemanticError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(SemanticError::BadAlpha(alpha));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Word indices from most to least frequent; ties keep the earlier word first.
pub fn frequency_order(zipf: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..zipf.len()).collect();
    order.sort_by(|&a, &b| zipf[b].total_cmp(&zipf[a]).then(a.cmp(&b)));
    order
}

fn normalized_ranks(order: &[usize]) -> Vec<f64> {
    let n = order.len();
    let mut norm = vec![0.0; n];
    if n > 1 {
        for (rank, &i) in order.iter().enumerate() {
            norm[i] = rank as f64 / (n - 1) as f64;
        }
    }
    norm
}

/// Deletion order by `α · freq_rank + (1 - α) · surprisal_rank`, ranks
/// normalized to `[0, 1]`; lowest combined score first, ties positional.
pub fn hybrid_order(zipf: &[f64], surprisal: &[f64], alpha: f64) -> Vec<usize> {
    assert_eq!(zipf.len(), surprisal.len());
    let f = normalized_ranks(&frequency_order(zipf));
    let s = normalized_ranks(&entropy_order(surprisal));
    let combined: Vec<f64> = f.iter().zip(&s).map(|(f, s)| alpha * f + (1.0 - alpha) * s).collect();
    let mut order: Vec<usize> = (0..combined.len()).collect();
    order.sort_by(|&a, &b| combined[a].total_cmp(&combined[b]).then(a.cmp(&b)));
    order
}

/// Interpolates frequency and surprisal rankings, then deletes whole words.
pub fn hybrid_delete(
    chunk: &Chunk,
    spans: &[TokenSpan],
    budget: &RetentionBudget,
    scores: &SurprisalScores,
    table: &FrequencyTable,
    cfg: HybridConfig,
    seed: u64,
) -> Result<Skeleton, SemanticError> {
    scores.check(chunk, spans)?;
    let zipf: Vec<f64> = word_spans(spans)
        .map(|s| table.zipf_or_zero(&s.text(chunk.units())))
        .collect();
    let order = hybrid_order(&zipf, scores.scores(), cfg.alpha);
    let mask = DeletionMask {
        keep: token_deletion_mask(chunk.len(), spans, &order, budget.deletions(chunk.len())),
        strategy: StrategyId::Hybrid(cfg.alpha),
        seed: Some(seed),
    };
    let extra = SkeletonExtra {
        alpha: Some(cfg.alpha),
        ..SkeletonExtra::default()
    };
    Ok(mask.into_skeleton(chunk, budget.r_keep(), extra))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    #[test]
    fn interpolation_example() {
        // freq_norm [0, 0.5, 1], surp_norm [1, 0, 0.5]
        let zipf = [7.0, 5.0, 3.0];
        let surprisal = [9.0, 1.0, 4.0];
        assert_eq!(hybrid_order(&zipf, &surprisal, 0.5), vec![1, 0, 2]);
    }

    #[test]
    fn boundary_reductions() {
        let zipf = [3.0, 6.5, 6.5, 1.0, 4.2];
        let surprisal = [2.0, 0.3, 7.0, 0.3, 1.1];
        assert_eq!(hybrid_order(&zipf, &surprisal, 1.0), frequency_order(&zipf));
        assert_eq!(hybrid_order(&zipf, &surprisal, 0.0), entropy_order(&surprisal));
        assert_eq!(frequency_order(&zipf), vec![1, 2, 4, 0, 3]);
    }

    #[test]
    fn single_word_has_zero_rank() {
        assert_eq!(normalized_ranks(&[0]), vec![0.0]);
    }

    #[test]
    fn alpha_range_checked() {
        assert!(HybridConfig::new(1.2).is_err());
        assert!(HybridConfig::new(0.0).is_ok());
    }

    #[test]
    fn records_alpha_and_meets_budget() {
        let c = Chunk::english("h", "the storm hit the northern coast overnight").unwrap();
        let spans = tokenize(&c);
        let table = FrequencyTable::from_pairs([("the", 7.7), ("hit", 5.0), ("coast", 4.4)]);
        let s = SurprisalScores::new(&c, &spans, vec![0.5, 6.0, 3.0, 0.4, 5.5, 4.0, 7.0]).unwrap();
        for r in [0.2, 0.5, 0.9] {
            let budget = RetentionBudget::new(r).unwrap();
            let sk = hybrid_delete(&c, &spans, &budget, &s, &table, HybridConfig::new(0.3).unwrap(), 1).unwrap();
            assert_eq!(sk.kept(), budget.target(c.len()));
            assert_eq!(sk.extra.alpha, Some(0.3));
            assert_eq!(sk.strategy, StrategyId::Hybrid(0.3));
        }
    }
}
