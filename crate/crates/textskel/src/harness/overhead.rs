use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::strategies::{Skeleton, StrategyId};

/// Ceiling on transmitted metadata relative to the original bytes.
pub const MAX_METADATA_OVERHEAD: f64 = 0.001;

fn strategy_code(s: StrategyId) -> u8 {
    match s {
        StrategyId::Step => 0,
        StrategyId::Gaussian => 1,
        StrategyId::Bernoulli => 2,
        StrategyId::Poisson => 3,
        StrategyId::WordLen => 4,
        StrategyId::WordFreq => 5,
        StrategyId::Opt => 6,
        StrategyId::Entropy => 7,
        StrategyId::EntropyLp => 8,
        StrategyId::EntropyFreqBkt => 9,
        StrategyId::Hybrid(_) => 10,
        StrategyId::Summarize => 11,
    }
}

/// Compact per-cell header: strategy code, optional α in thousandths,
/// `r_keep` in thousandths, seed.
///
/// The receiver needs nothing per chunk: the original length is estimated as
/// `kept / r_keep`, which the decoder's ±15% window absorbs.
pub fn cell_header(strategy: StrategyId, r_keep: f64, seed: Option<u64>) -> Vec<u8> {
    let mut out = vec![strategy_code(strategy)];
    if let StrategyId::Hybrid(a) = strategy {
        out.extend(((a * 1000.0).round() as u16).to_le_bytes());
    }
    out.extend(((r_keep * 1000.0).round() as u16).to_le_bytes());
    if let Some(seed) = seed {
        out.extend(seed.to_le_bytes());
    }
    out
}

/// Receiver-side estimate of the original length.
pub fn estimate_original_len(kept: usize, r_keep: f64) -> usize {
    ((kept as f64 / r_keep).round() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadAudit {
    pub strategy: StrategyId,
    pub r_keep: f64,
    pub chunks: usize,
    pub header_bytes: usize,
    /// Original units, a lower bound on original bytes.
    pub original_bytes: usize,
    /// `header_bytes / original_bytes`.
    pub fraction: f64,
}

impl OverheadAudit {
    pub fn within_budget(&self) -> bool {
        self.fraction <= MAX_METADATA_OVERHEAD
    }
}

/// Transmitted-metadata overhead per (strategy, r_keep) cell.
pub fn metadata_overhead(skeletons: &[Skeleton]) -> Vec<OverheadAudit> {
    let mut cells: BTreeMap<(String, u64), Vec<&Skeleton>> = BTreeMap::new();
    for s in skeletons {
        cells
            .entry((s.strategy.to_string(), u64::MAX - s.r_keep.to_bits()))
            .or_default()
            .push(s);
    }
    cells
        .into_values()
        .map(|rows| {
            let first = rows[0];
            let header = cell_header(first.strategy, first.r_keep, first.seed).len();
            // units never exceed UTF-8 bytes, so this fraction is an upper bound
            let original: usize = rows.iter().map(|s| s.orig_len).sum();
            OverheadAudit {
                strategy: first.strategy,
                r_keep: first.r_keep,
                chunks: rows.len(),
                header_bytes: header,
                original_bytes: original,
                fraction: header as f64 / original as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::SkeletonExtra;

    #[test]
    fn header_sizes() {
        assert_eq!(cell_header(StrategyId::Step, 0.5, None).len(), 3);
        assert_eq!(cell_header(StrategyId::Opt, 0.5, Some(1)).len(), 11);
        assert_eq!(cell_header(StrategyId::Hybrid(0.3), 0.5, Some(1)).len(), 13);
    }

    #[test]
    fn length_estimate_within_window() {
        for len in 50..=512usize {
            for r in [0.1, 0.3, 0.5, 0.9] {
                let kept = crate::text::round_half_up(r, len).max(1);
                let est = estimate_original_len(kept, r);
                assert!(crate::decoder::within_window(len, est), "len {len} r {r} est {est}");
            }
        }
    }

    #[test]
    fn amortized_over_cell() {
        let sk = |id: &str| Skeleton {
            id: id.into(),
            strategy: StrategyId::WordFreq,
            r_keep: 0.5,
            seed: Some(3),
            orig_len: 512,
            skeleton: "x".repeat(256),
            extra: SkeletonExtra::default(),
        };
        let one = metadata_overhead(&[sk("a")]);
        assert!(!one[0].within_budget());
        let many: Vec<Skeleton> = (0..40).map(|i| sk(&i.to_string())).collect();
        let audit = metadata_overhead(&many);
        assert_eq!(audit.len(), 1);
        assert_eq!(audit[0].original_bytes, 40 * 512);
        assert!(audit[0].within_budget());
    }
}
