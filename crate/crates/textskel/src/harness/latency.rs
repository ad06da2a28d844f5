use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::harness::{encode, EncoderContext, HarnessError};
use crate::strategies::StrategyId;
use crate::text::Chunk;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub strategy: StrategyId,
    pub iterations: usize,
    pub median_ms: f64,
    pub p95_ms: f64,
}

/// Median (mean of the middle pair for even counts) and nearest-rank p95.
pub fn latency_stats(strategy: StrategyId, samples_ms: &[f64]) -> Option<LatencyStats> {
    if samples_ms.is_empty() {
        return None;
    }
    let mut s = samples_ms.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let median = if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    };
    let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
    Some(LatencyStats {
        strategy,
        iterations: n,
        median_ms: median,
        p95_ms: s[rank - 1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyPlan {
    pub r_keep: f64,
    pub seed: u64,
    pub warmup: usize,
    pub iterations: usize,
}

impl Default for LatencyPlan {
    fn default() -> Self {
        Self {
            r_keep: 0.5,
            seed: 0,
            warmup: 100,
            iterations: 1000,
        }
    }
}

/// Wall-clock cost of the full encoder path (tokenize, bucket, score,
/// delete), cycling through `chunks`, single-threaded.
pub fn measure_encoder_latency(
    chunks: &[Chunk],
    strategies: &[StrategyId],
    ctx: &EncoderContext,
    plan: LatencyPlan,
) -> Result<Vec<LatencyStats>, HarnessError> {
    if strategies.is_empty() {
        return Err(HarnessError::Config("no strategies to time".into()));
    }
    if chunks.is_empty() {
        return Err(HarnessError::Config("no chunks to time".into()));
    }
    let mut out = Vec::new();
    for &strategy in strategies {
        ctx.require(strategy).map_err(HarnessError::Startup)?;
        let mut run = |i: usize| -> Result<f64, HarnessError> {
            let chunk = &chunks[i % chunks.len()];
            let t = Instant::now();
            let sk = encode(chunk, strategy, plan.r_keep, plan.seed, ctx).map_err(|e| HarnessError::Encode {
                strategy,
                chunk: chunk.id().to_string(),
                source: e,
            })?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            std::hint::black_box(sk);
            Ok(ms)
        };
        for i in 0..plan.warmup {
            run(i)?;
        }
        let samples = (0..plan.iterations).map(&mut run).collect::<Result<Vec<f64>, _>>()?;
        out.extend(latency_stats(strategy, &samples));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_statistics() {
        let s = latency_stats(StrategyId::Step, &[5.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.median_ms, 3.0);
        assert_eq!(s.p95_ms, 5.0);
        let s = latency_stats(StrategyId::Step, &[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.median_ms, 2.5);
        let hundred: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(latency_stats(StrategyId::Step, &hundred).unwrap().p95_ms, 95.0);
        assert!(latency_stats(StrategyId::Step, &[]).is_none());
    }

    #[test]
    fn empty_strategy_list_is_an_error() {
        let c = vec![Chunk::english("a", "abc").unwrap()];
        assert!(measure_encoder_latency(&c, &[], &EncoderContext::default(), LatencyPlan::default()).is_err());
    }

    #[test]
    fn runs_requested_iterations() {
        let c = vec![Chunk::english("a", "some text here").unwrap()];
        let plan = LatencyPlan {
            warmup: 2,
            iterations: 25,
            ..LatencyPlan::default()
        };
        let rows = measure_encoder_latency(&c, &[StrategyId::Step], &EncoderContext::default(), plan).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].iterations, 25);
        assert!(rows[0].median_ms <= rows[0].p95_ms);
    }
}
