use std::collections::BTreeMap;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::metrics::MetricReport;

/// Normal quantile for a two-sided 95% interval.
pub const Z_95: f64 = 1.96;

/// `mean ± 1.96 · s / √n`.
pub fn confidence_interval(mean: f64, std: f64, n: usize) -> (f64, f64) {
    let half = Z_95 * std / (n as f64).sqrt();
    (mean - half, mean + half)
}

/// Summary statistics of one metric in one (strategy, r_keep) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub strategy: String,
    pub r_keep: f64,
    pub metric: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CellSummary {
    pub fn from_values(strategy: &str, r_keep: f64, metric: &str, values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let (ci_low, ci_high) = confidence_interval(mean, std, n);
        Some(Self {
            strategy: strategy.to_string(),
            r_keep,
            metric: metric.to_string(),
            n,
            mean,
            std,
            ci_low,
            ci_high,
        })
    }
}

pub const METRICS: [&str; 5] = ["cer", "rouge_l_f", "entity_pres", "retention", "sim"];

fn metric_value(r: &MetricReport, metric: &str) -> Option<f64> {
    match metric {
        "cer" => Some(r.cer),
        "rouge_l_f" => Some(r.rouge_l_f),
        "entity_pres" => r.entity_pres,
        "retention" => Some(r.retention),
        "sim" => r.sim,
        _ => None,
    }
}

/// Per-cell summaries for every metric.
///
/// Values are reduced in chunk-id order, so the result does not depend on the
/// order reports arrive in. Cells are ordered by strategy name, then by
/// descending `r_keep`.
pub fn aggregate(reports: &[MetricReport]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<(String, u64), Vec<&MetricReport>> = BTreeMap::new();
    for r in reports {
        // descending r_keep via inverted bit key (r_keep is positive)
        let key = (r.strategy.to_string(), u64::MAX - r.r_keep.to_bits());
        cells.entry(key).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((strategy, _), mut rows) in cells {
        rows.sort_by(|a, b| a.chunk_id.cmp(&b.chunk_id));
        let r_keep = rows[0].r_keep;
        for metric in METRICS {
            let values: Vec<f64> = rows.iter().filter_map(|r| metric_value(r, metric)).collect();
            match CellSummary::from_values(&strategy, r_keep, metric, &values) {
                Some(s) => out.push(s),
                None if metric == "entity_pres" || metric == "sim" => {}
                None => warn!("empty cell {strategy} @ {r_keep} for {metric}"),
            }
        }
    }
    out
}
