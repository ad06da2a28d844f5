//! Bucket-level deletion budget allocation.
//!
//! Each bucket `k` holds a fraction `p_k` of the chunk's units. Deleting a
//! share `w_k` of it is modelled as a linear loss in predicted similarity,
//! `B_k(w_k) = 1 - w_k (1 - B_k^full)`. The allocator maximizes
//! `Σ p_k B_k(w_k)` subject to `Σ p_k w_k >= 1 - r_keep`, `0 <= w_k <= 1`.
//! The program is a fractional knapsack: sorting buckets by their marginal
//! cost `1 - B_k^full` and filling them greedily is optimal.

mod calibration;
mod opt;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frequency::{Bucket, BucketProfile};

pub use calibration::{calibrate, CalibrationError, CalibrationTable, Provenance};
pub use opt::{allocate_units, opt_delete, opt_quotas};

#[derive(Debug, Error, PartialEq)]
pub enum AllocationError {
    #[error("deletion ratio {0} outside [0, 1]")]
    RatioOutOfRange(f64),
    #[error("calibration score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("retention rate {0} outside (0, 1]")]
    RetentionOutOfRange(f64),
    #[error("calibration table has no entry for bucket {0}")]
    MissingBucket(Bucket),
    #[error("profile covers {profile} units, chunk has {chunk}")]
    ProfileMismatch { profile: usize, chunk: usize },
}

/// Predicted similarity contribution of a bucket with deletion ratio `w`.
pub fn bucket_score(w: f64, b_full: f64) -> Result<f64, AllocationError> {
    if !(0.0..=1.0).contains(&w) {
        return Err(AllocationError::RatioOutOfRange(w));
    }
    if !(0.0..=1.0).contains(&b_full) {
        return Err(AllocationError::ScoreOutOfRange(b_full));
    }
    Ok(1.0 - w * (1.0 - b_full))
}

/// `Σ p_k B_k(w_k)` without range checks.
pub fn objective(p: &[f64], b_full: &[f64], w: &[f64]) -> f64 {
    p.iter()
        .zip(b_full)
        .zip(w)
        .map(|((p, b), w)| p * (1.0 - w * (1.0 - b)))
        .sum()
}

/// Order in which the greedy fills buckets: ascending `1 - B_k^full`, ties by
/// `tie_rank`, then by index.
pub fn fill_order(b_full: &[f64], tie_rank: &[u8]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..b_full.len()).collect();
    order.sort_by(|&a, &b| {
        (1.0 - b_full[a])
            .total_cmp(&(1.0 - b_full[b]))
            .then(tie_rank[a].cmp(&tie_rank[b]))
            .then(a.cmp(&b))
    });
    order
}

/// Greedy closed-form solution for raw vectors.
///
/// Buckets with `p_k = 0` keep `w_k = 0`. When `r_del >= 1` every non-empty
/// bucket is deleted fully.
pub fn solve_greedy(p: &[f64], b_full: &[f64], tie_rank: &[u8], r_del: f64) -> Vec<f64> {
    let mut w = vec![0.0; p.len()];
    let mut remaining = r_del;
    for k in fill_order(b_full, tie_rank) {
        if remaining <= 0.0 {
            break;
        }
        if p[k] <= 0.0 {
            continue;
        }
        if p[k] <= remaining {
            w[k] = 1.0;
            remaining -= p[k];
        } else {
            w[k] = remaining / p[k];
            remaining = 0.0;
        }
    }
    w
}

/// Solved per-bucket deletion ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationWeights {
    pub buckets: Vec<Bucket>,
    pub w: Vec<f64>,
    /// Predicted score `Σ p_k B_k(w_k)`.
    pub objective: f64,
    pub r_keep: f64,
    /// Greedy fill order (indices into `buckets`).
    pub order: Vec<usize>,
}

impl AllocationWeights {
    pub fn weight(&self, bucket: Bucket) -> Option<f64> {
        self.buckets.iter().position(|&b| b == bucket).map(|k| self.w[k])
    }

    pub fn as_map(&self) -> BTreeMap<Bucket, f64> {
        self.buckets.iter().copied().zip(self.w.iter().copied()).collect()
    }

    /// Number of weights strictly between 0 and 1.
    pub fn fractional_count(&self) -> usize {
        self.w.iter().filter(|&&w| w > 0.0 && w < 1.0).count()
    }
}

/// Solves the allocation for one profile against a calibration table.
pub fn solve_allocation(
    profile: &BucketProfile,
    calib: &CalibrationTable,
    r_keep: f64,
) -> Result<AllocationWeights, AllocationError> {
    if !(r_keep > 0.0 && r_keep <= 1.0) {
        return Err(AllocationError::RetentionOutOfRange(r_keep));
    }
    let buckets = profile.buckets().to_vec();
    let b_full = buckets
        .iter()
        .map(|&b| calib.b_full(b).ok_or(AllocationError::MissingBucket(b)))
        .collect::<Result<Vec<f64>, _>>()?;
    if let Some(&bad) = b_full.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(AllocationError::ScoreOutOfRange(bad));
    }
    let tie: Vec<u8> = buckets.iter().map(|b| b.tie_rank()).collect();
    let p = profile.p();
    let w = solve_greedy(&p, &b_full, &tie, 1.0 - r_keep);
    Ok(AllocationWeights {
        objective: objective(&p, &b_full, &w),
        order: fill_order(&b_full, &tie),
        buckets,
        w,
        r_keep,
    })
}
