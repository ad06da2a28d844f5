use crate::allocation::{solve_allocation, AllocationError, AllocationWeights, CalibrationTable};
use crate::frequency::BucketProfile;
use crate::rng::chunk_rng;
use crate::strategies::{apportion, delete_by_bucket_quotas, DeletionMask, Skeleton, SkeletonExtra, StrategyId};
use crate::text::{Chunk, RetentionBudget, TokenSpan};

/// Integer per-bucket deletion counts summing to exactly `total`.
///
/// Quotas `w_k · count_k` are apportioned by largest remainder, capped at each
/// bucket's size; remainder ties and overflow follow the greedy fill order.
pub fn allocate_units(weights: &AllocationWeights, profile: &BucketProfile, total: usize) -> Vec<usize> {
    let quotas: Vec<f64> = weights
        .w
        .iter()
        .zip(profile.counts())
        .map(|(w, &c)| w * c as f64)
        .collect();
    apportion(&quotas, profile.counts(), total, &weights.order)
}

/// Solves the chunk's allocation and converts it to exact unit quotas.
pub fn opt_quotas(
    len: usize,
    budget: &RetentionBudget,
    profile: &BucketProfile,
    calib: &CalibrationTable,
) -> Result<(AllocationWeights, Vec<usize>), AllocationError> {
    if profile.len() != len {
        return Err(AllocationError::ProfileMismatch {
            profile: profile.len(),
            chunk: len,
        });
    }
    let weights = solve_allocation(profile, calib, budget.r_keep())?;
    let parts = allocate_units(&weights, profile, budget.deletions(len));
    Ok((weights, parts))
}

/// LP-allocated deletion: solved quotas per bucket, uniform sampling within.
pub fn opt_delete(
    chunk: &Chunk,
    spans: &[TokenSpan],
    budget: &RetentionBudget,
    profile: &BucketProfile,
    calib: &CalibrationTable,
    seed: u64,
) -> Result<Skeleton, AllocationError> {
    let (weights, parts) = opt_quotas(chunk.len(), budget, profile, calib)?;
    let mut rng = chunk_rng(seed, "opt", chunk.id());
    let keep = delete_by_bucket_quotas(&profile.unit_buckets(spans), profile.buckets(), &parts, &mut rng);
    let mask = DeletionMask {
        keep,
        strategy: StrategyId::Opt,
        seed: Some(seed),
    };
    let extra = SkeletonExtra {
        w: Some(weights.as_map()),
        ..SkeletonExtra::default()
    };
    Ok(mask.into_skeleton(chunk, budget.r_keep(), extra))
}
