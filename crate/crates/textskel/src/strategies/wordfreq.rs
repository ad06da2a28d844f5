use rand::seq::index;
use rand::Rng;

use crate::frequency::{Bucket, BucketProfile};
use crate::rng::chunk_rng;
use crate::strategies::{apportion, DeletionMask, StrategyError, StrategyId};
use crate::text::{Chunk, RetentionBudget, TokenSpan};

/// Proportional-quota deletion over frequency classes.
///
/// The deletion total `D = L - round(r_keep L)` is split across the profile's
/// classes by largest remainder of `D * p_k`; each class then loses its quota
/// of units chosen uniformly at random.
pub fn wordfreq_delete(
    chunk: &Chunk,
    spans: &[TokenSpan],
    budget: &RetentionBudget,
    profile: &BucketProfile,
    seed: u64,
) -> Result<DeletionMask, StrategyError> {
    let len = chunk.len();
    check_profile(profile, len)?;
    let deletions = budget.deletions(len);
    let quotas: Vec<f64> = profile
        .counts()
        .iter()
        .map(|&c| (deletions * c) as f64 / len as f64)
        .collect();
    let order: Vec<usize> = (0..quotas.len()).collect();
    let parts = apportion(&quotas, profile.counts(), deletions, &order);
    let mut rng = chunk_rng(seed, "wordfreq", chunk.id());
    let keep = delete_by_bucket_quotas(
        &profile.unit_buckets(spans),
        profile.buckets(),
        &parts,
        &mut rng,
    );
    Ok(DeletionMask {
        keep,
        strategy: StrategyId::WordFreq,
        seed: Some(seed),
    })
}

pub(crate) fn check_profile(profile: &BucketProfile, len: usize) -> Result<(), StrategyError> {
    if profile.len() != len {
        return Err(StrategyError::ProfileMismatch(format!(
            "profile covers {} units, chunk has {len}",
            profile.len()
        )));
    }
    Ok(())
}

/// Deletes `parts[k]` uniformly chosen units from each bucket.
pub fn delete_by_bucket_quotas<R: Rng>(
    unit_buckets: &[Bucket],
    buckets: &[Bucket],
    parts: &[usize],
    rng: &mut R,
) -> Vec<bool> {
    let mut keep = vec![true; unit_buckets.len()];
    for (&bucket, &quota) in buckets.iter().zip(parts) {
        if quota == 0 {
            continue;
        }
        let members: Vec<usize> = unit_buckets
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == bucket).then_some(i))
            .collect();
        assert!(
            quota <= members.len(),
            "quota {quota} exceeds {} units in bucket {bucket}",
            members.len()
        );
        for pick in index::sample(rng, members.len(), quota) {
            keep[members[pick]] = false;
        }
    }
    keep
}
