use crate::strategies::{DeletionMask, StrategyId};
use crate::text::{Chunk, RetentionBudget};

/// Fixed-step character deletion.
///
/// Keeps `K = round(r_keep * L)` units at positions `floor(j * L / K)`. The
/// strides between kept units take only the two values `floor(L/K)` and
/// `ceil(L/K)`, interleaved evenly, and position 0 is always kept.
pub fn step_delete(chunk: &Chunk, budget: &RetentionBudget) -> DeletionMask {
    let len = chunk.len();
    let target = budget.target(len);
    if target == len {
        return DeletionMask::identity(len, StrategyId::Step, None);
    }
    let mut keep = vec![false; len];
    for j in 0..target {
        keep[j * len / target] = true;
    }
    DeletionMask {
        keep,
        strategy: StrategyId::Step,
        seed: None,
    }
}
