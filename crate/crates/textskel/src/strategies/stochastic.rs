use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution as _, Exp1, StandardNormal};

use crate::rng::chunk_rng;
use crate::strategies::{DeletionMask, StrategyError, StrategyId};
use crate::text::{Chunk, RetentionBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distribution {
    Gaussian,
    Bernoulli,
    Poisson,
}

impl Distribution {
    pub fn strategy(self) -> StrategyId {
        match self {
            Distribution::Gaussian => StrategyId::Gaussian,
            Distribution::Bernoulli => StrategyId::Bernoulli,
            Distribution::Poisson => StrategyId::Poisson,
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.strategy().fmt(f)
    }
}

impl FromStr for Distribution {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Distribution::Gaussian),
            "bernoulli" => Ok(Distribution::Bernoulli),
            "poisson" => Ok(Distribution::Poisson),
            other => Err(StrategyError::UnknownDistribution(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticParams {
    /// Standard deviation of the Gaussian jitter, in units of the mean
    /// spacing between deletions.
    pub gaussian_sigma: f64,
}

impl Default for StochasticParams {
    fn default() -> Self {
        Self { gaussian_sigma: 0.5 }
    }
}

/// Random character deletion with an exact deletion count.
///
/// * gaussian: one deletion per evenly spaced slot, jittered by normal noise;
/// * bernoulli: a uniformly random subset of positions;
/// * poisson: positions from a Poisson process (exponential gaps) rescaled
///   to the chunk.
///
/// Sampled positions that collide are moved to the nearest kept unit, so the
/// mask always deletes exactly `L - round(r_keep * L)` units.
pub fn stochastic_delete(
    chunk: &Chunk,
    budget: &RetentionBudget,
    dist: Distribution,
    seed: u64,
    params: &StochasticParams,
) -> DeletionMask {
    let strategy = dist.strategy();
    let len = chunk.len();
    let deletions = budget.deletions(len);
    let mut keep = vec![true; len];
    if deletions == 0 {
        return DeletionMask {
            keep,
            strategy,
            seed: Some(seed),
        };
    }
    let mut rng = chunk_rng(seed, &strategy.to_string(), chunk.id());
    match dist {
        Distribution::Bernoulli => {
            for i in index::sample(&mut rng, len, deletions) {
                keep[i] = false;
            }
        }
        Distribution::Gaussian => {
            let spacing = len as f64 / deletions as f64;
            for j in 0..deletions {
                let noise: f64 = rng.sample(StandardNormal);
                let x = (j as f64 + 0.5) * spacing + noise * params.gaussian_sigma * spacing;
                delete_nearest(&mut keep, x);
            }
        }
        Distribution::Poisson => {
            let gaps: Vec<f64> = (0..=deletions).map(|_| Exp1.sample(&mut rng)).collect();
            let total: f64 = gaps.iter().sum();
            let mut acc = 0.0;
            for g in &gaps[..deletions] {
                acc += g;
                delete_nearest(&mut keep, acc / total * len as f64);
            }
        }
    }
    DeletionMask {
        keep,
        strategy,
        seed: Some(seed),
    }
}

/// Deletes the kept unit closest to real position `x` (ties go left).
fn delete_nearest(keep: &mut [bool], x: f64) {
    let len = keep.len();
    let centre = (x.floor().max(0.0) as usize).min(len - 1);
    for d in 0..len {
        if centre >= d && keep[centre - d] {
            keep[centre - d] = false;
            return;
        }
        if centre + d < len && keep[centre + d] {
            keep[centre + d] = false;
            return;
        }
    }
    unreachable!("no kept unit left to delete");
}
