use rand::seq::index;
use rand::Rng;

use crate::allocation::{opt_quotas, CalibrationTable};
use crate::frequency::{Bucket, BucketProfile, SchemeMode};
use crate::rng::chunk_rng;
use crate::semantic::{entropy_order, SemanticError, SurprisalScores};
use crate::strategies::{DeletionMask, Skeleton, SkeletonExtra, StrategyId};
use crate::text::{Chunk, RetentionBudget, SpanKind, TokenSpan};

/// Per-chunk surprisal tertile of each word.
///
/// With `q1`, `q2` the scores at sorted ranks `⌊n/3⌋` and `⌊2n/3⌋`: T_LOW is
/// `s < q1`, T_MID is `q1 <= s < q2`, T_HIGH the rest. Fewer than three
/// words all land in T_MID.
pub fn tertile_buckets(scores: &[f64]) -> Vec<Bucket> {
    let n = scores.len();
    if n < 3 {
        return vec![Bucket::TMid; n];
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (q1, q2) = (sorted[n / 3], sorted[2 * n / 3]);
    scores
        .iter()
        .map(|&s| {
            if s < q1 {
                Bucket::TLow
            } else if s < q2 {
                Bucket::TMid
            } else {
                Bucket::THigh
            }
        })
        .collect()
}

/// Tertile profile: words by surprisal tertile, other spans by kind.
pub fn tertile_profile(spans: &[TokenSpan], scores: &SurprisalScores) -> BucketProfile {
    let mut tertiles = tertile_buckets(scores.scores()).into_iter();
    let assignment = spans
        .iter()
        .map(|s| match s.kind {
            SpanKind::Word => tertiles.next().expect("scores aligned with words"),
            SpanKind::Punct => Bucket::Punct,
            SpanKind::Whitespace => Bucket::Whitespace,
            SpanKind::DigitRun | SpanKind::Other => Bucket::Others,
        })
        .collect();
    BucketProfile::from_assignment(SchemeMode::Tertile.buckets(), spans, assignment)
}

/// Applies per-bucket quotas with surprisal order inside word buckets.
///
/// A bucket holding words loses its words lowest-surprisal first, the last one
/// trimmed from its end, then any other member units positionally. Buckets
/// without words are sampled uniformly.
fn delete_in_surprisal_order<R: Rng>(
    len: usize,
    spans: &[TokenSpan],
    profile: &BucketProfile,
    parts: &[usize],
    scores: &[f64],
    rng: &mut R,
) -> Vec<bool> {
    let unit_buckets = profile.unit_buckets(spans);
    let word_spans: Vec<usize> = spans
        .iter()
        .enumerate()
        .filter_map(|(i, s)| (s.kind == SpanKind::Word).then_some(i))
        .collect();
    let order = entropy_order(scores);
    let mut keep = vec![true; len];
    for (&bucket, &quota) in profile.buckets().iter().zip(parts) {
        if quota == 0 {
            continue;
        }
        let mut sequence: Vec<usize> = order
            .iter()
            .map(|&w| spans[word_spans[w]])
            .filter(|s| unit_buckets[s.start] == bucket)
            .flat_map(|s| s.range().rev())
            .collect();
        let members: Vec<usize> = spans
            .iter()
            .filter(|s| s.kind != SpanKind::Word)
            .flat_map(|s| s.range())
            .filter(|&i| unit_buckets[i] == bucket)
            .collect();
        if sequence.is_empty() {
            assert!(quota <= members.len(), "quota exceeds bucket {bucket}");
            for pick in index::sample(rng, members.len(), quota) {
                keep[members[pick]] = false;
            }
            continue;
        }
        sequence.extend(members);
        assert!(quota <= sequence.len(), "quota exceeds bucket {bucket}");
        sequence.into_iter().take(quota).for_each(|i| keep[i] = false);
    }
    keep
}

fn lp_skeleton(
    chunk: &Chunk,
    spans: &[TokenSpan],
    budget: &RetentionBudget,
    scores: &SurprisalScores,
    profile: &BucketProfile,
    calib: &CalibrationTable,
    strategy: StrategyId,
    seed: u64,
) -> Result<Skeleton, SemanticError> {
    let (weights, parts) = opt_quotas(chunk.len(), budget, profile, calib)?;
    let mut rng = chunk_rng(seed, &strategy.to_string(), chunk.id());
    let keep = delete_in_surprisal_order(chunk.len(), spans, profile, &parts, scores.scores(), &mut rng);
    let mask = DeletionMask {
        keep,
        strategy,
        seed: Some(seed),
    };
    let extra = SkeletonExtra {
        w: Some(weights.as_map()),
        ..SkeletonExtra::default()
    };
    Ok(mask.into_skeleton(chunk, budget.r_keep(), extra))
}

/// LP allocation over surprisal tertiles instead of frequency classes.
pub fn entropy_lp_delete(
    chunk: &Chunk,
    spans: &[TokenSpan],
    budget: &RetentionBudget,
    scores: &SurprisalScores,
    calib: &CalibrationTable,
    seed: u64,
) -> Result<Skeleton, SemanticError> {
    scores.check(chunk, spans)?;
    let profile = tertile_profile(spans, scores);
    lp_skeleton(chunk, spans, budget, scores, &profile, calib, StrategyId::EntropyLp, seed)
}

/// Frequency-class LP quotas, filled lowest-surprisal first inside each class.
pub fn entropy_in_freqbuckets_delete(
    chunk: &Chunk,
    spans: &[TokenSpan],
    budget: &RetentionBudget,
    scores: &SurprisalScores,
    profile: &BucketProfile,
    calib: &CalibrationTable,
    seed: u64,
) -> Result<Skeleton, SemanticError> {
    scores.check(chunk, spans)?;
    lp_skeleton(chunk, spans, budget, scores, profile, calib, StrategyId::EntropyFreqBkt, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::opt_delete;
    use crate::frequency::{classify, BucketScheme, FrequencyTable};
    use crate::text::tokenize;

    fn tertile_calib(low: f64, mid: f64, high: f64) -> CalibrationTable {
        CalibrationTable::from_pairs(
            SchemeMode::Tertile,
            [
                (Bucket::TLow, low),
                (Bucket::TMid, mid),
                (Bucket::THigh, high),
                (Bucket::Punct, 0.5),
                (Bucket::Others, 0.5),
                (Bucket::Whitespace, 0.5),
            ],
        )
    }

    #[test]
    fn nine_distinct_scores_split_evenly() {
        let scores = [5.0, 1.0, 9.0, 3.0, 7.0, 2.0, 8.0, 4.0, 6.0];
        let t = tertile_buckets(&scores);
        for b in [Bucket::TLow, Bucket::TMid, Bucket::THigh] {
            assert_eq!(t.iter().filter(|&&x| x == b).count(), 3);
        }
        assert_eq!(t[1], Bucket::TLow);
        assert_eq!(t[2], Bucket::THigh);
    }

    #[test]
    fn degenerate_tertiles() {
        assert_eq!(tertile_buckets(&[1.0, 2.0]), vec![Bucket::TMid; 2]);
        let same = tertile_buckets(&[2.0; 6]);
        assert!(same.iter().all(|&b| b == same[0]));
    }

    fn setup(text: &str, scores: Vec<f64>) -> (Chunk, Vec<TokenSpan>, SurprisalScores) {
        let c = Chunk::english("t", text).unwrap();
        let spans = tokenize(&c);
        let s = SurprisalScores::new(&c, &spans, scores).unwrap();
        (c, spans, s)
    }

    #[test]
    fn robust_tertile_exhausted_first() {
        let (c, spans, s) = setup("aa bb cc dd ee ff", vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        // T_LOW costs least, T_HIGH most
        let calib = tertile_calib(0.9, 0.6, 0.1);
        let budget = RetentionBudget::new(13.0 / 17.0).unwrap();
        let sk = entropy_lp_delete(&c, &spans, &budget, &s, &calib, 3).unwrap();
        let w = sk.extra.w.as_ref().unwrap();
        assert!((w[&Bucket::TLow] - 1.0).abs() < 1e-9);
        assert_eq!(w[&Bucket::THigh], 0.0);
        assert_eq!(sk.skeleton, "  cc dd ee ff");
    }

    #[test]
    fn two_word_chunk_meets_budget() {
        let (c, spans, s) = setup("alpha, beta!", vec![3.0, 1.0]);
        let calib = tertile_calib(0.9, 0.6, 0.1);
        for r in [0.2, 0.5, 0.75] {
            let budget = RetentionBudget::new(r).unwrap();
            let sk = entropy_lp_delete(&c, &spans, &budget, &s, &calib, 3).unwrap();
            assert_eq!(sk.kept(), budget.target(c.len()));
        }
    }

    #[test]
    fn identical_scores_still_exact() {
        let (c, spans, s) = setup("one two three four five six seven", vec![2.0; 7]);
        let calib = tertile_calib(0.9, 0.6, 0.1);
        for r in [0.1, 0.3, 0.6, 0.9] {
            let budget = RetentionBudget::new(r).unwrap();
            let sk = entropy_lp_delete(&c, &spans, &budget, &s, &calib, 1).unwrap();
            assert_eq!(sk.kept(), budget.target(c.len()));
        }
    }

    fn six_class(c: &Chunk, spans: &[TokenSpan]) -> BucketProfile {
        let table = FrequencyTable::from_pairs([("the", 7.0), ("and", 7.0)]);
        classify(c, spans, &table, &BucketScheme::six_class())
    }

    fn six_calib() -> CalibrationTable {
        CalibrationTable::from_pairs(
            SchemeMode::SixClass,
            [
                (Bucket::Low, 0.2),
                (Bucket::Mid, 0.6),
                (Bucket::High, 0.95),
                (Bucket::Punct, 0.5),
                (Bucket::Others, 0.4),
                (Bucket::Whitespace, 0.3),
            ],
        )
    }

    #[test]
    fn lowest_score_in_bucket_deleted_first() {
        let (c, spans, s) = setup("the cat and the dog", vec![3.0, 9.0, 0.5, 1.0, 9.0]);
        let profile = six_class(&c, &spans);
        // D = 3: HIGH (the, and, the) is the cheapest bucket
        let budget = RetentionBudget::new(16.0 / 19.0).unwrap();
        let sk = entropy_in_freqbuckets_delete(&c, &spans, &budget, &s, &profile, &six_calib(), 0).unwrap();
        assert_eq!(sk.skeleton, "the cat  the dog");
        // D = 4: "and" then the last unit of the second "the"
        let budget = RetentionBudget::new(15.0 / 19.0).unwrap();
        let sk = entropy_in_freqbuckets_delete(&c, &spans, &budget, &s, &profile, &six_calib(), 0).unwrap();
        assert_eq!(sk.skeleton, "the cat  th dog");
    }

    #[test]
    fn equal_scores_match_opt_quotas() {
        let (c, spans, s) = setup("the cat and the dog", vec![1.0; 5]);
        let profile = six_class(&c, &spans);
        for r in [0.3, 0.5, 0.8] {
            let budget = RetentionBudget::new(r).unwrap();
            let a = entropy_in_freqbuckets_delete(&c, &spans, &budget, &s, &profile, &six_calib(), 5).unwrap();
            let b = opt_delete(&c, &spans, &budget, &profile, &six_calib(), 5).unwrap();
            assert_eq!(a.extra.w, b.extra.w);
            assert_eq!(a.kept(), b.kept());
        }
        let full = RetentionBudget::new(1.0).unwrap();
        let a = entropy_in_freqbuckets_delete(&c, &spans, &full, &s, &profile, &six_calib(), 5).unwrap();
        assert_eq!(a.skeleton, c.text());
    }
}
