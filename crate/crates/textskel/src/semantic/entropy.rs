use crate::semantic::{SemanticError, SurprisalScores};
use crate::strategies::DeletionMask;
use crate::strategies::StrategyId;
use crate::text::{Chunk, RetentionBudget, SpanKind, TokenSpan};

/// Word indices in ascending surprisal; ties keep the earlier word first.
pub fn entropy_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    order
}

fn fully_kept(keep: &[bool], span: &TokenSpan) -> bool {
    span.range().all(|i| keep[i])
}

/// Deletes exactly `deletions` units by removing words in `order`.
///
/// Each removed word takes one adjacent whitespace span with it: the next span
/// if it is intact whitespace, else the previous one. The word that would
/// overshoot loses its whitespace first, then units from its end. Units left
/// over once every word is gone are taken positionally from whitespace,
/// punctuation, other, then digit spans.
pub fn token_deletion_mask(len: usize, spans: &[TokenSpan], order: &[usize], deletions: usize) -> Vec<bool> {
    let words: Vec<usize> = spans
        .iter()
        .enumerate()
        .filter_map(|(i, s)| (s.kind == SpanKind::Word).then_some(i))
        .collect();
    let mut keep = vec![true; len];
    let mut remaining = deletions.min(len);
    for &w in order {
        if remaining == 0 {
            break;
        }
        let si = words[w];
        let word = spans[si];
        let ws = [si + 1, si.wrapping_sub(1)]
            .into_iter()
            .filter(|&j| j < spans.len())
            .map(|j| spans[j])
            .find(|s| s.kind == SpanKind::Whitespace && fully_kept(&keep, s));
        let cost = word.len() + ws.map_or(0, |s| s.len());
        if cost <= remaining {
            word.range().chain(ws.iter().flat_map(|s| s.range())).for_each(|i| keep[i] = false);
            remaining -= cost;
            continue;
        }
        if let Some(ws) = ws {
            let n = remaining.min(ws.len());
            ws.range().take(n).for_each(|i| keep[i] = false);
            remaining -= n;
        }
        word.range().rev().take(remaining).for_each(|i| keep[i] = false);
        remaining = 0;
    }
    for kind in [SpanKind::Whitespace, SpanKind::Punct, SpanKind::Other, SpanKind::DigitRun] {
        for span in spans.iter().filter(|s| s.kind == kind) {
            for i in span.range() {
                if remaining == 0 {
                    return keep;
                }
                if keep[i] {
                    keep[i] = false;
                    remaining -= 1;
                }
            }
        }
    }
    keep
}

/// Removes the least surprising words first.
pub fn entropy_delete(
    chunk: &Chunk,
    spans: &[TokenSpan],
    budget: &RetentionBudget,
    scores: &SurprisalScores,
    seed: u64,
) -> Result<DeletionMask, SemanticError> {
    scores.check(chunk, spans)?;
    let order = entropy_order(scores.scores());
    Ok(DeletionMask {
        keep: token_deletion_mask(chunk.len(), spans, &order, budget.deletions(chunk.len())),
        strategy: StrategyId::Entropy,
        seed: Some(seed),
    })
}
