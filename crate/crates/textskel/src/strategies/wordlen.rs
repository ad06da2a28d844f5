use rand::seq::index;

use crate::rng::chunk_rng;
use crate::strategies::{DeletionMask, StrategyId};
use crate::text::{tokenize, Chunk, RetentionBudget, SpanKind, TokenSpan};

/// WordLen edit stages, applied in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum WordLenStage {
    CollapseWhitespace = 1,
    DropVowels = 2,
    DropShortWords = 3,
    TruncateLongWords = 4,
    DropPunctDigits = 5,
    RandomFallback = 6,
}

const MIN_VOWEL_WORD: usize = 3;
const SHORT_WORD_MAX: usize = 2;
const LONG_WORD_MIN: usize = 8;
const TRUNCATED_LEN: usize = 5;

fn is_vowel(c: char) -> bool {
    matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u')
}

struct Editor<'a> {
    keep: &'a mut [bool],
    kept: usize,
    lo: usize,
    hi: usize,
}

impl Editor<'_> {
    fn done(&self) -> bool {
        self.kept <= self.hi
    }

    /// Applies one edit. Deletes it whole unless that would undershoot the
    /// tolerance band, in which case only its first units are deleted so the
    /// result lands on the upper edge. Returns whether anything was deleted.
    fn apply(&mut self, positions: impl IntoIterator<Item = usize>) -> bool {
        let live: Vec<usize> = positions.into_iter().filter(|&p| self.keep[p]).collect();
        if live.is_empty() || self.done() {
            return false;
        }
        let take = if self.kept - live.len() >= self.lo {
            live.len()
        } else {
            self.kept - self.hi
        };
        for &p in &live[..take] {
            self.keep[p] = false;
        }
        self.kept -= take;
        take > 0
    }
}

/// Adaptive small-word removal.
///
/// Runs the stages in order and stops as soon as the retained count falls
/// inside `[round((r_keep - eps) L), round(r_keep L)]`. Each stage walks the
/// text left to right one edit at a time. Returns the mask and the last stage
/// that deleted anything.
pub fn wordlen_delete(
    chunk: &Chunk,
    budget: &RetentionBudget,
    seed: u64,
) -> (DeletionMask, Option<WordLenStage>) {
    let len = chunk.len();
    let units = chunk.units();
    let spans = tokenize(chunk);
    let mut keep = vec![true; len];
    let mut ed = Editor {
        keep: &mut keep,
        kept: len,
        lo: budget.lower_target(len),
        hi: budget.target(len),
    };
    let mut last = None;

    let words: Vec<&TokenSpan> = spans.iter().filter(|s| s.kind == SpanKind::Word).collect();

    for stage in [
        WordLenStage::CollapseWhitespace,
        WordLenStage::DropVowels,
        WordLenStage::DropShortWords,
        WordLenStage::TruncateLongWords,
        WordLenStage::DropPunctDigits,
    ] {
        if ed.done() {
            break;
        }
        let mut touched = false;
        match stage {
            WordLenStage::CollapseWhitespace => {
                for run in whitespace_runs(&spans) {
                    touched |= ed.apply(run.start + 1..run.end);
                }
            }
            WordLenStage::DropVowels => {
                for w in words.iter().filter(|w| w.len() >= MIN_VOWEL_WORD) {
                    touched |= ed.apply((w.start + 1..w.end).filter(|&i| is_vowel(units[i])));
                }
            }
            WordLenStage::DropShortWords => {
                for (i, w) in spans.iter().enumerate() {
                    if w.kind != SpanKind::Word || w.len() > SHORT_WORD_MAX {
                        continue;
                    }
                    // take the following separator with the word
                    let sep = spans
                        .get(i + 1)
                        .filter(|s| s.kind == SpanKind::Whitespace)
                        .map(|s| s.start);
                    touched |= ed.apply(w.range().chain(sep));
                }
            }
            WordLenStage::TruncateLongWords => {
                for w in &words {
                    let live: Vec<usize> = w.range().filter(|&i| ed.keep[i]).collect();
                    if live.len() >= LONG_WORD_MIN {
                        touched |= ed.apply(live[TRUNCATED_LEN..].iter().rev().copied());
                    }
                }
            }
            WordLenStage::DropPunctDigits => {
                for s in spans
                    .iter()
                    .filter(|s| matches!(s.kind, SpanKind::Punct | SpanKind::DigitRun))
                {
                    touched |= ed.apply(s.range());
                }
            }
            WordLenStage::RandomFallback => unreachable!(),
        }
        if touched {
            last = Some(stage);
        }
    }

    if !ed.done() {
        let live: Vec<usize> = (0..len).filter(|&i| ed.keep[i]).collect();
        let excess = ed.kept - ed.hi;
        let mut rng = chunk_rng(seed, "wordlen", chunk.id());
        let mut picks: Vec<usize> = index::sample(&mut rng, live.len(), excess).into_vec();
        picks.sort_unstable();
        for p in picks {
            ed.keep[live[p]] = false;
        }
        last = Some(WordLenStage::RandomFallback);
    }

    (
        DeletionMask {
            keep,
            strategy: StrategyId::WordLen,
            seed: Some(seed),
        },
        last,
    )
}

/// Maximal runs of adjacent whitespace-kind spans.
fn whitespace_runs(spans: &[TokenSpan]) -> Vec<std::ops::Range<usize>> {
    let mut runs: Vec<std::ops::Range<usize>> = Vec::new();
    for s in spans.iter().filter(|s| s.kind == SpanKind::Whitespace) {
        match runs.last_mut() {
            Some(r) if r.end == s.start => r.end = s.end,
            _ => runs.push(s.range()),
        }
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vowel_stage_on_single_word() {
        let c = Chunk::english("w", "documentation").unwrap();
        // enough budget that stage 2 completes without truncation
        let (m, stage) = wordlen_delete(&c, &RetentionBudget::with_tolerance(0.54, 0.02).unwrap(), 0);
        assert_eq!(m.apply(&c), "dcmnttn");
        assert_eq!(stage, Some(WordLenStage::DropVowels));
    }

    #[test]
    fn whitespace_collapse_suffices() {
        let c = Chunk::english("w", "a  b").unwrap();
        let (m, stage) = wordlen_delete(&c, &RetentionBudget::with_tolerance(0.75, 0.02).unwrap(), 0);
        assert_eq!(m.apply(&c), "a b");
        assert_eq!(stage, Some(WordLenStage::CollapseWhitespace));
    }

    #[test]
    fn first_letter_survives_vowel_stage() {
        let c = Chunk::english("w", "apple orange").unwrap();
        let b = RetentionBudget::with_tolerance(0.6, 0.5).unwrap();
        let (m, _) = wordlen_delete(&c, &b, 0);
        let out = m.apply(&c);
        assert!(out.starts_with('a'));
        assert!(out.contains(" o") || out.contains('o'));
    }

    #[test]
    fn aggressive_rate_reaches_fallback() {
        let text = "The committee said on Tuesday that 12 new schools, costing £4.5m, would open in 2006.";
        let c = Chunk::english("w", text).unwrap();
        let b = RetentionBudget::new(0.1).unwrap();
        let (m, stage) = wordlen_delete(&c, &b, 9);
        let l = c.len();
        assert!(m.kept() >= b.lower_target(l) && m.kept() <= b.target(l));
        assert_eq!(stage, Some(WordLenStage::RandomFallback));
    }

    #[test]
    fn identity_at_full_rate() {
        let c = Chunk::english("w", "keep  everything, please").unwrap();
        let (m, stage) = wordlen_delete(&c, &RetentionBudget::new(1.0).unwrap(), 0);
        assert_eq!(m.apply(&c), c.text());
        assert_eq!(stage, None);
    }
}
