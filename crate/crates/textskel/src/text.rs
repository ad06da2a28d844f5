//! Canonical text model: chunks, classified token spans and unit accounting.
//!
//! A *unit* is one Unicode scalar value. Every offset, length and budget in
//! the crate is expressed in units, never in bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_general_category::{get_general_category, GeneralCategory};

/// Token delimiter for pre-segmented input.
pub const SEGMENT_DELIMITER: char = '/';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    #[default]
    English,
    /// Text already segmented into tokens joined by `/`.
    Presegmented,
}

impl Lang {
    pub fn as_str(self) -> &'static str {
        match self {
            Lang::English => "english",
            Lang::Presegmented => "presegmented",
        }
    }

    /// The unit chunking prefers to split on.
    pub(crate) fn is_split_point(self, c: char) -> bool {
        match self {
            Lang::English => c.is_whitespace(),
            Lang::Presegmented => c == SEGMENT_DELIMITER || c.is_whitespace(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChunkError {
    #[error("chunk `{0}` has empty text")]
    Empty(String),
    #[error("chunk `{id}`: entity `{surface}` has invalid range {start}..{end} (length {len})")]
    EntityRange {
        id: String,
        surface: String,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("chunk `{id}`: entity at {start}..{end} reads `{found}`, expected `{surface}`")]
    EntitySurface {
        id: String,
        surface: String,
        found: String,
        start: usize,
        end: usize,
    },
}

/// One source text unit of at most `max_chunk` units.
#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    id: String,
    text: String,
    units: Vec<char>,
    lang: Lang,
    entities: Option<Vec<EntityMention>>,
    trailing_separator: Option<char>,
}

impl Chunk {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        lang: Lang,
        entities: Option<Vec<EntityMention>>,
    ) -> Result<Self, ChunkError> {
        let id = id.into();
        let text = text.into();
        let units: Vec<char> = text.chars().collect();
        if units.is_empty() {
            return Err(ChunkError::Empty(id));
        }
        if let Some(ents) = &entities {
            for e in ents {
                if e.start >= e.end || e.end > units.len() {
                    return Err(ChunkError::EntityRange {
                        id,
                        surface: e.surface.clone(),
                        start: e.start,
                        end: e.end,
                        len: units.len(),
                    });
                }
                let found: String = units[e.start..e.end].iter().collect();
                if found != e.surface {
                    return Err(ChunkError::EntitySurface {
                        id,
                        surface: e.surface.clone(),
                        found,
                        start: e.start,
                        end: e.end,
                    });
                }
            }
        }
        Ok(Self {
            id,
            text,
            units,
            lang,
            entities,
            trailing_separator: None,
        })
    }

    /// Convenience constructor for English text without annotations.
    pub fn english(id: impl Into<String>, text: impl Into<String>) -> Result<Self, ChunkError> {
        Self::new(id, text, Lang::English, None)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn units(&self) -> &[char] {
        &self.units
    }

    /// Length `L` in units. Always at least 1.
    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lang(&self) -> Lang {
        self.lang
    }

    pub fn entities(&self) -> Option<&[EntityMention]> {
        self.entities.as_deref()
    }

    /// Separator removed after this chunk when its source record was split.
    pub fn trailing_separator(&self) -> Option<char> {
        self.trailing_separator
    }

    pub(crate) fn set_trailing_separator(&mut self, sep: Option<char>) {
        self.trailing_separator = sep;
    }

    /// Subsequence of units selected by `keep`.
    pub fn masked_text(&self, keep: &[bool]) -> String {
        debug_assert_eq!(keep.len(), self.units.len());
        self.units
            .iter()
            .zip(keep)
            .filter_map(|(&c, &k)| k.then_some(c))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanKind {
    Word,
    Punct,
    Whitespace,
    DigitRun,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TokenSpan {
    pub start: usize,
    pub end: usize,
    pub kind: SpanKind,
}

impl TokenSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }

    pub fn text(&self, units: &[char]) -> String {
        units[self.range()].iter().collect()
    }
}

pub fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

pub fn is_decimal_digit(c: char) -> bool {
    get_general_category(c) == GeneralCategory::DecimalNumber
}

fn english_kind(c: char) -> SpanKind {
    if c.is_alphabetic() {
        SpanKind::Word
    } else if is_decimal_digit(c) {
        SpanKind::DigitRun
    } else if c.is_whitespace() {
        SpanKind::Whitespace
    } else if is_punctuation(c) {
        SpanKind::Punct
    } else {
        SpanKind::Other
    }
}

/// Partitions a chunk into classified spans covering `[0, L)` exactly.
pub fn tokenize(chunk: &Chunk) -> Vec<TokenSpan> {
    tokenize_units(chunk.units(), chunk.lang())
}

pub fn tokenize_units(units: &[char], lang: Lang) -> Vec<TokenSpan> {
    match lang {
        Lang::English => tokenize_english(units),
        Lang::Presegmented => tokenize_presegmented(units),
    }
}

fn tokenize_english(units: &[char]) -> Vec<TokenSpan> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < units.len() {
        let kind = english_kind(units[i]);
        let mut j = i + 1;
        // Punctuation and `other` units are single-unit spans.
        if matches!(kind, SpanKind::Word | SpanKind::DigitRun | SpanKind::Whitespace) {
            while j < units.len() && english_kind(units[j]) == kind {
                j += 1;
            }
        }
        spans.push(TokenSpan { start: i, end: j, kind });
        i = j;
    }
    spans
}

fn tokenize_presegmented(units: &[char]) -> Vec<TokenSpan> {
    let class = |c: char| {
        if c == SEGMENT_DELIMITER {
            0u8
        } else if c.is_whitespace() {
            1
        } else {
            2
        }
    };
    let mut spans = Vec::new();
    let mut i = 0;
    while i < units.len() {
        let cls = class(units[i]);
        let mut j = i + 1;
        if cls != 0 {
            while j < units.len() && class(units[j]) == cls {
                j += 1;
            }
        }
        let kind = if cls == 2 {
            SpanKind::Word
        } else {
            SpanKind::Whitespace
        };
        spans.push(TokenSpan { start: i, end: j, kind });
        i = j;
    }
    spans
}

/// Word spans only, in order.
pub fn word_spans(spans: &[TokenSpan]) -> impl Iterator<Item = &TokenSpan> {
    spans.iter().filter(|s| s.kind == SpanKind::Word)
}

#[derive(Debug, Error, PartialEq)]
pub enum BudgetError {
    #[error("retention rate {0} outside (0, 1]")]
    RetentionOutOfRange(f64),
    #[error("tolerance {0} must be finite and non-negative")]
    BadTolerance(f64),
}

/// Slack absorbing binary representation error in `r_keep * L` before rounding.
const ROUNDING_SLACK: f64 = 1e-9;

/// Round-half-up of `r * len`, robust to representation error in `r`.
pub fn round_half_up(r: f64, len: usize) -> usize {
    let x = r * len as f64;
    (x + 0.5 + ROUNDING_SLACK).floor().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetentionBudget {
    r_keep: f64,
    epsilon: f64,
}

impl RetentionBudget {
    pub const DEFAULT_EPSILON: f64 = 0.02;

    pub fn new(r_keep: f64) -> Result<Self, BudgetError> {
        Self::with_tolerance(r_keep, Self::DEFAULT_EPSILON)
    }

    pub fn with_tolerance(r_keep: f64, epsilon: f64) -> Result<Self, BudgetError> {
        if !(r_keep > 0.0 && r_keep <= 1.0) {
            return Err(BudgetError::RetentionOutOfRange(r_keep));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(BudgetError::BadTolerance(epsilon));
        }
        Ok(Self { r_keep, epsilon })
    }

    pub fn r_keep(&self) -> f64 {
        self.r_keep
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Number of units to retain: `round(r_keep * L)`, never below one unit.
    pub fn target(&self, len: usize) -> usize {
        round_half_up(self.r_keep, len).clamp(1.min(len), len)
    }

    /// Lower edge of the tolerance band, `round((r_keep - epsilon) * L)`.
    pub fn lower_target(&self, len: usize) -> usize {
        let lo = self.r_keep - self.epsilon;
        if lo <= 0.0 {
            return 1.min(len);
        }
        round_half_up(lo, len).clamp(1.min(len), self.target(len))
    }

    /// Units to delete from a chunk of `len` units.
    pub fn deletions(&self, len: usize) -> usize {
        len - self.target(len)
    }
}

/// Realized retention `kept / total` kept as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Retention {
    pub kept: usize,
    pub total: usize,
}

impl Retention {
    pub fn as_f64(&self) -> f64 {
        self.kept as f64 / self.total as f64
    }

    /// `total / kept`; infinite for an empty skeleton.
    pub fn compression_ratio(&self) -> f64 {
        self.total as f64 / self.kept as f64
    }
}

pub fn realized_retention(original: &Chunk, skeleton_text: &str) -> Retention {
    Retention {
        kept: skeleton_text.chars().count(),
        total: original.len(),
    }
}

/// Two-pointer check that `sub` is a subsequence of `full`.
pub fn is_subsequence(sub: &str, full: &str) -> bool {
    let mut it = full.chars();
    sub.chars().all(|c| it.by_ref().any(|d| d == c))
}
