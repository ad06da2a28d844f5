//! Zipf frequency tables and bucket classification.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{Chunk, SpanKind, TokenSpan};

#[derive(Debug, Error)]
pub enum FrequencyError {
    #[error("cannot read frequency table: {0}")]
    Io(#[from] std::io::Error),
    #[error("frequency table is empty")]
    Empty,
    #[error("line {line}: expected `word<TAB>zipf`, got `{content}`")]
    Format { line: usize, content: String },
    #[error("line {line}: invalid zipf score `{value}`")]
    Score { line: usize, value: String },
}

/// Word → Zipf score lookup. Keys are lowercased at load time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrequencyTable {
    entries: HashMap<String, f64>,
    lang: Option<String>,
}

impl FrequencyTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, FrequencyError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Parses `word<TAB>zipf` lines. Later duplicates win.
    pub fn parse(input: &str) -> Result<Self, FrequencyError> {
        let mut entries = HashMap::new();
        for (idx, line) in input.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (word, score) = line.split_once('\t').ok_or_else(|| FrequencyError::Format {
                line: line_no,
                content: line.to_string(),
            })?;
            let value = score.trim();
            let zipf: f64 = value.parse().map_err(|_| FrequencyError::Score {
                line: line_no,
                value: value.to_string(),
            })?;
            if !zipf.is_finite() || zipf < 0.0 {
                return Err(FrequencyError::Score {
                    line: line_no,
                    value: value.to_string(),
                });
            }
            entries.insert(word.to_lowercase(), zipf);
        }
        if entries.is_empty() {
            return Err(FrequencyError::Empty);
        }
        Ok(Self { entries, lang: None })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        Self {
            entries: pairs.into_iter().map(|(w, z)| (w.to_lowercase(), z)).collect(),
            lang: None,
        }
    }

    pub fn with_lang(mut self, lang: impl Into<String>) -> Self {
        self.lang = Some(lang.into());
        self
    }

    pub fn lang(&self) -> Option<&str> {
        self.lang.as_deref()
    }

    /// Zipf score, or `None` when out of vocabulary.
    pub fn lookup(&self, word: &str) -> Option<f64> {
        self.entries.get(&word.to_lowercase()).copied()
    }

    /// Zipf score with out-of-vocabulary words scored 0.
    pub fn zipf_or_zero(&self, word: &str) -> f64 {
        self.lookup(word).unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Token class used for deletion budgeting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Bucket {
    Low,
    Mid,
    High,
    Punct,
    Others,
    Whitespace,
    /// Surprisal tertiles used by the entropy-driven allocator.
    #[serde(rename = "T_LOW")]
    TLow,
    #[serde(rename = "T_MID")]
    TMid,
    #[serde(rename = "T_HIGH")]
    THigh,
}

impl Bucket {
    pub const ALL: [Bucket; 9] = [
        Bucket::Low,
        Bucket::Mid,
        Bucket::High,
        Bucket::Punct,
        Bucket::Others,
        Bucket::Whitespace,
        Bucket::TLow,
        Bucket::TMid,
        Bucket::THigh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Bucket::Low => "LOW",
            Bucket::Mid => "MID",
            Bucket::High => "HIGH",
            Bucket::Punct => "PUNCT",
            Bucket::Others => "OTHERS",
            Bucket::Whitespace => "WHITESPACE",
            Bucket::TLow => "T_LOW",
            Bucket::TMid => "T_MID",
            Bucket::THigh => "T_HIGH",
        }
    }

    /// Tie-break rank for the allocator: lower ranks are deleted first when
    /// calibrated costs are equal.
    pub fn tie_rank(self) -> u8 {
        match self {
            Bucket::Whitespace => 0,
            Bucket::Punct => 1,
            Bucket::Others => 2,
            Bucket::High | Bucket::THigh => 3,
            Bucket::Mid | Bucket::TMid => 4,
            Bucket::Low | Bucket::TLow => 5,
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bucket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Bucket::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown bucket `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeMode {
    #[serde(rename = "3")]
    ThreeClass,
    #[serde(rename = "6")]
    SixClass,
    /// Surprisal tertiles plus the three non-word classes.
    #[serde(rename = "tertile")]
    Tertile,
}

impl SchemeMode {
    pub fn buckets(self) -> &'static [Bucket] {
        match self {
            SchemeMode::ThreeClass => &[Bucket::Low, Bucket::Mid, Bucket::High],
            SchemeMode::SixClass => &[
                Bucket::Low,
                Bucket::Mid,
                Bucket::High,
                Bucket::Punct,
                Bucket::Others,
                Bucket::Whitespace,
            ],
            SchemeMode::Tertile => &[
                Bucket::TLow,
                Bucket::TMid,
                Bucket::THigh,
                Bucket::Punct,
                Bucket::Others,
                Bucket::Whitespace,
            ],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeMode::ThreeClass => "3",
            SchemeMode::SixClass => "6",
            SchemeMode::Tertile => "tertile",
        }
    }
}

impl FromStr for SchemeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "3" => Ok(SchemeMode::ThreeClass),
            "6" => Ok(SchemeMode::SixClass),
            "tertile" => Ok(SchemeMode::Tertile),
            other => Err(format!("unknown bucket scheme `{other}` (expected 3, 6 or tertile)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketScheme {
    pub mode: SchemeMode,
    pub low_hi: f64,
    pub mid_hi: f64,
}

impl BucketScheme {
    pub const LOW_HI: f64 = 3.0;
    pub const MID_HI: f64 = 4.0;

    pub fn new(mode: SchemeMode) -> Self {
        Self {
            mode,
            low_hi: Self::LOW_HI,
            mid_hi: Self::MID_HI,
        }
    }

    pub fn three_class() -> Self {
        Self::new(SchemeMode::ThreeClass)
    }

    pub fn six_class() -> Self {
        Self::new(SchemeMode::SixClass)
    }

    /// Half-open intervals: `[0, low_hi)` LOW, `[low_hi, mid_hi)` MID, rest HIGH.
    pub fn zipf_bucket(&self, zipf: Option<f64>) -> Bucket {
        match zipf {
            None => Bucket::Low,
            Some(z) if z < self.low_hi => Bucket::Low,
            Some(z) if z < self.mid_hi => Bucket::Mid,
            Some(_) => Bucket::High,
        }
    }
}

/// Per-chunk bucket membership and character-mass fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketProfile {
    buckets: Vec<Bucket>,
    counts: Vec<usize>,
    len: usize,
    /// Bucket label for each token span, aligned with the span list.
    assignment: Vec<Bucket>,
}

impl BucketProfile {
    /// Builds a profile from per-span labels.
    pub fn from_assignment(buckets: &[Bucket], spans: &[TokenSpan], assignment: Vec<Bucket>) -> Self {
        assert_eq!(spans.len(), assignment.len());
        let mut counts = vec![0usize; buckets.len()];
        for (span, b) in spans.iter().zip(&assignment) {
            let k = buckets
                .iter()
                .position(|x| x == b)
                .unwrap_or_else(|| panic!("bucket {b} not in scheme"));
            counts[k] += span.len();
        }
        let len = spans.last().map_or(0, |s| s.end);
        Self {
            buckets: buckets.to_vec(),
            counts,
            len,
            assignment,
        }
    }

    /// Profile from explicit unit counts, without span assignment.
    pub fn from_counts(buckets: &[Bucket], counts: &[usize]) -> Self {
        assert_eq!(buckets.len(), counts.len());
        Self {
            buckets: buckets.to_vec(),
            counts: counts.to_vec(),
            len: counts.iter().sum(),
            assignment: Vec::new(),
        }
    }

    pub fn buckets(&self) -> &[Bucket] {
        &self.buckets
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, bucket: Bucket) -> usize {
        self.index(bucket).map_or(0, |k| self.counts[k])
    }

    pub fn index(&self, bucket: Bucket) -> Option<usize> {
        self.buckets.iter().position(|&b| b == bucket)
    }

    /// Total units `L`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Character-mass fractions `p_k`.
    pub fn p(&self) -> Vec<f64> {
        let total = self.len as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    pub fn p_of(&self, bucket: Bucket) -> f64 {
        self.count(bucket) as f64 / self.len as f64
    }

    pub fn assignment(&self) -> &[Bucket] {
        &self.assignment
    }

    /// Expands span labels to one label per unit.
    pub fn unit_buckets(&self, spans: &[TokenSpan]) -> Vec<Bucket> {
        let mut out = Vec::with_capacity(self.len);
        for (span, &b) in spans.iter().zip(&self.assignment) {
            out.extend(std::iter::repeat(b).take(span.len()));
        }
        out
    }
}

/// Buckets every span of a chunk under `scheme`.
///
/// Words and digit runs are looked up in `table` (out-of-vocabulary → LOW).
/// With six classes, punctuation, whitespace and digit/other spans get their
/// own buckets. With three classes, every non-word span inherits the bucket of
/// the nearest preceding word-like span (leading spans take the first one).
pub fn classify(
    chunk: &Chunk,
    spans: &[TokenSpan],
    table: &FrequencyTable,
    scheme: &BucketScheme,
) -> BucketProfile {
    let units = chunk.units();
    let lookup = |s: &TokenSpan| {
        let word: String = units[s.range()].iter().collect();
        scheme.zipf_bucket(table.lookup(&word))
    };
    let assignment: Vec<Bucket> = match scheme.mode {
        SchemeMode::SixClass => spans
            .iter()
            .map(|s| match s.kind {
                SpanKind::Word => lookup(s),
                SpanKind::Punct => Bucket::Punct,
                SpanKind::Whitespace => Bucket::Whitespace,
                SpanKind::DigitRun | SpanKind::Other => Bucket::Others,
            })
            .collect(),
        SchemeMode::ThreeClass => {
            let word_like = |s: &TokenSpan| matches!(s.kind, SpanKind::Word | SpanKind::DigitRun);
            let own: Vec<Option<Bucket>> = spans
                .iter()
                .map(|s| word_like(s).then(|| lookup(s)))
                .collect();
            let first = own.iter().flatten().next().copied().unwrap_or(Bucket::Low);
            let mut current = first;
            own.into_iter()
                .map(|b| {
                    if let Some(b) = b {
                        current = b;
                    }
                    current
                })
                .collect()
        }
        SchemeMode::Tertile => panic!("tertile profiles are built from surprisal scores"),
    };
    BucketProfile::from_assignment(scheme.mode.buckets(), spans, assignment)
}
