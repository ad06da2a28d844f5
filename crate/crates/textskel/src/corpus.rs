//! Corpus JSONL ingestion and chunking.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{Chunk, ChunkError, EntityMention, Lang};

pub const DEFAULT_MAX_CHUNK: usize = 512;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {source}")]
    Chunk {
        line: usize,
        #[source]
        source: ChunkError,
    },
    #[error("max_chunk must be at least 1")]
    ZeroMaxChunk,
}

/// One corpus line as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub lang: Lang,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entities: Option<Vec<EntityMention>>,
}

pub fn ingest_corpus(path: impl AsRef<Path>, max_chunk: usize) -> Result<Vec<Chunk>, CorpusError> {
    let file = File::open(path)?;
    read_corpus(BufReader::new(file), max_chunk)
}

/// Parses corpus JSONL from any reader. Blank lines are ignored.
pub fn read_corpus<R: BufRead>(reader: R, max_chunk: usize) -> Result<Vec<Chunk>, CorpusError> {
    if max_chunk == 0 {
        return Err(CorpusError::ZeroMaxChunk);
    }
    let mut chunks = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CorpusRecord = serde_json::from_str(&line).map_err(|source| CorpusError::Json {
            line: line_no,
            source,
        })?;
        if record.text.is_empty() {
            warn!("line {line_no}: record `{}` has empty text, skipped", record.id);
            continue;
        }
        let pieces = split_record(&record, max_chunk)
            .map_err(|source| CorpusError::Chunk { line: line_no, source })?;
        chunks.extend(pieces);
    }
    Ok(chunks)
}

/// Splits a record into chunks of at most `max_chunk` units.
///
/// Each cut lands on the last split point (whitespace, or `/` for
/// pre-segmented text) at or before the limit; that one separator unit is
/// dropped and recorded on the preceding chunk. With no split point the cut is
/// hard at the limit. Entities crossing a cut are dropped.
pub fn split_record(record: &CorpusRecord, max_chunk: usize) -> Result<Vec<Chunk>, ChunkError> {
    let units: Vec<char> = record.text.chars().collect();
    if units.len() <= max_chunk {
        return Chunk::new(
            record.id.clone(),
            record.text.clone(),
            record.lang,
            record.entities.clone(),
        )
        .map(|c| vec![c]);
    }

    // (start, end, separator removed after end)
    let mut pieces: Vec<(usize, usize, Option<char>)> = Vec::new();
    let mut start = 0;
    while start < units.len() {
        let remaining = units.len() - start;
        if remaining <= max_chunk {
            pieces.push((start, units.len(), None));
            break;
        }
        // Candidate separator positions: start+1 ..= start+max_chunk.
        let cut = (start + 1..=start + max_chunk)
            .rev()
            .find(|&i| record.lang.is_split_point(units[i]));
        match cut {
            Some(i) => {
                pieces.push((start, i, Some(units[i])));
                start = i + 1;
            }
            None => {
                pieces.push((start, start + max_chunk, None));
                start += max_chunk;
            }
        }
    }

    let mut chunks = Vec::with_capacity(pieces.len());
    for (k, (s, e, sep)) in pieces.into_iter().enumerate() {
        let text: String = units[s..e].iter().collect();
        let entities = record.entities.as_ref().map(|ents| {
            ents.iter()
                .filter(|m| m.start >= s && m.end <= e)
                .map(|m| EntityMention {
                    surface: m.surface.clone(),
                    start: m.start - s,
                    end: m.end - s,
                })
                .collect::<Vec<_>>()
        });
        let mut chunk = Chunk::new(format!("{}#{k}", record.id), text, record.lang, entities)?;
        chunk.set_trailing_separator(sep);
        chunks.push(chunk);
    }
    Ok(chunks)
}

/// Re-joins split chunks, restoring recorded separators.
pub fn rejoin(chunks: &[Chunk]) -> String {
    let mut out = String::new();
    for c in chunks {
        out.push_str(c.text());
        if let Some(sep) = c.trailing_separator() {
            out.push(sep);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(text: &str) -> CorpusRecord {
        CorpusRecord {
            id: "a".into(),
            text: text.into(),
            lang: Lang::English,
            entities: None,
        }
    }

    #[test]
    fn short_record_is_one_chunk() {
        let chunks = read_corpus(r#"{"id":"a","text":"hi"}"#.as_bytes(), 512).unwrap();
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].id(), "a");
        assert_eq!(chunks[0].len(), 2);
    }

    #[test]
    fn long_record_splits_on_whitespace() {
        let text = vec!["abcde"; 200].join(" ");
        let chunks = split_record(&record(&text), 512).unwrap();
        assert_eq!(chunks.len(), 3);
        assert!(chunks.iter().all(|c| c.len() <= 512));
        assert_eq!(chunks[0].id(), "a#0");
        assert_eq!(chunks[1].id(), "a#1");
        // every piece ends on a word boundary
        assert!(chunks.iter().all(|c| c.text().ends_with("abcde")));
        assert_eq!(rejoin(&chunks), text);
    }

    #[test]
    fn thousand_unit_text_of_five_letter_words() {
        // 200 five-letter words with no separators inside words: 1000 units.
        let text = "abcd ".repeat(200);
        assert_eq!(text.chars().count(), 1000);
        let chunks = split_record(&record(&text), 512).unwrap();
        assert_eq!(chunks.len(), 2);
        assert!(chunks.iter().all(|c| c.len() <= 512));
        assert_eq!(rejoin(&chunks), text);
    }

    #[test]
    fn hard_split_without_whitespace() {
        let text = "x".repeat(1030);
        let chunks = split_record(&record(&text), 512).unwrap();
        assert_eq!(
            chunks.iter().map(Chunk::len).collect::<Vec<_>>(),
            vec![512, 512, 6]
        );
        assert_eq!(rejoin(&chunks), text);
    }

    #[test]
    fn malformed_line_names_line_number() {
        let err = read_corpus("not json".as_bytes(), 512).unwrap_err();
        assert!(matches!(err, CorpusError::Json { line: 1, .. }));
        assert!(err.to_string().contains("line 1"));

        let input = "{\"id\":\"a\",\"text\":\"ok\"}\n{\"id\":";
        let err = read_corpus(input.as_bytes(), 512).unwrap_err();
        assert!(matches!(err, CorpusError::Json { line: 2, .. }));
    }

    #[test]
    fn empty_text_is_skipped() {
        let input = "{\"id\":\"a\",\"text\":\"\"}\n{\"id\":\"b\",\"text\":\"x\"}\n";
        let chunks = read_corpus(input.as_bytes(), 512).unwrap();
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].id(), "b");
    }

    #[test]
    fn entities_follow_their_piece() {
        let mut text = "a ".repeat(300);
        text.push_str("BBC news");
        let start = 600;
        let rec = CorpusRecord {
            id: "e".into(),
            text,
            lang: Lang::English,
            entities: Some(vec![EntityMention {
                surface: "BBC".into(),
                start,
                end: start + 3,
            }]),
        };
        let chunks = split_record(&rec, 512).unwrap();
        assert_eq!(chunks.len(), 2);
        assert!(chunks[0].entities().unwrap().is_empty());
        let e = &chunks[1].entities().unwrap()[0];
        assert_eq!(&chunks[1].units()[e.start..e.end], &['B', 'B', 'C']);
    }

    #[test]
    fn presegmented_splits_on_delimiter() {
        let text = vec!["中国"; 300].join("/");
        let rec = CorpusRecord {
            id: "z".into(),
            text: text.clone(),
            lang: Lang::Presegmented,
            entities: None,
        };
        let chunks = split_record(&rec, 512).unwrap();
        assert!(chunks.iter().all(|c| c.len() <= 512 && !c.text().starts_with('/')));
        assert_eq!(rejoin(&chunks), text);
    }
}
