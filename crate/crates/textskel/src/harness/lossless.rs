use std::collections::{BTreeMap, HashMap};
use std::io::{self, Read, Write};

use flate2::read::ZlibDecoder;
use flate2::write::ZlibEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::harness::HarnessError;
use crate::strategies::{Skeleton, StrategyId};
use crate::text::Chunk;

/// A byte-exact compressor.
pub trait LosslessCodec: Send + Sync {
    fn name(&self) -> String;
    fn compress(&self, data: &[u8]) -> Vec<u8>;
    fn decompress(&self, data: &[u8]) -> io::Result<Vec<u8>>;
}

/// DEFLATE with the zlib wrapper.
#[derive(Debug, Clone, Copy)]
pub struct ZlibCodec {
    pub level: u32,
}

impl Default for ZlibCodec {
    fn default() -> Self {
        Self { level: 6 }
    }
}

impl LosslessCodec for ZlibCodec {
    fn name(&self) -> String {
        format!("zlib-{}", self.level)
    }

    fn compress(&self, data: &[u8]) -> Vec<u8> {
        let mut e = ZlibEncoder::new(Vec::new(), Compression::new(self.level));
        e.write_all(data).expect("in-memory write");
        e.finish().expect("in-memory write")
    }

    fn decompress(&self, data: &[u8]) -> io::Result<Vec<u8>> {
        let mut out = Vec::new();
        ZlibDecoder::new(data).read_to_end(&mut out)?;
        Ok(out)
    }
}

/// Compresses and verifies the round trip; returns the compressed size.
pub fn checked_size(codec: &dyn LosslessCodec, id: &str, data: &[u8]) -> Result<usize, HarnessError> {
    let packed = codec.compress(data);
    match codec.decompress(&packed) {
        Ok(back) if back == data => Ok(packed.len()),
        _ => Err(HarnessError::CodecIntegrity {
            codec: codec.name(),
            id: id.to_string(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosslessRow {
    pub id: String,
    pub original_bytes: usize,
    pub compressed_bytes: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosslessReport {
    pub codec: String,
    pub rows: Vec<LosslessRow>,
    pub mean_ratio: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Per-chunk `original / compressed` byte ratios and their mean.
pub fn lossless_baseline(chunks: &[Chunk], codec: &dyn LosslessCodec) -> Result<LosslessReport, HarnessError> {
    let rows = chunks
        .iter()
        .map(|c| {
            let bytes = c.text().as_bytes();
            let compressed = checked_size(codec, c.id(), bytes)?;
            Ok(LosslessRow {
                id: c.id().to_string(),
                original_bytes: bytes.len(),
                compressed_bytes: compressed,
                ratio: bytes.len() as f64 / compressed as f64,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(LosslessReport {
        codec: codec.name(),
        mean_ratio: mean(rows.iter().map(|r| r.ratio)),
        rows,
    })
}

/// Skeleton-then-codec ratio for one (strategy, r_keep) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeRow {
    pub strategy: StrategyId,
    pub r_keep: f64,
    pub chunks: usize,
    pub original_bytes: usize,
    pub skeleton_bytes: usize,
    pub compressed_bytes: usize,
    /// Mean over chunks of `original bytes / compressed skeleton bytes`.
    pub combined_ratio: f64,
}

/// Cascaded ratios per cell; skeletons are matched to chunks by id.
pub fn cascaded_ratio(
    chunks: &[Chunk],
    skeletons: &[Skeleton],
    codec: &dyn LosslessCodec,
) -> Result<Vec<CascadeRow>, HarnessError> {
    let by_id: HashMap<&str, &Chunk> = chunks.iter().map(|c| (c.id(), c)).collect();
    let mut cells: BTreeMap<(String, u64), Vec<&Skeleton>> = BTreeMap::new();
    for s in skeletons {
        cells
            .entry((s.strategy.to_string(), u64::MAX - s.r_keep.to_bits()))
            .or_default()
            .push(s);
    }
    let mut out = Vec::new();
    for rows in cells.into_values() {
        let (mut orig, mut skel, mut comp, mut ratios) = (0, 0, 0, Vec::new());
        for s in &rows {
            let chunk = by_id
                .get(s.id.as_str())
                .ok_or_else(|| HarnessError::Config(format!("skeleton `{}` has no source chunk", s.id)))?;
            let o = chunk.text().len();
            let c = checked_size(codec, &s.id, s.skeleton.as_bytes())?;
            orig += o;
            skel += s.skeleton.len();
            comp += c;
            ratios.push(o as f64 / c as f64);
        }
        out.push(CascadeRow {
            strategy: rows[0].strategy,
            r_keep: rows[0].r_keep,
            chunks: rows.len(),
            original_bytes: orig,
            skeleton_bytes: skel,
            compressed_bytes: comp,
            combined_ratio: mean(ratios.into_iter()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip() {
        let codec = ZlibCodec::default();
        let data = b"the quick brown fox jumps over the lazy dog, the quick brown fox";
        assert_eq!(codec.decompress(&codec.compress(data)).unwrap(), data);
    }

    #[test]
    fn random_bytes_do_not_compress() {
        let mut data = vec![0u8; 4096];
        ChaCha8Rng::seed_from_u64(7).fill_bytes(&mut data);
        let n = checked_size(&ZlibCodec::default(), "r", &data).unwrap();
        assert!(data.len() as f64 / n as f64 <= 1.05);
    }

    struct Broken;
    impl LosslessCodec for Broken {
        fn name(&self) -> String {
            "broken".into()
        }
        fn compress(&self, data: &[u8]) -> Vec<u8> {
            data[..data.len() / 2].to_vec()
        }
        fn decompress(&self, data: &[u8]) -> io::Result<Vec<u8>> {
            Ok(data.to_vec())
        }
    }

    #[test]
    fn integrity_failure_is_reported() {
        let c = vec![Chunk::english("x", "abcdef").unwrap()];
        assert!(matches!(
            lossless_baseline(&c, &Broken),
            Err(HarnessError::CodecIntegrity { .. })
        ));
    }

    #[test]
    fn repetitive_text_compresses() {
        let c = vec![Chunk::english("x", "abc ".repeat(64)).unwrap()];
        let r = lossless_baseline(&c, &ZlibCodec::default()).unwrap();
        assert!(r.mean_ratio > 5.0);
        assert_eq!(r.rows[0].original_bytes, 256);
    }
}
