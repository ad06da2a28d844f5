use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::corpus::DEFAULT_MAX_CHUNK;
use crate::frequency::SchemeMode;
use crate::harness::HarnessError;
use crate::strategies::StrategyId;

pub const DEFAULT_R_GRID: &str = "0.1:0.9:0.1";

/// Where per-word surprisal comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurprisalSource {
    File(PathBuf),
    Command(String),
    Unigram,
}

/// Similarity scorer used for the `sim` metric and calibration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilaritySource {
    ExactMatch,
    Command(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub strategies: Vec<StrategyId>,
    pub r_grid: Vec<f64>,
    pub seed: u64,
    pub corpus: PathBuf,
    #[serde(default = "default_max_chunk")]
    pub max_chunk: usize,
    #[serde(default)]
    pub decoder_endpoint: Option<String>,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    /// Excluded from the config hash.
    pub out_dir: PathBuf,
    #[serde(default = "default_buckets")]
    pub buckets: SchemeMode,
    #[serde(default)]
    pub freq_table: Option<PathBuf>,
    #[serde(default)]
    pub calibration: Option<PathBuf>,
    #[serde(default)]
    pub tertile_calibration: Option<PathBuf>,
    #[serde(default)]
    pub surprisal: Option<SurprisalSource>,
    #[serde(default)]
    pub similarity: Option<SimilaritySource>,
}

fn default_max_chunk() -> usize {
    DEFAULT_MAX_CHUNK
}

fn default_retries() -> u32 {
    3
}

fn default_buckets() -> SchemeMode {
    SchemeMode::SixClass
}

impl SweepConfig {
    /// A decoder-free sweep with default grid and bucket scheme.
    pub fn new(strategies: Vec<StrategyId>, corpus: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            strategies,
            r_grid: parse_r_grid(DEFAULT_R_GRID).expect("default grid parses"),
            seed: 0,
            corpus: corpus.into(),
            max_chunk: DEFAULT_MAX_CHUNK,
            decoder_endpoint: None,
            max_retries: default_retries(),
            out_dir: out_dir.into(),
            buckets: default_buckets(),
            freq_table: None,
            calibration: None,
            tertile_calibration: None,
            surprisal: None,
            similarity: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.strategies.is_empty() {
            return Err(HarnessError::Config("no strategies selected".into()));
        }
        if self.r_grid.is_empty() {
            return Err(HarnessError::Config("empty retention grid".into()));
        }
        if let Some(r) = self.r_grid.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return Err(HarnessError::Config(format!("retention rate {r} outside (0, 1]")));
        }
        if self.buckets == SchemeMode::Tertile {
            return Err(HarnessError::Config("--buckets takes 3 or 6".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form, without `out_dir`.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("configs serialize");
        if let Value::Object(m) = &mut v {
            m.remove("out_dir");
        }
        config_hash(&v)
    }
}

/// SHA-256 of a JSON value with object keys sorted at every level.
pub fn config_hash(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    hex::encode(Sha256::digest(out.as_bytes()))
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&m[k], out);
            }
            out.push('}');
        }
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(x, out);
            }
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Upper bound on the number of points a range grid may expand to.
pub const MAX_GRID_POINTS: usize = 10_000;

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
///
/// Range values are rounded to 1e-9 so `0.1:0.9:0.1` yields exactly the
/// literals 0.1, 0.2, ..., 0.9.
pub fn parse_r_grid(s: &str) -> Result<Vec<f64>, HarnessError> {
    let bad = || HarnessError::Config(format!("bad retention grid `{s}`"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step > 0.0) || !(start > 0.0) || !(stop <= 1.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() + 1.0;
        if n > MAX_GRID_POINTS as f64 {
            return Err(HarnessError::Config(format!("retention grid `{s}` exceeds {MAX_GRID_POINTS} points")));
        }
        let n = n as usize;
        (0..n)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<f64>, _>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    if let Some(r) = values.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(HarnessError::Config(format!("retention rate {r} outside (0, 1]")));
    }
    Ok(values)
}
