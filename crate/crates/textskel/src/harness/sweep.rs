use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::CalibrationTable;
use crate::corpus::ingest_corpus;
use crate::decoder::{
    decoder_from_endpoint, summarize_request, ReconstructionClient, ReconstructionRequest, ReconstructionResult,
    RetryPolicy, TemplateKind,
};
use crate::frequency::FrequencyTable;
use crate::harness::{
    encode_prepared, estimate_original_len, latency_stats, metadata_overhead, needs_scores, report,
    EncoderContext, HarnessError, LatencyStats, OverheadAudit, PreparedChunk, SimilaritySource,
    SurprisalSource, SweepConfig,
};
use crate::metrics::{aggregate, evaluate_chunk, CellSummary, ExactMatch, ExternalProcessSimilarity, MetricReport, SimilarityProvider};
use crate::semantic::{ExternalProcessSurprisal, SurprisalFile, SurprisalProvider, UnigramSurprisal};
use crate::strategies::{Skeleton, StrategyId};
use crate::text::{Chunk, RetentionBudget};

pub const SKELETONS_FILE: &str = "skeletons.jsonl";
pub const RECONSTRUCTIONS_FILE: &str = "reconstructions.jsonl";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const RUN_FILE: &str = "run.json";

/// Decoder transport settings that do not affect results.
#[derive(Debug, Clone)]
pub struct DecoderOptions {
    pub timeout: Duration,
    /// Header name and key.
    pub api_key: Option<(String, String)>,
    pub max_in_flight: usize,
    pub template: Option<PathBuf>,
}

impl Default for DecoderOptions {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(60),
            api_key: None,
            max_in_flight: 4,
            template: None,
        }
    }
}

/// Everything a sweep loads before touching the corpus.
pub struct Resources {
    pub ctx: EncoderContext,
    pub client: Option<ReconstructionClient>,
    pub similarity: Option<Box<dyn SimilarityProvider>>,
}

impl Resources {
    pub fn load(cfg: &SweepConfig, opts: &DecoderOptions) -> Result<Self, HarnessError> {
        let table = cfg.freq_table.as_ref().map(FrequencyTable::load).transpose()?;
        let surprisal: Option<Arc<dyn SurprisalProvider>> = match &cfg.surprisal {
            None => None,
            Some(SurprisalSource::File(p)) => Some(Arc::new(SurprisalFile::load(p)?)),
            Some(SurprisalSource::Command(c)) => Some(Arc::new(ExternalProcessSurprisal::spawn(c)?)),
            Some(SurprisalSource::Unigram) => {
                let t = table.clone().ok_or_else(|| {
                    HarnessError::Config("--surprisal-fallback unigram needs --freq-table".into())
                })?;
                Some(Arc::new(UnigramSurprisal::new(t)))
            }
        };
        let ctx = EncoderContext {
            table,
            lp_mode: Some(cfg.buckets),
            calibration: cfg.calibration.as_ref().map(CalibrationTable::load).transpose()?,
            tertile_calibration: cfg.tertile_calibration.as_ref().map(CalibrationTable::load).transpose()?,
            surprisal,
            stochastic: Default::default(),
        };
        let client = match &cfg.decoder_endpoint {
            None => None,
            Some(ep) => {
                let decoder = decoder_from_endpoint(ep, opts.timeout, opts.api_key.clone())?;
                let policy = RetryPolicy {
                    max_retries: cfg.max_retries,
                    ..RetryPolicy::default()
                };
                let mut c = ReconstructionClient::new(decoder, policy).with_max_in_flight(opts.max_in_flight);
                if let Some(t) = &opts.template {
                    c = c.with_template(crate::decoder::PromptTemplate::load(t)?);
                }
                Some(c)
            }
        };
        let similarity: Option<Box<dyn SimilarityProvider>> = match &cfg.similarity {
            None => None,
            Some(SimilaritySource::ExactMatch) => Some(Box::new(ExactMatch)),
            Some(SimilaritySource::Command(c)) => Some(Box::new(ExternalProcessSimilarity::spawn(c)?)),
        };
        Ok(Self {
            ctx,
            client,
            similarity,
        })
    }
}

/// One reconstructions JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionRecord {
    pub id: String,
    pub strategy: StrategyId,
    pub r_keep: f64,
    pub text: String,
    pub attempts: u32,
    pub accepted: bool,
    pub latency_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedCell {
    pub strategy: StrategyId,
    pub r_keep: f64,
    pub chunks: usize,
}

/// Re-run record written as `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub code_version: String,
    pub config: SweepConfig,
    /// Artifact name to path relative to the run directory.
    pub files: BTreeMap<String, String>,
    pub chunks: usize,
    pub cells: usize,
    pub skeletons: usize,
    pub decoder_failures: usize,
    pub rejected: usize,
    pub excluded: Vec<ExcludedCell>,
    pub encoder_latency: Vec<LatencyStats>,
    pub metadata_overhead: Vec<OverheadAudit>,
}

pub struct SweepOutcome {
    pub dir: PathBuf,
    pub record: RunRecord,
    pub skeletons: Vec<Skeleton>,
    pub reports: Vec<MetricReport>,
    pub summaries: Vec<CellSummary>,
}

fn jsonl_line<T: Serialize>(w: &mut impl Write, value: &T) -> Result<(), HarnessError> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_skeletons(path: &Path) -> Result<Vec<Skeleton>, HarnessError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| HarnessError::Config(format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricReport>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<MetricReport>, _>>()?)
}

pub fn write_metrics(path: &Path, rows: &[MetricReport]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start {jobs} workers: {e}")))
}

/// Checks every prerequisite before any work starts.
pub fn check_startup(cfg: &SweepConfig, res: &Resources) -> Result<(), HarnessError> {
    cfg.validate()?;
    for &s in &cfg.strategies {
        if s == StrategyId::Summarize {
            if res.client.is_none() {
                return Err(HarnessError::Config("strategy summarize needs --decoder-endpoint".into()));
            }
        } else {
            res.ctx.require(s).map_err(HarnessError::Startup)?;
        }
    }
    Ok(())
}

/// Runs every (strategy, r_keep) cell over the corpus.
///
/// Writes `skeletons.jsonl`, `reconstructions.jsonl` (with a decoder),
/// `metrics.csv`, `summary.csv` and `run.json` under
/// `out_dir/<config hash prefix>/`, replacing earlier output of the same
/// configuration. Skeletons and metrics depend only on the configuration,
/// not on `jobs`.
pub fn run_sweep(cfg: &SweepConfig, res: &Resources, jobs: usize) -> Result<SweepOutcome, HarnessError> {
    check_startup(cfg, res)?;
    let chunks = ingest_corpus(&cfg.corpus, cfg.max_chunk)?;
    let hash = cfg.hash();
    let dir = cfg.out_dir.join(&hash[..16]);
    fs::create_dir_all(&dir)?;
    let pool = thread_pool(jobs)?;
    info!("sweep {} over {} chunks into {}", &hash[..16], chunks.len(), dir.display());

    let with_scores = cfg.strategies.iter().any(|&s| needs_scores(s));
    let prepared: Vec<PreparedChunk<'_>> = pool.install(|| {
        chunks
            .par_iter()
            .map(|c| PreparedChunk::new(c, &res.ctx, with_scores))
            .collect::<Result<_, _>>()
    })
    .map_err(HarnessError::Startup)?;

    let mut skel_out = BufWriter::new(File::create(dir.join(SKELETONS_FILE))?);
    let mut recon_out = match res.client {
        Some(_) => Some(BufWriter::new(File::create(dir.join(RECONSTRUCTIONS_FILE))?)),
        None => None,
    };
    let mut skeletons = Vec::new();
    let mut reports = Vec::new();
    let mut timings: BTreeMap<String, (StrategyId, Vec<f64>)> = BTreeMap::new();
    let (mut failures, mut rejected) = (0, 0);
    let mut excluded = Vec::new();

    for &strategy in &cfg.strategies {
        for &r in &cfg.r_grid {
            let cell_skeletons: Option<Vec<Skeleton>> = if strategy == StrategyId::Summarize {
                None
            } else {
                let encoded: Vec<(Skeleton, f64)> = pool.install(|| {
                    prepared
                        .par_iter()
                        .map(|p| {
                            let t = Instant::now();
                            let sk = encode_prepared(p, strategy, r, cfg.seed, &res.ctx).map_err(|e| {
                                HarnessError::Encode {
                                    strategy,
                                    chunk: p.chunk.id().to_string(),
                                    source: e,
                                }
                            })?;
                            Ok((sk, t.elapsed().as_secs_f64() * 1e3))
                        })
                        .collect::<Result<_, HarnessError>>()
                })?;
                let entry = timings.entry(strategy.to_string()).or_insert((strategy, Vec::new()));
                entry.1.extend(encoded.iter().map(|(_, ms)| *ms));
                let sks: Vec<Skeleton> = encoded.into_iter().map(|(s, _)| s).collect();
                for s in &sks {
                    jsonl_line(&mut skel_out, s)?;
                }
                Some(sks)
            };

            let decoded: Option<Vec<Result<ReconstructionResult, _>>> = match (&res.client, &cell_skeletons) {
                (Some(client), Some(sks)) => {
                    let reqs: Vec<ReconstructionRequest> = sks
                        .iter()
                        .zip(&chunks)
                        .map(|(s, c)| ReconstructionRequest {
                            id: s.id.clone(),
                            skeleton: s.skeleton.clone(),
                            original_len_estimate: estimate_original_len(s.kept(), r),
                            lang: c.lang(),
                            template: TemplateKind::Reconstruct,
                            strategy: Some(strategy),
                        })
                        .collect();
                    Some(client.reconstruct_many(&reqs))
                }
                (Some(client), None) => {
                    let budget = RetentionBudget::new(r).map_err(|e| HarnessError::Config(e.to_string()))?;
                    let reqs: Vec<ReconstructionRequest> =
                        chunks.iter().map(|c| summarize_request(c, &budget)).collect();
                    Some(client.reconstruct_many(&reqs))
                }
                (None, _) => None,
            };

            // (chunk, skeleton text, hypothesis, attempts)
            let mut rows: Vec<(&Chunk, String, String, Option<u32>)> = Vec::new();
            let mut cell_failures = 0;
            for (i, chunk) in chunks.iter().enumerate() {
                let skeleton_text = cell_skeletons.as_ref().map(|s| s[i].skeleton.clone());
                match decoded.as_ref().map(|d| &d[i]) {
                    None => {
                        let s = skeleton_text.expect("encoder strategies carry skeletons");
                        rows.push((chunk, s.clone(), s, None));
                    }
                    Some(Ok(out)) => {
                        if !out.accepted {
                            rejected += 1;
                        }
                        if let Some(w) = recon_out.as_mut() {
                            jsonl_line(
                                w,
                                &ReconstructionRecord {
                                    id: out.id.clone(),
                                    strategy,
                                    r_keep: r,
                                    text: out.text.clone(),
                                    attempts: out.attempts,
                                    accepted: out.accepted,
                                    latency_ms: out.latency_ms.clone(),
                                },
                            )?;
                        }
                        let s = skeleton_text.unwrap_or_else(|| out.text.clone());
                        rows.push((chunk, s, out.text.clone(), Some(out.attempts)));
                    }
                    Some(Err(e)) => {
                        warn!("{strategy} @ {r} / {}: {e}", chunk.id());
                        cell_failures += 1;
                    }
                }
            }
            if cell_failures > 0 {
                failures += cell_failures;
                excluded.push(ExcludedCell {
                    strategy,
                    r_keep: r,
                    chunks: cell_failures,
                });
            }
            let sim = res.similarity.as_deref();
            let cell_reports: Vec<MetricReport> = pool.install(|| {
                rows.par_iter()
                    .map(|(c, s, h, a)| evaluate_chunk(c, strategy, r, s, h, *a, sim))
                    .collect()
            });
            reports.extend(cell_reports);
            if let Some(sks) = cell_skeletons {
                skeletons.extend(sks);
            }
        }
    }
    skel_out.flush()?;
    if let Some(w) = recon_out.as_mut() {
        w.flush()?;
    }

    write_metrics(&dir.join(METRICS_FILE), &reports)?;
    let summaries = aggregate(&reports);
    report::write_summary(&dir.join(SUMMARY_FILE), &summaries)?;

    let mut files = BTreeMap::new();
    for (k, v) in [
        ("skeletons", SKELETONS_FILE),
        ("metrics", METRICS_FILE),
        ("summary", SUMMARY_FILE),
    ] {
        files.insert(k.to_string(), v.to_string());
    }
    if res.client.is_some() {
        files.insert("reconstructions".into(), RECONSTRUCTIONS_FILE.into());
    }
    let record = RunRecord {
        config_hash: hash,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        files,
        chunks: chunks.len(),
        cells: cfg.strategies.len() * cfg.r_grid.len(),
        skeletons: skeletons.len(),
        decoder_failures: failures,
        rejected,
        excluded,
        encoder_latency: timings
            .into_values()
            .filter_map(|(s, samples)| latency_stats(s, &samples))
            .collect(),
        metadata_overhead: metadata_overhead(&skeletons),
    };
    fs::write(dir.join(RUN_FILE), serde_json::to_string_pretty(&record)? + "\n")?;
    Ok(SweepOutcome {
        dir,
        record,
        skeletons,
        reports,
        summaries,
    })
}
