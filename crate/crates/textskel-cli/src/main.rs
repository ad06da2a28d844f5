use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;

use textskel::allocation::{calibrate, Provenance};
use textskel::corpus::{ingest_corpus, DEFAULT_MAX_CHUNK};
use textskel::decoder::{ReconstructionRequest, TemplateKind, DEFAULT_API_KEY_HEADER};
use textskel::frequency::{classify, BucketScheme, SchemeMode};
use textskel::harness::{
    self, cascaded_ratio, check_startup, emit_report, encode, estimate_original_len, lossless_baseline,
    measure_encoder_latency, parse_r_grid, read_skeletons, run_sweep, write_metrics, DecoderOptions,
    HarnessError, LatencyPlan, ReconstructionRecord, Resources, SimilaritySource, SurprisalSource, SweepConfig,
    ZlibCodec, DEFAULT_R_GRID,
};
use textskel::metrics::{aggregate, evaluate_chunk, ExactMatch, MetricReport, SimilarityProvider};
use textskel::semantic::tertile_profile;
use textskel::strategies::{Skeleton, StrategyId};
use textskel::text::{tokenize, Lang};

const API_KEY_ENV: &str = "TEXTSKEL_API_KEY";

/// Exit status when a run finished but hit too many decoder failures.
const EXIT_FAILURES: u8 = 1;
/// Exit status for startup and I/O errors.
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "textskel", version, about = "Rate-controlled text skeleton compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a corpus into skeletons at one retention rate.
    Compress(CompressArgs),
    /// Reconstruct skeletons with a decoder.
    Reconstruct(ReconstructArgs),
    /// Score skeletons or reconstructions against their source chunks.
    Evaluate(EvaluateArgs),
    /// Run strategies over a retention grid and persist every artifact.
    Sweep(SweepArgs),
    /// Measure per-bucket full-deletion similarity.
    Calibrate(CalibrateArgs),
    /// Time encoders on a corpus.
    Latency(LatencyArgs),
    /// Compare against a lossless codec.
    Lossless(LosslessArgs),
    /// Turn a summary CSV into markdown tables and plot series.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct ResourceArgs {
    /// Frequency bucket scheme for opt and the LP variants.
    #[arg(long, default_value = "6", value_parser = parse_buckets)]
    buckets: SchemeMode,
    #[arg(long)]
    freq_table: Option<PathBuf>,
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Calibration table for the surprisal-tertile scheme.
    #[arg(long)]
    tertile_calibration: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["surprisal_cmd", "surprisal_fallback"])]
    surprisal_file: Option<PathBuf>,
    /// Command reading `{"id","tokens"}` lines and answering `{"surprisal":[...]}`.
    #[arg(long, conflicts_with = "surprisal_fallback")]
    surprisal_cmd: Option<String>,
    #[arg(long, value_parser = ["unigram"])]
    surprisal_fallback: Option<String>,
}

impl ResourceArgs {
    fn surprisal(&self) -> Option<SurprisalSource> {
        if let Some(p) = &self.surprisal_file {
            Some(SurprisalSource::File(p.clone()))
        } else if let Some(c) = &self.surprisal_cmd {
            Some(SurprisalSource::Command(c.clone()))
        } else {
            self.surprisal_fallback.as_ref().map(|_| SurprisalSource::Unigram)
        }
    }
}

#[derive(Args, Clone, Default)]
struct SimilarityArgs {
    /// Command reading `{"ref","hyp"}` lines and answering `{"score":f}`.
    #[arg(long, conflicts_with = "similarity_exact")]
    similarity_cmd: Option<String>,
    /// Use the LCS-based exact-match similarity.
    #[arg(long)]
    similarity_exact: bool,
}

impl SimilarityArgs {
    fn source(&self) -> Option<SimilaritySource> {
        match (&self.similarity_cmd, self.similarity_exact) {
            (Some(c), _) => Some(SimilaritySource::Command(c.clone())),
            (None, true) => Some(SimilaritySource::ExactMatch),
            (None, false) => None,
        }
    }
}

#[derive(Args, Clone)]
struct DecoderArgs {
    /// `http(s)://` URL or `mock:<kind>`.
    #[arg(long)]
    decoder_endpoint: Option<String>,
    #[arg(long, default_value_t = 3)]
    max_retries: u32,
    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,
    #[arg(long, default_value = DEFAULT_API_KEY_HEADER)]
    api_key_header: String,
    #[arg(long, default_value_t = 4)]
    max_in_flight: usize,
    /// Prompt template file overriding the built-in one.
    #[arg(long)]
    template: Option<PathBuf>,
}

impl DecoderArgs {
    fn options(&self) -> DecoderOptions {
        DecoderOptions {
            timeout: Duration::from_secs(self.timeout_secs),
            api_key: std::env::var(API_KEY_ENV)
                .ok()
                .filter(|k| !k.is_empty())
                .map(|k| (self.api_key_header.clone(), k)),
            max_in_flight: self.max_in_flight.max(1),
            template: self.template.clone(),
        }
    }
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_parser = parse_strategy)]
    strategy: StrategyId,
    #[arg(long)]
    rkeep: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_CHUNK)]
    max_chunk: usize,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Skeleton JSONL; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    skeletons: PathBuf,
    #[arg(long, default_value = "english", value_parser = parse_lang)]
    lang: Lang,
    #[command(flatten)]
    decoder: DecoderArgs,
    #[arg(long, default_value_t = 1)]
    max_failures: usize,
    /// Reconstruction JSONL; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_CHUNK)]
    max_chunk: usize,
    #[arg(long)]
    skeletons: PathBuf,
    /// Reconstructions to score instead of the skeletons themselves.
    #[arg(long)]
    reconstructions: Option<PathBuf>,
    #[command(flatten)]
    similarity: SimilarityArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep configuration; other flags are ignored except `--out`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Comma-separated strategy names.
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy)]
    strategies: Vec<StrategyId>,
    #[arg(long, default_value = DEFAULT_R_GRID)]
    rkeep_grid: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_CHUNK)]
    max_chunk: usize,
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    similarity: SimilarityArgs,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Exit non-zero once this many chunk reconstructions fail.
    #[arg(long, default_value_t = 1)]
    max_failures: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_CHUNK)]
    max_chunk: usize,
    /// `3`, `6` or `tertile`.
    #[arg(long)]
    buckets: SchemeMode,
    #[arg(long)]
    freq_table: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["surprisal_cmd", "surprisal_fallback"])]
    surprisal_file: Option<PathBuf>,
    #[arg(long, conflicts_with = "surprisal_fallback")]
    surprisal_cmd: Option<String>,
    #[arg(long, value_parser = ["unigram"])]
    surprisal_fallback: Option<String>,
    #[command(flatten)]
    similarity: SimilarityArgs,
    #[command(flatten)]
    decoder: DecoderArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LatencyArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_CHUNK)]
    max_chunk: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy, required = true)]
    strategies: Vec<StrategyId>,
    #[arg(long, default_value_t = 0.5)]
    rkeep: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    warmup: usize,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[command(flatten)]
    resources: ResourceArgs,
    /// JSON result; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LosslessArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_CHUNK)]
    max_chunk: usize,
    /// Skeletons to compress after encoding, for cascaded ratios.
    #[arg(long)]
    skeletons: Option<PathBuf>,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(0..=9))]
    level: u32,
    /// JSON result; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    summary: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_strategy(s: &str) -> Result<StrategyId, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_buckets(s: &str) -> Result<SchemeMode, String> {
    match s.parse()? {
        SchemeMode::Tertile => Err("--buckets accepts 3 or 6 here".into()),
        m => Ok(m),
    }
}

fn parse_lang(s: &str) -> Result<Lang, String> {
    match s {
        "english" | "en" => Ok(Lang::English),
        "presegmented" => Ok(Lang::Presegmented),
        other => Err(format!("unknown language `{other}`")),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_jsonl<T: Serialize>(w: &mut dyn Write, rows: &[T]) -> Result<()> {
    for r in rows {
        serde_json::to_writer(&mut *w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn base_config(corpus: &Path, max_chunk: usize, resources: &ResourceArgs) -> SweepConfig {
    let mut cfg = SweepConfig::new(Vec::new(), corpus, PathBuf::new());
    cfg.max_chunk = max_chunk;
    cfg.buckets = resources.buckets;
    cfg.freq_table = resources.freq_table.clone();
    cfg.calibration = resources.calibration.clone();
    cfg.tertile_calibration = resources.tertile_calibration.clone();
    cfg.surprisal = resources.surprisal();
    cfg
}

fn compress(args: CompressArgs) -> Result<u8> {
    let mut cfg = base_config(&args.corpus, args.max_chunk, &args.resources);
    cfg.strategies = vec![args.strategy];
    cfg.r_grid = vec![args.rkeep];
    if args.strategy == StrategyId::Summarize {
        bail!("summarize produces no skeleton; use sweep with --decoder-endpoint");
    }
    let res = Resources::load(&cfg, &DecoderOptions::default())?;
    check_startup(&cfg, &res)?;
    let chunks = ingest_corpus(&cfg.corpus, cfg.max_chunk)?;
    let skeletons = chunks
        .iter()
        .map(|c| {
            encode(c, args.strategy, args.rkeep, args.seed, &res.ctx).map_err(|e| HarnessError::Encode {
                strategy: args.strategy,
                chunk: c.id().to_string(),
                source: e,
            })
        })
        .collect::<Result<Vec<Skeleton>, _>>()?;
    write_jsonl(&mut *output(args.out.as_deref())?, &skeletons)?;
    Ok(0)
}

fn reconstruct(args: ReconstructArgs) -> Result<u8> {
    let endpoint = args
        .decoder
        .decoder_endpoint
        .clone()
        .ok_or_else(|| anyhow!("reconstruct needs --decoder-endpoint"))?;
    let skeletons = read_skeletons(&args.skeletons)?;
    let mut cfg = SweepConfig::new(Vec::new(), PathBuf::new(), PathBuf::new());
    cfg.decoder_endpoint = Some(endpoint);
    cfg.max_retries = args.decoder.max_retries;
    let res = Resources::load(&cfg, &args.decoder.options())?;
    let client = res.client.expect("endpoint was set");
    let requests: Vec<ReconstructionRequest> = skeletons
        .iter()
        .map(|s| ReconstructionRequest {
            id: s.id.clone(),
            skeleton: s.skeleton.clone(),
            original_len_estimate: estimate_original_len(s.kept(), s.r_keep),
            lang: args.lang,
            template: TemplateKind::Reconstruct,
            strategy: Some(s.strategy),
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = 0;
    for (s, out) in skeletons.iter().zip(client.reconstruct_many(&requests)) {
        match out {
            Ok(o) => records.push(ReconstructionRecord {
                id: o.id,
                strategy: s.strategy,
                r_keep: s.r_keep,
                text: o.text,
                attempts: o.attempts,
                accepted: o.accepted,
                latency_ms: o.latency_ms,
            }),
            Err(e) => {
                warn!("{}: {e}", s.id);
                failures += 1;
            }
        }
    }
    write_jsonl(&mut *output(args.out.as_deref())?, &records)?;
    Ok(failure_status(failures, args.max_failures))
}

fn failure_status(failures: usize, max_failures: usize) -> u8 {
    if failures >= max_failures.max(1) {
        eprintln!("{failures} reconstruction(s) failed");
        EXIT_FAILURES
    } else {
        0
    }
}

fn read_reconstructions(path: &Path) -> Result<Vec<ReconstructionRecord>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
    }
    Ok(out)
}

fn cell_key(strategy: StrategyId, r_keep: f64, id: &str) -> (String, u64, String) {
    (strategy.to_string(), r_keep.to_bits(), id.to_string())
}

fn evaluate(args: EvaluateArgs) -> Result<u8> {
    let chunks = ingest_corpus(&args.corpus, args.max_chunk)?;
    let by_id: HashMap<&str, _> = chunks.iter().map(|c| (c.id(), c)).collect();
    let skeletons = read_skeletons(&args.skeletons)?;
    let recon: Option<HashMap<_, ReconstructionRecord>> = args
        .reconstructions
        .as_deref()
        .map(read_reconstructions)
        .transpose()?
        .map(|rs| rs.into_iter().map(|r| (cell_key(r.strategy, r.r_keep, &r.id), r)).collect());
    let sim: Option<Box<dyn SimilarityProvider>> = match args.similarity.source() {
        None => None,
        Some(SimilaritySource::ExactMatch) => Some(Box::new(ExactMatch)),
        Some(SimilaritySource::Command(c)) => {
            Some(Box::new(textskel::metrics::ExternalProcessSimilarity::spawn(&c)?))
        }
    };
    let mut reports: Vec<MetricReport> = Vec::new();
    let mut missing = 0;
    for s in &skeletons {
        let chunk = by_id
            .get(s.id.as_str())
            .ok_or_else(|| anyhow!("skeleton `{}` has no source chunk", s.id))?;
        let (hyp, attempts) = match &recon {
            None => (s.skeleton.as_str(), None),
            Some(map) => match map.get(&cell_key(s.strategy, s.r_keep, &s.id)) {
                Some(r) => (r.text.as_str(), Some(r.attempts)),
                None => {
                    missing += 1;
                    continue;
                }
            },
        };
        reports.push(evaluate_chunk(chunk, s.strategy, s.r_keep, &s.skeleton, hyp, attempts, sim.as_deref()));
    }
    if missing > 0 {
        warn!("{missing} skeleton(s) without a reconstruction were excluded");
    }
    fs::create_dir_all(&args.out)?;
    write_metrics(&args.out.join(harness::METRICS_FILE), &reports)?;
    harness::report::write_summary(&args.out.join(harness::SUMMARY_FILE), &aggregate(&reports))?;
    Ok(0)
}

fn sweep(args: SweepArgs) -> Result<u8> {
    let cfg = match &args.config {
        Some(p) => {
            let mut cfg: SweepConfig = serde_json::from_str(&fs::read_to_string(p)?)
                .with_context(|| format!("cannot parse {}", p.display()))?;
            cfg.out_dir = args.out.clone();
            cfg
        }
        None => {
            let corpus = args.corpus.as_deref().ok_or_else(|| anyhow!("sweep needs --corpus or --config"))?;
            let mut cfg = base_config(corpus, args.max_chunk, &args.resources);
            cfg.strategies = args.strategies.clone();
            cfg.r_grid = parse_r_grid(&args.rkeep_grid)?;
            cfg.seed = args.seed;
            cfg.decoder_endpoint = args.decoder.decoder_endpoint.clone();
            cfg.max_retries = args.decoder.max_retries;
            cfg.out_dir = args.out.clone();
            cfg.similarity = args.similarity.source();
            cfg
        }
    };
    let res = Resources::load(&cfg, &args.decoder.options())?;
    let outcome = run_sweep(&cfg, &res, args.jobs)?;
    let r = &outcome.record;
    info!(
        "{} cells, {} skeletons, {} decoder failures, {} rejected",
        r.cells, r.skeletons, r.decoder_failures, r.rejected
    );
    for a in r.metadata_overhead.iter().filter(|a| !a.within_budget()) {
        warn!("metadata overhead {:.5} for {} @ {}", a.fraction, a.strategy, a.r_keep);
    }
    println!("{}", outcome.dir.display());
    Ok(failure_status(r.decoder_failures, args.max_failures))
}

fn calibrate_cmd(args: CalibrateArgs) -> Result<u8> {
    let resources = ResourceArgs {
        freq_table: args.freq_table.clone(),
        surprisal_file: args.surprisal_file.clone(),
        surprisal_cmd: args.surprisal_cmd.clone(),
        surprisal_fallback: args.surprisal_fallback.clone(),
        buckets: SchemeMode::SixClass,
        calibration: None,
        tertile_calibration: None,
    };
    let mut cfg = base_config(&args.corpus, args.max_chunk, &resources);
    cfg.buckets = SchemeMode::SixClass;
    cfg.decoder_endpoint = Some(
        args.decoder
            .decoder_endpoint
            .clone()
            .ok_or_else(|| anyhow!("calibrate needs --decoder-endpoint"))?,
    );
    cfg.max_retries = args.decoder.max_retries;
    let res = Resources::load(&cfg, &args.decoder.options())?;
    let client = res.client.as_ref().expect("endpoint was set");
    let sim: Box<dyn SimilarityProvider> = match args.similarity.source() {
        Some(SimilaritySource::Command(c)) => Box::new(textskel::metrics::ExternalProcessSimilarity::spawn(&c)?),
        Some(SimilaritySource::ExactMatch) => Box::new(ExactMatch),
        None => {
            warn!("no similarity scorer given; using exact match");
            Box::new(ExactMatch)
        }
    };
    let chunks = ingest_corpus(&cfg.corpus, cfg.max_chunk)?;
    let provenance = Provenance {
        corpus: args.corpus.display().to_string(),
        created: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_default(),
        decoder: client.decoder_name(),
        similarity: sim.name(),
        chunks: chunks.len(),
        ..Provenance::default()
    };
    let table = match args.buckets {
        SchemeMode::Tertile => {
            let provider = res
                .ctx
                .surprisal
                .clone()
                .ok_or_else(|| anyhow!("--buckets tertile needs --surprisal-file, --surprisal-cmd or --surprisal-fallback"))?;
            calibrate(
                &chunks,
                args.buckets,
                |c| {
                    let spans = tokenize(c);
                    let scores = provider.scores(c, &spans).map_err(|e| e.to_string())?;
                    Ok(tertile_profile(&spans, &scores).unit_buckets(&spans))
                },
                client,
                sim.as_ref(),
                provenance,
            )?
        }
        mode => {
            let table = res.ctx.table.clone().ok_or_else(|| anyhow!("--buckets {} needs --freq-table", mode.as_str()))?;
            let scheme = BucketScheme::new(mode);
            calibrate(
                &chunks,
                mode,
                |c| {
                    let spans = tokenize(c);
                    Ok(classify(c, &spans, &table, &scheme).unit_buckets(&spans))
                },
                client,
                sim.as_ref(),
                provenance,
            )?
        }
    };
    table.save(&args.out)?;
    Ok(0)
}

fn latency(args: LatencyArgs) -> Result<u8> {
    let mut cfg = base_config(&args.corpus, args.max_chunk, &args.resources);
    cfg.strategies = args.strategies.clone();
    let res = Resources::load(&cfg, &DecoderOptions::default())?;
    check_startup(&cfg, &res)?;
    let chunks = ingest_corpus(&cfg.corpus, cfg.max_chunk)?;
    let plan = LatencyPlan {
        r_keep: args.rkeep,
        seed: args.seed,
        warmup: args.warmup,
        iterations: args.iterations,
    };
    let stats = measure_encoder_latency(&chunks, &args.strategies, &res.ctx, plan)?;
    write_json(args.out.as_deref(), &stats)?;
    Ok(0)
}

#[derive(Serialize)]
struct LosslessOutput {
    baseline: harness::LosslessReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    cascaded: Vec<harness::CascadeRow>,
}

fn lossless(args: LosslessArgs) -> Result<u8> {
    let chunks = ingest_corpus(&args.corpus, args.max_chunk)?;
    let codec = ZlibCodec { level: args.level };
    let baseline = lossless_baseline(&chunks, &codec)?;
    let cascaded = match &args.skeletons {
        Some(p) => cascaded_ratio(&chunks, &read_skeletons(p)?, &codec)?,
        None => Vec::new(),
    };
    write_json(args.out.as_deref(), &LosslessOutput { baseline, cascaded })?;
    Ok(0)
}

fn report(args: ReportArgs) -> Result<u8> {
    for p in emit_report(&args.summary, &args.out)? {
        println!("{}", p.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compress(a) => compress(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Sweep(a) => sweep(a),
        Command::Calibrate(a) => calibrate_cmd(a),
        Command::Latency(a) => latency(a),
        Command::Lossless(a) => lossless(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
