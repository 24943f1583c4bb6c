//! Benchmark matrix runner and transform ablation.

mod report;

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{
    emit_ablation, emit_report, parse_plot_data, ChainLine, MethodPoint, PlotData, ReportFormat,
    ReportMeta, ScorePoint,
};

use crate::backends::BackendId;
use crate::coders::{Coder, CoderId, CoderSpec};
use crate::container::Container;
use crate::error::{Error, Result};
use crate::ingest::Dataset;
use crate::metrics::{entropy_and_limit, size_metrics, speed_mb_s, SeriesStats};
use crate::pipeline::{compress_with, decode_container, original_bytes, Compressed};
use crate::series::TimeSeries;
use crate::transforms::{chain_apply, TransformChain};

pub const DEFAULT_REPETITIONS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub chain: String,
    pub method: String,
    pub level: Option<i32>,
    pub original_bytes: u64,
    /// Everything needed to decode: payload, model headers, side headers and
    /// container framing.
    pub compressed_bytes: u64,
    /// Coder output without any header.
    pub payload_bytes: u64,
    pub header_bytes: u64,
    pub cr: f64,
    pub cs: f64,
    pub compress_seconds: f64,
    pub decompress_seconds: f64,
    pub speed_mb_s: f64,
    pub decompress_speed_mb_s: f64,
    pub roundtrip_ok: bool,
    pub repetitions: usize,
    pub timer_resolution_ns: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Timings are the best of this many runs.
    pub repetitions: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            repetitions: DEFAULT_REPETITIONS,
        }
    }
}

/// Smallest observable step of the wall clock, measured once.
pub fn timer_resolution() -> Duration {
    static RES: OnceLock<Duration> = OnceLock::new();
    *RES.get_or_init(|| {
        let mut best = Duration::MAX;
        for _ in 0..200 {
            let t0 = Instant::now();
            let mut t1 = Instant::now();
            while t1 == t0 {
                t1 = Instant::now();
            }
            best = best.min(t1 - t0);
        }
        best
    })
}

fn first_mismatch(a: &[TimeSeries], b: &[TimeSeries]) -> Option<(usize, usize)> {
    if a.len() != b.len() {
        return Some((a.len().min(b.len()), 0));
    }
    a.iter().zip(b).enumerate().find_map(|(ch, (x, y))| {
        if x.samples == y.samples {
            return None;
        }
        let idx = x
            .iter()
            .zip(y.iter())
            .position(|(p, q)| p != q)
            .unwrap_or(x.len().min(y.len()));
        Some((ch, idx))
    })
}

/// Runs one cell with the coder built from `spec`.
pub fn run_job(
    dataset: &Dataset,
    chain: &TransformChain,
    spec: &CoderSpec,
    opts: &RunOptions,
) -> Result<BenchRecord> {
    if let CoderId::Backend(b) = spec.coder {
        if !b.is_available() {
            return Err(Error::BackendUnavailable(b));
        }
    }
    let coder = spec.build();
    let mut rec = run_job_with(dataset, chain, coder.as_ref(), opts)?;
    rec.method = spec.label();
    rec.level = spec.effective_level();
    Ok(rec)
}

/// Runs one cell with an explicit coder. Compression time covers the
/// transforms, the coder and container assembly; decompression time covers
/// parsing, decoding and inverting the transforms.
pub fn run_job_with(
    dataset: &Dataset,
    chain: &TransformChain,
    coder: &dyn Coder,
    opts: &RunOptions,
) -> Result<BenchRecord> {
    let reps = opts.repetitions.max(1);
    let original = original_bytes(&dataset.channels);

    let mut compressed: Option<Compressed> = None;
    let mut best_c = Duration::MAX;
    for _ in 0..reps {
        let t0 = Instant::now();
        let c = compress_with(&dataset.channels, chain, coder)?;
        best_c = best_c.min(t0.elapsed());
        compressed = Some(c);
    }
    let compressed = compressed.expect("at least one repetition");

    let mut decoded = Vec::new();
    let mut best_d = Duration::MAX;
    for _ in 0..reps {
        let t0 = Instant::now();
        let container = Container::from_bytes(&compressed.bytes)?;
        decoded = decode_container(&container, coder)?;
        best_d = best_d.min(t0.elapsed());
    }
    if let Some((channel, index)) = first_mismatch(&dataset.channels, &decoded) {
        return Err(Error::RoundTripMismatch { channel, index });
    }

    let total = compressed.bytes.len() as u64;
    let size = size_metrics::<f64>(original.max(1), total)?;
    // A zero reading means "faster than the clock can tell".
    let res = timer_resolution();
    let cs_secs = best_c.max(res).as_secs_f64();
    let ds_secs = best_d.max(res).as_secs_f64();
    Ok(BenchRecord {
        dataset: dataset.name.clone(),
        chain: chain.label(),
        method: coder.id().to_string(),
        level: None,
        original_bytes: original,
        compressed_bytes: total,
        payload_bytes: compressed.payload_bytes,
        header_bytes: compressed.model_header_bytes + compressed.framing_bytes,
        cr: size.cr,
        cs: size.cs,
        compress_seconds: cs_secs,
        decompress_seconds: ds_secs,
        speed_mb_s: speed_mb_s(original, cs_secs),
        decompress_speed_mb_s: speed_mb_s(original, ds_secs),
        roundtrip_ok: true,
        repetitions: reps,
        timer_resolution_ns: res.as_nanos() as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationCell {
    pub chain: String,
    pub stats: SeriesStats<f64>,
}

/// Token statistics of one dataset under each chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub dataset: String,
    pub cells: Vec<AblationCell>,
}

impl AblationRow {
    pub fn get(&self, chain: &str) -> Option<&SeriesStats<f64>> {
        self.cells
            .iter()
            .find(|c| c.chain == chain)
            .map(|c| &c.stats)
    }
}

/// Applies each chain to every channel and measures the concatenated token
/// streams.
pub fn ablate(dataset: &Dataset, chains: &[TransformChain]) -> Result<AblationRow> {
    let cells = chains
        .iter()
        .map(|chain| {
            let mut tokens = Vec::new();
            for ch in dataset.channels.iter().filter(|c| !c.is_empty()) {
                tokens.extend(chain_apply(ch, chain)?.0);
            }
            Ok(AblationCell {
                chain: chain.label(),
                stats: entropy_and_limit(&tokens)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AblationRow {
        dataset: dataset.name.clone(),
        cells,
    })
}

#[derive(Debug, Clone, Default)]
pub struct MatrixOptions {
    pub run: RunOptions,
    /// Levels to sweep per backend. A backend listed here runs once per level
    /// unless the coder list already pins a level.
    pub levels: BTreeMap<BackendId, Vec<i32>>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub ablation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub dataset: String,
    pub chain: String,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub cell: Cell,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixResult {
    pub records: Vec<BenchRecord>,
    pub ablation: Vec<AblationRow>,
    /// Cells whose backend is not compiled in or not installed.
    pub unavailable: Vec<Cell>,
    pub failures: Vec<Failure>,
}

fn expand_levels(coders: &[CoderSpec], levels: &BTreeMap<BackendId, Vec<i32>>) -> Vec<CoderSpec> {
    let mut out = Vec::new();
    for spec in coders {
        match (spec.coder, spec.level) {
            (CoderId::Backend(b), None) if levels.get(&b).is_some_and(|l| !l.is_empty()) => {
                out.extend(
                    levels[&b]
                        .iter()
                        .map(|&l| CoderSpec::with_level(spec.coder, l)),
                );
            }
            _ => out.push(*spec),
        }
    }
    out
}

enum Outcome {
    Done(BenchRecord),
    Unavailable(Cell),
    Failed(Failure),
}

/// Runs the full cross product. Cells execute in parallel, results come back
/// in (dataset, chain, coder) order, and failing cells are collected rather
/// than aborting the run.
pub fn run_matrix(
    datasets: &[Dataset],
    chains: &[TransformChain],
    coders: &[CoderSpec],
    opts: &MatrixOptions,
) -> Result<MatrixResult> {
    if datasets.is_empty() {
        return Err(Error::EmptyAxis("datasets"));
    }
    if chains.is_empty() {
        return Err(Error::EmptyAxis("chains"));
    }
    if coders.is_empty() {
        return Err(Error::EmptyAxis("coders"));
    }
    let coders = expand_levels(coders, &opts.levels);
    let mut cells = Vec::with_capacity(datasets.len() * chains.len() * coders.len());
    for d in datasets {
        for c in chains {
            for k in &coders {
                cells.push((d, c, *k));
            }
        }
    }

    let work = || -> (Vec<Outcome>, Vec<Result<AblationRow>>) {
        let outcomes = cells
            .par_iter()
            .map(|&(d, chain, spec)| {
                let cell = Cell {
                    dataset: d.name.clone(),
                    chain: chain.label(),
                    method: spec.label(),
                };
                match run_job(d, chain, &spec, &opts.run) {
                    Ok(r) => Outcome::Done(r),
                    Err(Error::BackendUnavailable(_)) => Outcome::Unavailable(cell),
                    Err(e) => Outcome::Failed(Failure {
                        cell,
                        message: e.to_string(),
                    }),
                }
            })
            .collect();
        let ablation = if opts.ablation {
            datasets.par_iter().map(|d| ablate(d, chains)).collect()
        } else {
            Vec::new()
        };
        (outcomes, ablation)
    };
    let (outcomes, ablation) = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(work),
        None => work(),
    };

    let mut result = MatrixResult::default();
    for o in outcomes {
        match o {
            Outcome::Done(r) => result.records.push(r),
            Outcome::Unavailable(c) => result.unavailable.push(c),
            Outcome::Failed(f) => result.failures.push(f),
        }
    }
    for (d, row) in datasets.iter().zip(ablation) {
        match row {
            Ok(r) => result.ablation.push(r),
            Err(e) => result.failures.push(Failure {
                cell: Cell {
                    dataset: d.name.clone(),
                    chain: String::new(),
                    method: "ablation".into(),
                },
                message: e.to_string(),
            }),
        }
    }
    Ok(result)
}
