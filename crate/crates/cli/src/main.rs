use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tscodec::backends::BackendId;
use tscodec::harness::{
    ablate, emit_ablation, emit_report, run_matrix, MatrixOptions, ReportFormat, ReportMeta,
    RunOptions,
};
use tscodec::ingest::{load_csv, write_csv, ColumnSelector, CsvOptions, HeaderMode, MissingPolicy};
use tscodec::metrics::{entropy_and_limit, size_metrics};
use tscodec::pipeline::original_bytes;
use tscodec::transforms::chain_apply;
use tscodec::{
    decompress, generate, Case, CoderId, CoderSpec, Dataset, Pipeline, SynthSpec, TransformChain,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_BACKEND: u8 = 3;

/// Lossless compression and benchmarking for integer time series.
#[derive(Parser)]
#[command(name = "tsc", version)]
struct Cli {
    /// Directory searched for relative input paths that do not exist as given.
    #[arg(long, global = true, env = "TSC_DATA_DIR")]
    data_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress CSV columns into a container file.
    Compress(CompressArgs),
    /// Decode a container back to CSV.
    Decompress(DecompressArgs),
    /// Run a dataset x chain x coder benchmark matrix.
    Bench(BenchArgs),
    /// Cardinality and AAD of each dataset under progressively applied transforms.
    Ablate(AblateArgs),
    /// Write a synthetic test signal as CSV.
    Synth(SynthArgs),
    /// Cardinality, AAD, entropy and Shannon-limit score per channel.
    Stats(StatsArgs),
}

#[derive(Args)]
struct CsvArgs {
    /// Columns to read, by zero-based index or header name. Default: all.
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,

    /// Header row: auto, yes or no.
    #[arg(long, default_value = "auto", value_parser = parse_header)]
    header: HeaderMode,

    /// Missing cells: drop-row or error.
    #[arg(long, default_value = "drop-row", value_parser = parse_missing)]
    missing: MissingPolicy,
}

impl CsvArgs {
    fn options(&self) -> Result<CsvOptions> {
        let columns = self
            .columns
            .iter()
            .map(|c| c.parse::<ColumnSelector>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CsvOptions {
            columns,
            header: self.header,
            missing: self.missing,
        })
    }
}

#[derive(Args)]
struct CompressArgs {
    input: PathBuf,

    /// Output container. Default: input with a `.tsc` extension.
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Transform chain, e.g. `delta,rle0,quars` or `none`.
    #[arg(short, long, default_value = "delta,rle0", value_parser = parse_chain)]
    transforms: TransformChain,

    /// Coder: expgolomb, bitpack, huffman, drh, range, lzss or a backend name.
    #[arg(short, long, default_value = "huffman", value_parser = parse_coder)]
    coder: CoderSpec,

    /// Backend compression level.
    #[arg(short, long)]
    level: Option<i32>,

    #[command(flatten)]
    csv: CsvArgs,
}

#[derive(Args)]
struct DecompressArgs {
    input: PathBuf,

    /// Output CSV. Default: standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SourceArgs {
    /// Include the synthetic test cases.
    #[arg(long)]
    synthetic: bool,

    /// Synthetic cases to include (implies --synthetic): `all` or a list.
    #[arg(long, value_delimiter = ',')]
    cases: Vec<String>,

    /// Length of synthetic series.
    #[arg(long, default_value_t = SynthSpec::DEFAULT_N)]
    n: usize,

    /// Seed for synthetic series.
    #[arg(long, default_value_t = SynthSpec::DEFAULT_SEED)]
    seed: u64,

    /// CSV files, one dataset each.
    inputs: Vec<PathBuf>,

    #[command(flatten)]
    csv: CsvArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Chains, comma separated, each written with `+` (`none,d,d+r,d+r+q`).
    #[arg(long, value_delimiter = ',', default_value = "none,d,d+r,d+r+q", value_parser = parse_chain)]
    chains: Vec<TransformChain>,

    /// Coders: names with optional `:level`, or all-internal, all-backends, all.
    #[arg(long, value_delimiter = ',', default_value = "all-internal")]
    coders: Vec<String>,

    /// Level sweep per backend, e.g. `zstd=1:3:19` (repeatable).
    #[arg(long)]
    levels: Vec<String>,

    /// Timing repetitions; the best run counts.
    #[arg(long, default_value_t = 3)]
    repetitions: usize,

    /// Worker threads for the matrix.
    #[arg(long)]
    threads: Option<usize>,

    /// csv, markdown or json.
    #[arg(long, default_value = "markdown", value_parser = parse_format)]
    format: ReportFormat,

    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    source: SourceArgs,

    #[arg(long, value_delimiter = ',', default_value = "none,d,d+r,d+r+q", value_parser = parse_chain)]
    chains: Vec<TransformChain>,

    #[arg(long, default_value = "markdown", value_parser = parse_format)]
    format: ReportFormat,

    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_parser = parse_case)]
    case: Case,

    #[arg(long, default_value_t = SynthSpec::DEFAULT_SEED)]
    seed: u64,

    #[arg(long, default_value_t = SynthSpec::DEFAULT_N)]
    n: usize,

    #[arg(long)]
    amplitude: Option<f64>,

    #[arg(long)]
    period: Option<f64>,

    /// Half-range of the uniform noise.
    #[arg(long)]
    noise: Option<i32>,

    /// Mean dwell time of the switching signal.
    #[arg(long)]
    dwell: Option<f64>,

    /// Output CSV. Default: standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Apply this chain before measuring.
    #[arg(long, default_value = "none", value_parser = parse_chain)]
    transforms: TransformChain,
}

fn parse_chain(s: &str) -> Result<TransformChain, String> {
    s.parse().map_err(|e: tscodec::Error| {
        format!("{e} (transforms: delta|d, rle0|r, quars[:bins]|q; or none)")
    })
}

fn coder_names() -> String {
    CoderId::INTERNAL
        .iter()
        .map(|c| c.name())
        .chain(BackendId::ALL.iter().map(|b| b.name()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_coder(s: &str) -> Result<CoderSpec, String> {
    s.parse()
        .map_err(|e: tscodec::Error| format!("{e} (valid: {})", coder_names()))
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: tscodec::Error| e.to_string())
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse().map_err(|e: tscodec::Error| e.to_string())
}

fn parse_header(s: &str) -> Result<HeaderMode, String> {
    match s {
        "auto" => Ok(HeaderMode::Auto),
        "yes" | "true" => Ok(HeaderMode::Present),
        "no" | "false" => Ok(HeaderMode::Absent),
        other => Err(format!("header mode {other:?} (valid: auto, yes, no)")),
    }
}

fn parse_missing(s: &str) -> Result<MissingPolicy, String> {
    s.parse().map_err(|e: tscodec::Error| e.to_string())
}

struct Ctx {
    data_dir: Option<PathBuf>,
}

impl Ctx {
    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.data_dir {
            Some(dir) if p.is_relative() && !p.exists() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn expand_coders(items: &[String]) -> Result<Vec<CoderSpec>> {
    let mut out = Vec::new();
    for item in items {
        match item.trim() {
            "all-internal" => out.extend(CoderSpec::internal_all()),
            "all-backends" => out.extend(
                BackendId::available()
                    .into_iter()
                    .map(|b| CoderSpec::new(CoderId::Backend(b))),
            ),
            "all" => {
                out.extend(CoderSpec::internal_all());
                out.extend(
                    BackendId::ALL
                        .iter()
                        .map(|&b| CoderSpec::new(CoderId::Backend(b))),
                );
            }
            other => out.push(
                other
                    .parse::<CoderSpec>()
                    .with_context(|| format!("coder {other:?} (valid: {})", coder_names()))?,
            ),
        }
    }
    Ok(out)
}

fn parse_levels(items: &[String]) -> Result<BTreeMap<BackendId, Vec<i32>>> {
    let mut map = BTreeMap::new();
    for item in items {
        let (name, levels) = item.split_once('=').ok_or_else(|| {
            tscodec::Error::InvalidParameter(format!(
                "level sweep {item:?} must look like zstd=1:3:19"
            ))
        })?;
        let backend: BackendId = name.parse()?;
        let levels = levels
            .split([':', ','])
            .map(|l| {
                l.trim().parse::<i32>().map_err(|_| {
                    tscodec::Error::InvalidParameter(format!("level {l:?} in {item:?}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        map.insert(backend, levels);
    }
    Ok(map)
}

impl SourceArgs {
    fn has_synthetic(&self) -> bool {
        self.synthetic || !self.cases.is_empty()
    }
}

fn datasets(ctx: &Ctx, src: &SourceArgs) -> Result<Vec<Dataset>> {
    let mut out = Vec::new();
    let cases: Vec<Case> =
        if src.cases.iter().any(|c| c == "all") || (src.synthetic && src.cases.is_empty()) {
            Case::ALL.to_vec()
        } else {
            src.cases
                .iter()
                .map(|c| c.parse::<Case>())
                .collect::<Result<_, _>>()?
        };
    for case in cases {
        let spec = SynthSpec::new(case).with_len(src.n).with_seed(src.seed);
        out.push(Dataset::from_channels(case.name(), vec![generate(&spec)?]));
    }
    let opts = src.csv.options()?;
    for p in &src.inputs {
        let path = ctx.resolve(p);
        let ds = load_csv(&path, &opts).with_context(|| format!("loading {}", path.display()))?;
        if ds.dropped_rows > 0 {
            eprintln!(
                "{}: dropped {} rows with missing values",
                ds.name, ds.dropped_rows
            );
        }
        out.push(ds);
    }
    if out.is_empty() {
        bail!(tscodec::Error::EmptyAxis(
            "datasets (give --synthetic, --cases or input files)"
        ));
    }
    Ok(out)
}

fn cmd_compress(ctx: &Ctx, a: &CompressArgs) -> Result<()> {
    let input = ctx.resolve(&a.input);
    let ds = load_csv(&input, &a.csv.options()?)
        .with_context(|| format!("loading {}", input.display()))?;
    if ds.dropped_rows > 0 {
        eprintln!("dropped {} rows with missing values", ds.dropped_rows);
    }
    let mut coder = a.coder;
    if let Some(l) = a.level {
        if coder.coder.is_internal() {
            bail!(tscodec::Error::InvalidParameter(format!(
                "{} does not take a level",
                coder.coder
            )));
        }
        coder.level = Some(l);
    }
    let packed = Pipeline::new(a.transforms.clone(), coder).compress(&ds.channels)?;
    let out = a
        .output
        .clone()
        .unwrap_or_else(|| input.with_extension("tsc"));
    fs::write(&out, &packed.bytes).with_context(|| format!("writing {}", out.display()))?;
    let report = size_metrics::<f64>(
        original_bytes(&ds.channels).max(1),
        packed.bytes.len() as u64,
    )?;
    println!(
        "{} -> {}: {} channels, original {} bytes, compressed {} bytes (payload {}, headers {}), CR {:.3}, CS {:.4}",
        input.display(),
        out.display(),
        ds.channels.len(),
        report.original_bytes,
        report.compressed_bytes,
        packed.payload_bytes,
        packed.model_header_bytes + packed.framing_bytes,
        report.cr,
        report.cs
    );
    Ok(())
}

fn cmd_decompress(ctx: &Ctx, a: &DecompressArgs) -> Result<()> {
    let input = ctx.resolve(&a.input);
    let bytes = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
    let channels = decompress(&bytes)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &channels, &[])?;
    write_out(a.output.as_deref(), &buf)
}

fn cmd_bench(ctx: &Ctx, a: &BenchArgs) -> Result<()> {
    let sets = datasets(ctx, &a.source)?;
    let coders = expand_coders(&a.coders)?;
    let opts = MatrixOptions {
        run: RunOptions {
            repetitions: a.repetitions,
        },
        levels: parse_levels(&a.levels)?,
        threads: a.threads,
        ablation: false,
    };
    let result = run_matrix(&sets, &a.chains, &coders, &opts)?;
    for f in &result.failures {
        eprintln!(
            "failed: {} {} {}: {}",
            f.cell.dataset, f.cell.chain, f.cell.method, f.message
        );
    }
    let mut meta = ReportMeta::new(
        a.source.has_synthetic().then_some(a.source.seed),
        a.repetitions,
    );
    meta.unavailable = result
        .unavailable
        .iter()
        .map(|c| format!("{} {} {}", c.dataset, c.chain, c.method))
        .collect();
    if !result.unavailable.is_empty() {
        eprintln!(
            "{} cells skipped: backend unavailable",
            result.unavailable.len()
        );
    }
    if result.records.is_empty() {
        if let Some(cell) = result.unavailable.first() {
            if let Ok(CoderSpec {
                coder: CoderId::Backend(b),
                ..
            }) = cell.method.parse()
            {
                bail!(tscodec::Error::BackendUnavailable(b));
            }
        }
        bail!("no benchmark cell succeeded");
    }
    write_out(
        a.output.as_deref(),
        &emit_report(&result.records, a.format, &meta)?,
    )?;
    if !result.failures.is_empty() {
        bail!("{} benchmark cells failed", result.failures.len());
    }
    Ok(())
}

fn cmd_ablate(ctx: &Ctx, a: &AblateArgs) -> Result<()> {
    let sets = datasets(ctx, &a.source)?;
    if a.chains.is_empty() {
        bail!(tscodec::Error::EmptyAxis("chains"));
    }
    let rows = sets
        .iter()
        .map(|d| ablate(d, &a.chains))
        .collect::<tscodec::Result<Vec<_>>>()?;
    write_out(a.output.as_deref(), &emit_ablation(&rows, a.format)?)
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let mut spec = SynthSpec::new(a.case).with_len(a.n).with_seed(a.seed);
    if let Some(v) = a.amplitude {
        spec.amplitude = v;
    }
    if let Some(v) = a.period {
        spec.period = v;
    }
    if let Some(v) = a.noise {
        spec.noise_half_range = v;
    }
    if let Some(v) = a.dwell {
        spec.mean_dwell = v;
    }
    let series = generate(&spec)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &[series], &[])?;
    write_out(a.output.as_deref(), &buf)
}

fn cmd_stats(ctx: &Ctx, a: &StatsArgs) -> Result<()> {
    let sets = datasets(ctx, &a.source)?;
    println!("dataset,channel,chain,n,cardinality,aad,entropy_bits,shannon_cs");
    for d in &sets {
        for (i, ch) in d.channels.iter().enumerate() {
            if ch.is_empty() {
                continue;
            }
            let (tokens, _) = chain_apply(ch, &a.transforms)?;
            let s = entropy_and_limit::<f64>(&tokens)?;
            println!(
                "{},{},{},{},{},{:.4},{:.4},{:.4}",
                d.name,
                i,
                a.transforms.label(),
                s.n,
                s.cardinality,
                s.aad,
                s.entropy_bits,
                s.shannon_cs
            );
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use tscodec::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::BackendUnavailable(_) => EXIT_BACKEND,
                E::UnregisteredBackend(_)
                | E::InvalidChain(_)
                | E::InvalidParameter(_)
                | E::UnknownFormat(_)
                | E::EmptyAxis(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            };
        }
    }
    EXIT_DATA
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let ctx = Ctx {
        data_dir: cli.data_dir,
    };
    let res = match &cli.command {
        Command::Compress(a) => cmd_compress(&ctx, a),
        Command::Decompress(a) => cmd_decompress(&ctx, a),
        Command::Bench(a) => cmd_bench(&ctx, a),
        Command::Ablate(a) => cmd_ablate(&ctx, a),
        Command::Synth(a) => cmd_synth(a),
        Command::Stats(a) => cmd_stats(&ctx, a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
