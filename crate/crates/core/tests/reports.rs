use tscodec::coders::CoderId;
use tscodec::harness::{
    ablate, emit_ablation, emit_report, parse_plot_data, run_job, BenchRecord, ReportFormat,
    ReportMeta, RunOptions,
};
use tscodec::{generate, Case, CoderSpec, Dataset, Error, SynthSpec, TransformChain};

fn records() -> Vec<BenchRecord> {
    let opts = RunOptions { repetitions: 1 };
    let mut out = Vec::new();
    for case in [Case::Sine, Case::Switching] {
        let d = Dataset::from_channels(
            case.name(),
            vec![generate(&SynthSpec::new(case).with_len(3_000)).unwrap()],
        );
        for chain in ["", "delta"] {
            for coder in [CoderId::Huffman, CoderId::BitPack] {
                let chain: TransformChain = chain.parse().unwrap();
                out.push(run_job(&d, &chain, &CoderSpec::new(coder), &opts).unwrap());
            }
        }
    }
    out
}

fn meta() -> ReportMeta {
    ReportMeta::new(Some(42), 1)
}

#[test]
fn csv_has_metadata_header_and_one_row_per_record() {
    let recs = records();
    let out =
        String::from_utf8(emit_report(&recs[..1], ReportFormat::Csv, &meta()).unwrap()).unwrap();
    let body: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 2);
    assert!(body[0].starts_with("dataset,chain,method,level,original_bytes,compressed_bytes"));
    assert!(body[1].starts_with("sine,none,huffman,"));
    assert!(out.lines().any(|l| l == "# seed: 42"));
    assert!(out.lines().any(|l| l.starts_with("# backends: ")));

    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(out.as_bytes());
    let back: Vec<BenchRecord> = rdr.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].compressed_bytes, recs[0].compressed_bytes);
    assert_eq!(back[0].level, None);
}

#[test]
fn markdown_is_a_dataset_by_chain_table() {
    let recs = records();
    let out =
        String::from_utf8(emit_report(&recs, ReportFormat::Markdown, &meta()).unwrap()).unwrap();
    let table: Vec<&str> = out.lines().filter(|l| l.starts_with('|')).collect();
    assert_eq!(table[0], "| dataset | method | none | D |");
    assert_eq!(table[1], "|---|---|---:|---:|");
    // Two datasets by two methods.
    assert_eq!(table.len(), 6);
    assert!(table[2].starts_with("| sine | huffman | 0."));
    assert!(out.lines().any(|l| l == "- repetitions: 1"));

    // A missing cell is marked rather than dropped.
    let partial =
        String::from_utf8(emit_report(&recs[..3], ReportFormat::Markdown, &meta()).unwrap())
            .unwrap();
    assert!(partial.contains("n/a"));
}

#[test]
fn json_plot_data_roundtrips() {
    let recs = records();
    let out = emit_report(&recs, ReportFormat::Json, &meta()).unwrap();
    let plot = parse_plot_data(&out).unwrap();
    assert_eq!(plot.records, recs);
    assert_eq!(plot.points.len(), recs.len());
    assert_eq!(plot.metadata.seed, Some(42));
    // One mean per (method, chain).
    assert_eq!(plot.methods.len(), 4);
    let m = plot
        .methods
        .iter()
        .find(|m| m.method == "huffman" && m.chain == "D")
        .unwrap();
    let expected = recs
        .iter()
        .filter(|r| r.method == "huffman" && r.chain == "D")
        .map(|r| r.cs)
        .sum::<f64>()
        / 2.0;
    assert!((m.mean_cs - expected).abs() < 1e-12);
    assert_eq!(m.datasets, 2);
    let line = plot
        .lines
        .iter()
        .find(|l| l.dataset == "switching" && l.method == "bitpack")
        .unwrap();
    assert_eq!(line.chains, ["none", "D"]);
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(matches!(
        emit_report(&[], ReportFormat::Csv, &meta()),
        Err(Error::EmptyInput)
    ));
    assert!(matches!(
        "xml".parse::<ReportFormat>(),
        Err(Error::UnknownFormat(_))
    ));
    assert!(parse_plot_data(b"{not json").is_err());
    assert_eq!(
        "md".parse::<ReportFormat>().unwrap(),
        ReportFormat::Markdown
    );
}

#[test]
fn ablation_table_shows_cardinality_and_aad() {
    let d = Dataset::from_channels(
        "switching",
        vec![generate(&SynthSpec::new(Case::Switching)).unwrap()],
    );
    let row = ablate(&d, &TransformChain::ablation_chains()).unwrap();
    let md = String::from_utf8(
        emit_ablation(std::slice::from_ref(&row), ReportFormat::Markdown).unwrap(),
    )
    .unwrap();
    let lines: Vec<&str> = md.lines().collect();
    assert_eq!(lines[0], "| case | none | D | D+R | D+R+Q |");
    let raw = row.get("none").unwrap();
    assert!(lines[2].starts_with(&format!("| switching | 5 / {:.1} |", raw.aad)));

    let csv = String::from_utf8(emit_ablation(&[row], ReportFormat::Csv).unwrap()).unwrap();
    assert_eq!(csv.lines().count(), 5);
}
