use tscodec::coders::{Coder, CoderId, Encoded, HuffmanCoder};
use tscodec::harness::{ablate, run_job, run_job_with, run_matrix, MatrixOptions, RunOptions};
use tscodec::{
    chain_apply, entropy_and_limit, generate, BackendId, Case, CoderSpec, Dataset, Error, Result,
    SampleWidth, SynthSpec, TimeSeries, TransformChain,
};

fn one(name: &str, samples: Vec<i32>) -> Dataset {
    Dataset::from_channels(name, vec![TimeSeries::new(samples)])
}

fn synth(case: Case, n: usize) -> Dataset {
    let s = generate(&SynthSpec::new(case).with_len(n)).unwrap();
    Dataset::from_channels(case.name(), vec![s])
}

fn quick() -> RunOptions {
    RunOptions { repetitions: 1 }
}

#[test]
fn constant_series_compresses_well() {
    let d = one("flat", vec![7; 10_000]);
    let chain: TransformChain = "delta,rle0".parse().unwrap();
    let r = run_job(&d, &chain, &CoderSpec::new(CoderId::ExpGolomb), &quick()).unwrap();
    assert!(r.roundtrip_ok);
    assert!(r.cs > 0.9, "cs {}", r.cs);
    assert_eq!(r.original_bytes, 20_000);
    assert_eq!(r.chain, "D+R");
    assert_eq!(r.method, "expgolomb");
}

#[test]
fn huffman_on_noise_tracks_the_shannon_limit() {
    let d = synth(Case::Noise, 10_000);
    let r = run_job(
        &d,
        &TransformChain::none(),
        &CoderSpec::new(CoderId::Huffman),
        &quick(),
    )
    .unwrap();
    let stats = entropy_and_limit::<f64>(&d.channels[0]).unwrap();
    let header_share = r.header_bytes as f64 / r.original_bytes as f64;
    let expected = stats.shannon_cs - header_share;
    assert!(
        (r.cs - expected).abs() <= 0.05,
        "cs {} vs {}",
        r.cs,
        expected
    );
    assert!(r.cs <= stats.shannon_cs);
}

#[test]
fn order0_coders_never_beat_the_entropy() {
    for case in Case::ALL {
        let d = synth(case, 20_000);
        for label in ["", "delta", "delta,rle0", "delta,rle0,quars"] {
            let chain: TransformChain = label.parse().unwrap();
            let (tokens, _) = chain_apply(&d.channels[0], &chain).unwrap();
            let h = entropy_and_limit::<f64>(&tokens).unwrap().entropy_bits;
            let floor = tokens.len() as f64 * h / 8.0;
            for coder in [CoderId::Huffman, CoderId::Range] {
                let r = run_job(&d, &chain, &CoderSpec::new(coder), &quick()).unwrap();
                // The range coder flushes at byte granularity.
                assert!(
                    r.payload_bytes as f64 >= floor - 4.0,
                    "{case} {label:?} {coder}: {} < {floor}",
                    r.payload_bytes
                );
            }
        }
    }
}

/// Decodes correctly except for one flipped sample.
struct Faulty;

impl Coder for Faulty {
    fn id(&self) -> CoderId {
        CoderId::Huffman
    }
    fn encode(&self, tokens: &[i32], width: SampleWidth) -> Result<Encoded> {
        HuffmanCoder.encode(tokens, width)
    }
    fn decode(&self, bytes: &[u8], count: usize, width: SampleWidth) -> Result<Vec<i32>> {
        let mut out = HuffmanCoder.decode(bytes, count, width)?;
        if let Some(v) = out.get_mut(count / 2) {
            *v ^= 1;
        }
        Ok(out)
    }
}

#[test]
fn faulty_decoder_is_a_hard_error() {
    let d = synth(Case::Switching, 1_000);
    let err = run_job_with(&d, &TransformChain::none(), &Faulty, &quick()).unwrap_err();
    assert!(
        matches!(
            err,
            Error::RoundTripMismatch {
                channel: 0,
                index: 500
            }
        ),
        "{err}"
    );
}

#[test]
fn full_internal_matrix_has_96_records() {
    let data: Vec<Dataset> = Case::ALL.iter().map(|&c| synth(c, 2_000)).collect();
    let chains = TransformChain::ablation_chains();
    let opts = MatrixOptions {
        run: quick(),
        threads: Some(2),
        ablation: true,
        ..Default::default()
    };
    let res = run_matrix(&data, &chains, &CoderSpec::internal_all(), &opts).unwrap();
    assert_eq!(res.records.len(), 96);
    assert!(res.failures.is_empty(), "{:?}", res.failures);
    assert!(res.records.iter().all(|r| r.roundtrip_ok));
    assert_eq!(res.ablation.len(), 4);

    // Output order is (dataset, chain, coder) regardless of scheduling.
    let mut expected = Vec::new();
    for d in &data {
        for c in &chains {
            for k in CoderSpec::internal_all() {
                expected.push((d.name.clone(), c.label(), k.label()));
            }
        }
    }
    let got: Vec<_> = res
        .records
        .iter()
        .map(|r| (r.dataset.clone(), r.chain.clone(), r.method.clone()))
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn empty_axes_are_rejected() {
    let data = vec![synth(Case::Sine, 100)];
    let chains = [TransformChain::none()];
    let opts = MatrixOptions::default();
    assert!(matches!(
        run_matrix(&data, &chains, &[], &opts),
        Err(Error::EmptyAxis("coders"))
    ));
    assert!(matches!(
        run_matrix(&[], &chains, &CoderSpec::internal_all(), &opts),
        Err(Error::EmptyAxis(_))
    ));
    assert!(matches!(
        run_matrix(&data, &[], &CoderSpec::internal_all(), &opts),
        Err(Error::EmptyAxis(_))
    ));
}

#[test]
fn missing_backends_are_skipped_not_failed() {
    let data = vec![synth(Case::Sine, 500)];
    let coders = [
        CoderSpec::new(CoderId::Backend(BackendId::Blosc)),
        CoderSpec::new(CoderId::Huffman),
    ];
    let res = run_matrix(
        &data,
        &[TransformChain::none()],
        &coders,
        &MatrixOptions::default(),
    )
    .unwrap();
    assert_eq!(res.records.len(), 1);
    assert_eq!(res.unavailable.len(), 1);
    assert!(res.failures.is_empty());
    assert!(matches!(
        run_job(&data[0], &TransformChain::none(), &coders[0], &quick()),
        Err(Error::BackendUnavailable(BackendId::Blosc))
    ));
}

#[test]
fn level_sweep_expands_backend_cells() {
    if !BackendId::Zstd.is_available() {
        return;
    }
    let data = vec![synth(Case::Sine, 2_000)];
    let mut opts = MatrixOptions {
        run: quick(),
        ..Default::default()
    };
    opts.levels.insert(BackendId::Zstd, vec![1, 3, 19]);
    let coders = [
        CoderSpec::new(CoderId::Backend(BackendId::Zstd)),
        CoderSpec::with_level(CoderId::Backend(BackendId::Zstd), 5),
    ];
    let res = run_matrix(&data, &[TransformChain::none()], &coders, &opts).unwrap();
    let methods: Vec<_> = res.records.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(methods, ["zstd:1", "zstd:3", "zstd:19", "zstd:5"]);
}

#[test]
fn ablation_reports_token_statistics() {
    let d = synth(Case::Switching, 10_000);
    let row = ablate(&d, &TransformChain::ablation_chains()).unwrap();
    assert_eq!(row.dataset, "switching");
    let raw = row.get("none").unwrap();
    assert_eq!(raw.cardinality, 5);
    assert_eq!(raw.n, 10_000);
    let dr = row.get("D+R").unwrap();
    let drq = row.get("D+R+Q").unwrap();
    assert_eq!(dr.cardinality, drq.cardinality);
    assert!(drq.aad * 10.0 <= dr.aad);
    assert!(dr.n < 10_000);
}
