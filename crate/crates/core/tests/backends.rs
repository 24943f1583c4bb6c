use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tscodec::backends::{backend_compress, backend_decompress, serialize_series};
use tscodec::coders::CoderId;
use tscodec::transforms::delta_encode;
use tscodec::{
    decompress, generate, BackendDescriptor, BackendId, Case, CoderSpec, Error, Pipeline,
    SampleWidth, SynthSpec, TimeSeries, TransformChain,
};

fn at_level(b: BackendId, level: i32) -> BackendDescriptor {
    BackendDescriptor {
        level: Some(level),
        ..BackendDescriptor::new(b)
    }
}

#[test]
fn zstd_high_level_beats_low_level() {
    if !BackendId::Zstd.is_available() {
        eprintln!("zstd not compiled in; skipping");
        return;
    }
    let sine = generate(&SynthSpec::new(Case::Sine).with_len(100_000)).unwrap();
    let bytes = serialize_series(&delta_encode(&sine).unwrap(), SampleWidth::W16).unwrap();
    let fast = backend_compress(&bytes, &at_level(BackendId::Zstd, 1)).unwrap();
    let best = backend_compress(&bytes, &at_level(BackendId::Zstd, 19)).unwrap();
    assert!(best.len() < fast.len(), "{} vs {}", best.len(), fast.len());
    assert_eq!(
        backend_decompress(&best, &at_level(BackendId::Zstd, 19)).unwrap(),
        bytes
    );
}

#[test]
fn every_available_backend_roundtrips_a_megabyte() {
    let mut data = vec![0u8; 1 << 20];
    ChaCha8Rng::seed_from_u64(3).fill_bytes(&mut data);
    for b in BackendId::available() {
        let desc = BackendDescriptor::new(b);
        let packed = backend_compress(&data, &desc).unwrap_or_else(|e| panic!("{b}: {e}"));
        assert_eq!(backend_decompress(&packed, &desc).unwrap(), data, "{b}");
    }
}

#[test]
fn backends_roundtrip_through_the_container() {
    let channels = vec![
        TimeSeries::with_channel(
            0,
            generate(&SynthSpec::new(Case::SineNoise).with_len(5_000))
                .unwrap()
                .into_samples(),
        ),
        TimeSeries::with_channel(1, (0..3_000).map(|i| i * 40).collect()),
    ];
    for b in BackendId::available() {
        for chain in ["", "delta", "delta,rle0,quars"] {
            let chain: TransformChain = chain.parse().unwrap();
            let p = Pipeline::new(chain, CoderSpec::new(CoderId::Backend(b)));
            let packed = p.compress(&channels).unwrap_or_else(|e| panic!("{b}: {e}"));
            assert_eq!(decompress(&packed.bytes).unwrap(), channels, "{b}");
        }
    }
}

#[test]
fn unavailable_backends_report_cleanly() {
    for b in [BackendId::Blosc, BackendId::Sprintz] {
        assert!(!b.is_available());
        assert!(matches!(
            backend_compress(b"abc", &BackendDescriptor::new(b)),
            Err(Error::BackendUnavailable(x)) if x == b
        ));
    }
    assert!(matches!(
        "gorilla".parse::<BackendId>(),
        Err(Error::UnregisteredBackend(_))
    ));
}

#[test]
fn corrupt_backend_payloads_are_errors() {
    for b in BackendId::available() {
        let desc = BackendDescriptor::new(b);
        let packed = backend_compress(&[7u8; 4096], &desc).unwrap();
        let cut = &packed[..packed.len() / 2];
        match backend_decompress(cut, &desc) {
            Err(Error::Backend { backend, .. }) => assert_eq!(backend, b),
            // Raw formats without checksums can decode a prefix.
            Ok(out) => assert_ne!(out, vec![7u8; 4096], "{b}"),
            Err(e) => panic!("{b}: unexpected {e}"),
        }
    }
}
