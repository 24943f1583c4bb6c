use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsc"))
        .args(args)
        .env_remove("TSC_DATA_DIR")
        .output()
        .expect("run tsc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth_file(dir: &Path, case: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{case}.csv"));
    let o = tsc(&["synth", "--case", case, "--n", "2000", "-o", p(&path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    path
}

#[test]
fn compress_decompress_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let src = synth_file(dir.path(), "sine_noise");
    for (chain, coder) in [
        ("delta,rle0,quars", "range"),
        ("none", "lzss"),
        ("delta", "drh"),
        ("delta,rle0", "expgolomb"),
    ] {
        let packed = dir.path().join("x.tsc");
        let back = dir.path().join("back.csv");
        let o = tsc(&[
            "compress",
            p(&src),
            "-o",
            p(&packed),
            "-t",
            chain,
            "-c",
            coder,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let o = tsc(&["decompress", p(&packed), "-o", p(&back)]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(
            fs::read(&src).unwrap(),
            fs::read(&back).unwrap(),
            "{chain} {coder}"
        );
    }
}

#[test]
fn decompress_defaults_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in.csv");
    fs::write(&src, "a,b\n1,-2\n3,4\n").unwrap();
    let packed = dir.path().join("in.tsc");
    assert!(tsc(&["compress", p(&src), "-o", p(&packed)])
        .status
        .success());
    let o = tsc(&["decompress", p(&packed)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "ch0,ch1\n1,-2\n3,4\n");
}

#[test]
fn quars_before_delta_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let src = synth_file(dir.path(), "sine");
    let o = tsc(&["compress", p(&src), "--transforms", "quars,delta"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("invalid chain order"), "{}", stderr(&o));
}

#[test]
fn tampered_containers_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let src = synth_file(dir.path(), "switching");
    let packed = dir.path().join("s.tsc");
    assert!(tsc(&["compress", p(&src), "-o", p(&packed)])
        .status
        .success());
    let good = fs::read(&packed).unwrap();

    let mut bad = good.clone();
    bad[0] = b'X';
    fs::write(&packed, &bad).unwrap();
    let o = tsc(&["decompress", p(&packed)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!stderr(&o).is_empty());

    fs::write(&packed, &good[..good.len() - 7]).unwrap();
    let o = tsc(&["decompress", p(&packed)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("truncated"), "{}", stderr(&o));
}

#[test]
fn synth_is_deterministic() {
    let a = tsc(&["synth", "--case", "noise", "--seed", "9", "--n", "500"]);
    let b = tsc(&["synth", "--case", "noise", "--seed", "9", "--n", "500"]);
    let c = tsc(&["synth", "--case", "noise", "--seed", "10", "--n", "500"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().count(), 501);
}

#[test]
fn ablate_prints_a_markdown_table() {
    let o = tsc(&["ablate", "--cases", "all"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "| case | none | D | D+R | D+R+Q |");
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().any(|l| l.starts_with("| switching | 5 / ")));
}

#[test]
fn bench_emits_the_full_internal_matrix() {
    let o = tsc(&[
        "bench",
        "--cases",
        "all",
        "--n",
        "1000",
        "--repetitions",
        "1",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 96);
    assert!(records.iter().all(|r| r["roundtrip_ok"] == true));
    assert_eq!(v["metadata"]["seed"], 42);
}

#[test]
fn bench_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = tsc(&[
        "bench",
        "--cases",
        "sine",
        "--n",
        "500",
        "--repetitions",
        "1",
        "--chains",
        "d+r",
        "--coders",
        "huffman,bitpack",
        "--format",
        "csv",
        "-o",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("sine,D+R,huffman,"));
}

#[test]
fn missing_backend_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let src = synth_file(dir.path(), "sine");
    let o = tsc(&["compress", p(&src), "-c", "blosc"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = tsc(&[
        "bench", "--cases", "sine", "--n", "200", "--coders", "sprintz",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn unknown_names_are_usage_errors() {
    let o = tsc(&["bench", "--cases", "sine", "--coders", "gorilla"]);
    assert_eq!(o.status.code(), Some(1));
    let o = tsc(&["bench", "--cases", "sine", "--format", "xml"]);
    assert_eq!(o.status.code(), Some(1));
    let o = tsc(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn data_dir_resolves_relative_inputs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("d.csv"), "x\n1\n2\n3\n").unwrap();
    let o = tsc(&["--data-dir", p(dir.path()), "stats", "d.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("dataset,channel,chain,n,cardinality,aad,entropy_bits,shannon_cs\n"));
    assert!(out.contains(",3,3,"), "{out}");
}

#[test]
fn zstd_level_is_honoured() {
    let probe = tsc(&[
        "bench",
        "--cases",
        "sine",
        "--n",
        "200",
        "--repetitions",
        "1",
        "--coders",
        "zstd",
    ]);
    if probe.status.code() == Some(3) {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = synth_file(dir.path(), "sine");
    let packed = dir.path().join("z.tsc");
    let o = tsc(&[
        "compress",
        p(&src),
        "-o",
        p(&packed),
        "-c",
        "zstd",
        "-l",
        "19",
        "-t",
        "delta",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let bytes = fs::read(&packed).unwrap();
    // zstd frame magic right after the container framing.
    assert!(bytes.windows(4).any(|w| w == [0x28, 0xb5, 0x2f, 0xfd]));
    let o = tsc(&["decompress", p(&packed)]);
    assert_eq!(o.stdout, fs::read(&src).unwrap());
}
