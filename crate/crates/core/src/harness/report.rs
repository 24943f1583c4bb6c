//! Report writers: csv, markdown and json plot data.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AblationRow, BenchRecord};
use crate::backends::BackendId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" | "markdown-table" => Ok(ReportFormat::Markdown),
            "json" | "json-plotdata" => Ok(ReportFormat::Json),
            other => Err(Error::UnknownFormat(format!(
                "{other} (expected csv, markdown or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool_version: String,
    pub seed: Option<u64>,
    pub repetitions: usize,
    /// `(backend, available)` for every registered backend.
    pub backends: Vec<(String, bool)>,
    pub timer_resolution_ns: u64,
    /// Cells skipped because their backend is missing.
    pub unavailable: Vec<String>,
}

impl ReportMeta {
    pub fn new(seed: Option<u64>, repetitions: usize) -> Self {
        ReportMeta {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            repetitions,
            backends: BackendId::ALL
                .iter()
                .map(|b| (b.name().to_string(), b.is_available()))
                .collect(),
            timer_resolution_ns: super::timer_resolution().as_nanos() as u64,
            unavailable: Vec::new(),
        }
    }

    fn lines(&self) -> Vec<String> {
        let avail: Vec<String> = self
            .backends
            .iter()
            .map(|(b, ok)| format!("{b}={}", if *ok { "yes" } else { "no" }))
            .collect();
        let mut out = vec![
            format!("tool_version: {}", self.tool_version),
            format!(
                "seed: {}",
                self.seed
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| "n/a".into())
            ),
            format!("repetitions: {}", self.repetitions),
            format!("timer_resolution_ns: {}", self.timer_resolution_ns),
            format!("backends: {}", avail.join(" ")),
        ];
        if !self.unavailable.is_empty() {
            out.push(format!("unavailable: {}", self.unavailable.join("; ")));
        }
        out
    }
}

/// One (score, speed) point per record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorePoint {
    pub dataset: String,
    pub method: String,
    pub chain: String,
    pub cs: f64,
    pub speed_mb_s: f64,
}

/// Per-method means over datasets, one per chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodPoint {
    pub method: String,
    pub chain: String,
    pub mean_cs: f64,
    pub weighted_cs: f64,
    pub mean_speed_mb_s: f64,
    pub datasets: usize,
}

/// Score against chain for one dataset and method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLine {
    pub dataset: String,
    pub method: String,
    pub chains: Vec<String>,
    pub cs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub metadata: ReportMeta,
    pub points: Vec<ScorePoint>,
    pub methods: Vec<MethodPoint>,
    pub lines: Vec<ChainLine>,
    pub records: Vec<BenchRecord>,
}

fn ordered_unique<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in items {
        if !out.iter().any(|o| o == s) {
            out.push(s.to_string());
        }
    }
    out
}

fn method_points(records: &[BenchRecord]) -> Vec<MethodPoint> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in records {
        let k = (r.method.clone(), r.chain.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(method, chain)| {
            let rs: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.method == method && r.chain == chain)
                .collect();
            let n = rs.len() as f64;
            let orig: u64 = rs.iter().map(|r| r.original_bytes).sum();
            let comp: u64 = rs.iter().map(|r| r.compressed_bytes).sum();
            MethodPoint {
                mean_cs: rs.iter().map(|r| r.cs).sum::<f64>() / n,
                weighted_cs: 1.0 - comp as f64 / orig.max(1) as f64,
                mean_speed_mb_s: rs.iter().map(|r| r.speed_mb_s).sum::<f64>() / n,
                datasets: rs.len(),
                method,
                chain,
            }
        })
        .collect()
}

pub fn plot_data(records: &[BenchRecord], meta: &ReportMeta) -> PlotData {
    let points = records
        .iter()
        .map(|r| ScorePoint {
            dataset: r.dataset.clone(),
            method: r.method.clone(),
            chain: r.chain.clone(),
            cs: r.cs,
            speed_mb_s: r.speed_mb_s,
        })
        .collect();
    let mut lines: Vec<ChainLine> = Vec::new();
    for r in records {
        match lines
            .iter_mut()
            .find(|l| l.dataset == r.dataset && l.method == r.method)
        {
            Some(l) => {
                l.chains.push(r.chain.clone());
                l.cs.push(r.cs);
            }
            None => lines.push(ChainLine {
                dataset: r.dataset.clone(),
                method: r.method.clone(),
                chains: vec![r.chain.clone()],
                cs: vec![r.cs],
            }),
        }
    }
    PlotData {
        metadata: meta.clone(),
        points,
        methods: method_points(records),
        lines,
        records: records.to_vec(),
    }
}

pub fn parse_plot_data(bytes: &[u8]) -> Result<PlotData> {
    Ok(serde_json::from_slice(bytes)?)
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn csv_report(records: &[BenchRecord], meta: &ReportMeta) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for l in meta.lines() {
        out.extend_from_slice(format!("# {l}\n").as_bytes());
    }
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_io)?;
    }
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn markdown_report(records: &[BenchRecord], meta: &ReportMeta) -> String {
    let mut s = String::new();
    for l in meta.lines() {
        let _ = writeln!(s, "- {l}");
    }
    s.push('\n');
    let chains = ordered_unique(records.iter().map(|r| r.chain.as_str()));
    let mut rows: Vec<(&str, &str)> = Vec::new();
    for r in records {
        if !rows.contains(&(r.dataset.as_str(), r.method.as_str())) {
            rows.push((&r.dataset, &r.method));
        }
    }
    let _ = write!(s, "| dataset | method |");
    for c in &chains {
        let _ = write!(s, " {c} |");
    }
    s.push('\n');
    s.push_str("|---|---|");
    for _ in &chains {
        s.push_str("---:|");
    }
    s.push('\n');
    for (d, m) in rows {
        let _ = write!(s, "| {d} | {m} |");
        for c in &chains {
            match records
                .iter()
                .find(|r| r.dataset == d && r.method == m && &r.chain == c)
            {
                // Expansion shows as 0 here; csv and json keep the sign.
                Some(r) => {
                    let _ = write!(s, " {:.3} |", r.cs.max(0.0));
                }
                None => s.push_str(" n/a |"),
            }
        }
        s.push('\n');
    }
    s
}

pub fn emit_report(
    records: &[BenchRecord],
    format: ReportFormat,
    meta: &ReportMeta,
) -> Result<Vec<u8>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    match format {
        ReportFormat::Csv => csv_report(records, meta),
        ReportFormat::Markdown => Ok(markdown_report(records, meta).into_bytes()),
        ReportFormat::Json => Ok(serde_json::to_vec_pretty(&plot_data(records, meta))?),
    }
}

/// Ablation table: one row per dataset, `cardinality / aad` per chain in
/// markdown, long form in csv.
pub fn emit_ablation(rows: &[AblationRow], format: ReportFormat) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    match format {
        ReportFormat::Markdown => {
            let chains = ordered_unique(
                rows.iter()
                    .flat_map(|r| r.cells.iter().map(|c| c.chain.as_str())),
            );
            let mut s = String::from("| case |");
            for c in &chains {
                let _ = write!(s, " {c} |");
            }
            s.push_str("\n|---|");
            for _ in &chains {
                s.push_str("---:|");
            }
            s.push('\n');
            for r in rows {
                let _ = write!(s, "| {} |", r.dataset);
                for c in &chains {
                    match r.get(c) {
                        Some(st) => {
                            let _ = write!(s, " {} / {:.1} |", st.cardinality, st.aad);
                        }
                        None => s.push_str(" n/a |"),
                    }
                }
                s.push('\n');
            }
            Ok(s.into_bytes())
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "dataset",
                "chain",
                "n",
                "cardinality",
                "aad",
                "entropy_bits",
                "shannon_cs",
            ])
            .map_err(csv_io)?;
            for r in rows {
                for c in &r.cells {
                    let st = &c.stats;
                    w.write_record([
                        r.dataset.clone(),
                        c.chain.clone(),
                        st.n.to_string(),
                        st.cardinality.to_string(),
                        st.aad.to_string(),
                        st.entropy_bits.to_string(),
                        st.shannon_cs.to_string(),
                    ])
                    .map_err(csv_io)?;
                }
            }
            w.into_inner()
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
        }
        ReportFormat::Json => Ok(serde_json::to_vec_pretty(rows)?),
    }
}
