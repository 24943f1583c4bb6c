//! Series statistics and size metrics.
//!
//! Every real-valued quantity is generic over [`Real`] so the same code serves
//! `f32` and `f64` callers; the crate root exposes `f64` aliases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

/// Bits per sample of the uncompressed reference used for the Shannon-limit
/// score.
pub const DEFAULT_SOURCE_BITS: u32 = 16;

/// Distinct values of `samples` with their occurrence counts, ascending by value.
pub fn value_counts(samples: &[i32]) -> Vec<(i32, u64)> {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<(i32, u64)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((last, count)) if *last == v => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Number of distinct sample values; 0 for an empty series.
pub fn cardinality(samples: &[i32]) -> usize {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

/// Average absolute deviation from a center value of 0.
pub fn aad<F: Real>(samples: &[i32]) -> Result<F> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total: u64 = samples.iter().map(|&v| (v as i64).unsigned_abs()).sum();
    Ok(F::of_f64(total as f64) / F::of_usize(samples.len()))
}

/// Empirical order-0 entropy in bits per sample.
pub fn entropy_bits<F: Real>(samples: &[i32]) -> Result<F> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = F::of_usize(samples.len());
    let h = value_counts(samples)
        .into_iter()
        .map(|(_, c)| {
            let p = F::of_f64(c as f64) / n;
            -p * p.log2()
        })
        .sum::<F>();
    // Rounding can leave a tiny negative residue for single-symbol input.
    Ok(h.max(F::zero()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats<F> {
    pub n: usize,
    pub cardinality: usize,
    pub aad: F,
    pub entropy_bits: F,
    /// `1 - entropy_bits / source_bits`: the best score any order-0 coder can
    /// reach on i.i.d. data.
    pub shannon_cs: F,
}

/// Cardinality, AAD, entropy and Shannon-limit score against 16-bit samples.
pub fn entropy_and_limit<F: Real>(samples: &[i32]) -> Result<SeriesStats<F>> {
    entropy_and_limit_with_width(samples, DEFAULT_SOURCE_BITS)
}

pub fn entropy_and_limit_with_width<F: Real>(
    samples: &[i32],
    source_bits: u32,
) -> Result<SeriesStats<F>> {
    if source_bits == 0 {
        return Err(Error::InvalidParameter(
            "source width must be positive".into(),
        ));
    }
    let entropy_bits = entropy_bits::<F>(samples)?;
    Ok(SeriesStats {
        n: samples.len(),
        cardinality: cardinality(samples),
        aad: aad(samples)?,
        entropy_bits,
        shannon_cs: F::one() - entropy_bits / F::of_f64(source_bits as f64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeReport<F> {
    pub original_bytes: u64,
    pub compressed_bytes: u64,
    pub cr: F,
    /// May be negative when the output expanded.
    pub cs: F,
}

impl<F: Real> SizeReport<F> {
    /// Score clamped at 0 for display.
    pub fn display_cs(&self) -> F {
        self.cs.max(F::zero())
    }
}

pub fn size_metrics<F: Real>(original_bytes: u64, compressed_bytes: u64) -> Result<SizeReport<F>> {
    if original_bytes == 0 || compressed_bytes == 0 {
        return Err(Error::InvalidSize(format!(
            "sizes must be positive (original {original_bytes}, compressed {compressed_bytes})"
        )));
    }
    let orig = F::of_f64(original_bytes as f64);
    let comp = F::of_f64(compressed_bytes as f64);
    let cr = orig / comp;
    Ok(SizeReport {
        original_bytes,
        compressed_bytes,
        cr,
        cs: F::one() - F::one() / cr,
    })
}

/// Megabytes (10^6 bytes) of original data processed per second.
pub fn speed_mb_s<F: Real>(original_bytes: u64, seconds: f64) -> F {
    if seconds <= 0.0 {
        return F::infinity();
    }
    F::of_f64(original_bytes as f64 / 1e6 / seconds)
}
