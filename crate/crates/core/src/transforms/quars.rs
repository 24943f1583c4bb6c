//! Quantile reshuffling.
//!
//! The observed value range is cut into bins of near-equal sample mass (one
//! bin per distinct value when the cardinality fits the bin budget). Bins are
//! ranked by occurrence count, most frequent first, and their value ranges are
//! relocated into a contiguous target layout that alternates around zero:
//! rank 0 straddles 0, odd ranks extend the positive side, even ranks the
//! negative side. Offsets inside a bin are preserved, so the mapping is a
//! bijection on observed values and leaves cardinality untouched while
//! frequent values land on small magnitudes.
//!
//! Because target ranges are packed without gaps, a map only needs each bin's
//! lower bound and target offset: the bin of a mapped value is the one with
//! the greatest target offset not exceeding it.

use crate::error::{Error, Result};
use crate::metrics::value_counts;

pub const DEFAULT_BIN_COUNT: usize = 256;
pub const MAX_BIN_COUNT: usize = u16::MAX as usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuarsBin {
    pub lower: i32,
    pub target: i32,
}

/// Serialized bijection produced by [`quars_encode`]. Bins ascend by lower bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarsMap {
    bins: Vec<QuarsBin>,
    /// Bin indices ascending by target offset.
    by_target: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct BinStat {
    lower: i32,
    upper: i32,
    count: u64,
}

impl QuarsMap {
    fn from_bins(bins: Vec<QuarsBin>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::InvalidParameter("QuaRs map without bins".into()));
        }
        if bins.windows(2).any(|w| w[0].lower >= w[1].lower) {
            return Err(Error::InvalidParameter(
                "QuaRs lower bounds not strictly ascending".into(),
            ));
        }
        let mut by_target: Vec<usize> = (0..bins.len()).collect();
        by_target.sort_by_key(|&i| bins[i].target);
        if by_target
            .windows(2)
            .any(|w| bins[w[0]].target == bins[w[1]].target)
        {
            return Err(Error::InvalidParameter(
                "duplicate QuaRs target offsets".into(),
            ));
        }
        Ok(QuarsMap { bins, by_target })
    }

    pub fn bins(&self) -> &[QuarsBin] {
        &self.bins
    }

    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    /// Bin lower bounds in rank order (most frequent bin first).
    pub fn ranked_lower_bounds(&self) -> Vec<i32> {
        let zero_pos = self
            .by_target
            .partition_point(|&i| self.bins[i].target <= 0)
            - 1;
        let mut pos = self.by_target[zero_pos + 1..].iter();
        let mut neg = self.by_target[..zero_pos].iter().rev();
        let mut out = vec![self.bins[self.by_target[zero_pos]].lower];
        loop {
            let p = pos.next();
            let n = neg.next();
            if p.is_none() && n.is_none() {
                break;
            }
            out.extend(p.into_iter().chain(n).map(|&i| self.bins[i].lower));
        }
        out
    }

    pub fn forward(&self, v: i32) -> Result<i32> {
        let idx = self.bins.partition_point(|b| b.lower <= v);
        if idx == 0 {
            return Err(Error::NotInQuarsMap(v as i64));
        }
        let bin = self.bins[idx - 1];
        let m = bin.target as i64 + (v as i64 - bin.lower as i64);
        i32::try_from(m).map_err(|_| Error::NotInQuarsMap(v as i64))
    }

    pub fn inverse(&self, m: i32) -> Result<i32> {
        let pos = self
            .by_target
            .partition_point(|&i| self.bins[i].target <= m);
        if pos == 0 {
            return Err(Error::NotInQuarsMap(m as i64));
        }
        let idx = self.by_target[pos - 1];
        let bin = self.bins[idx];
        let v = bin.lower as i64 + (m as i64 - bin.target as i64);
        let below_next = self
            .bins
            .get(idx + 1)
            .is_none_or(|next| v < next.lower as i64);
        if !below_next {
            return Err(Error::NotInQuarsMap(m as i64));
        }
        i32::try_from(v).map_err(|_| Error::NotInQuarsMap(m as i64))
    }

    pub fn apply(&self, samples: &[i32]) -> Result<Vec<i32>> {
        samples.iter().map(|&v| self.forward(v)).collect()
    }

    /// `u16` bin count, then per bin `i32` lower bound and `i32` target
    /// offset, all little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + 8 * self.bins.len());
        out.extend_from_slice(&(self.bins.len() as u16).to_le_bytes());
        for b in &self.bins {
            out.extend_from_slice(&b.lower.to_le_bytes());
            out.extend_from_slice(&b.target.to_le_bytes());
        }
        out
    }

    /// Parses a map from the front of `bytes`, returning it with the number of
    /// bytes consumed.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, usize)> {
        let count = bytes
            .get(..2)
            .map(|b| u16::from_le_bytes([b[0], b[1]]) as usize)
            .ok_or(Error::TruncatedStream)?;
        let end = 2 + 8 * count;
        let body = bytes.get(2..end).ok_or(Error::TruncatedStream)?;
        let bins = body
            .chunks_exact(8)
            .map(|c| QuarsBin {
                lower: i32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                target: i32::from_le_bytes([c[4], c[5], c[6], c[7]]),
            })
            .collect();
        Ok((QuarsMap::from_bins(bins)?, end))
    }
}

fn build_bins(samples: &[i32], bin_count: usize) -> Vec<BinStat> {
    let counts = value_counts(samples);
    if counts.len() <= bin_count {
        return counts
            .into_iter()
            .map(|(v, c)| BinStat {
                lower: v,
                upper: v,
                count: c,
            })
            .collect();
    }

    let target_mass = (samples.len() as u64).div_ceil(bin_count as u64);
    let mut bins: Vec<BinStat> = Vec::with_capacity(bin_count + 1);
    let mut cur: Option<BinStat> = None;
    for (v, c) in counts {
        if c >= target_mass {
            // Heavy values get a bin of their own.
            bins.extend(cur.take());
            bins.push(BinStat {
                lower: v,
                upper: v,
                count: c,
            });
            continue;
        }
        let bin = cur.get_or_insert(BinStat {
            lower: v,
            upper: v,
            count: 0,
        });
        bin.upper = v;
        bin.count += c;
        if bin.count >= target_mass {
            bins.extend(cur.take());
        }
    }
    bins.extend(cur);

    // Heavy values can split partial bins; merge the lightest neighbours
    // until the budget holds.
    while bins.len() > bin_count {
        let i = (0..bins.len() - 1)
            .min_by_key(|&i| bins[i].count + bins[i + 1].count)
            .expect("at least two bins");
        let right = bins.remove(i + 1);
        bins[i].upper = right.upper;
        bins[i].count += right.count;
    }
    bins
}

/// Fits a map on `samples` and applies it.
pub fn quars_encode(samples: &[i32], bin_count: usize) -> Result<(Vec<i32>, QuarsMap)> {
    let map = quars_fit(samples, bin_count)?;
    let mapped = map.apply(samples)?;
    Ok((mapped, map))
}

pub fn quars_fit(samples: &[i32], bin_count: usize) -> Result<QuarsMap> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bin_count == 0 || bin_count > MAX_BIN_COUNT {
        return Err(Error::InvalidParameter(format!(
            "QuaRs bin count must be in 1..={MAX_BIN_COUNT}, got {bin_count}"
        )));
    }
    let stats = build_bins(samples, bin_count);

    let mut ranked: Vec<usize> = (0..stats.len()).collect();
    ranked.sort_by(|&a, &b| {
        stats[b]
            .count
            .cmp(&stats[a].count)
            .then(stats[a].lower.cmp(&stats[b].lower))
    });

    let mut targets = vec![0i64; stats.len()];
    let mut pos = 0i64;
    let mut neg = 0i64;
    for (rank, &i) in ranked.iter().enumerate() {
        let width = stats[i].upper as i64 - stats[i].lower as i64 + 1;
        let t = if rank == 0 {
            let t = -((width - 1) / 2);
            pos = t + width;
            neg = t - 1;
            t
        } else if rank % 2 == 1 {
            let t = pos;
            pos += width;
            t
        } else {
            let t = neg - width + 1;
            neg = t - 1;
            t
        };
        if t < i32::MIN as i64 || t + width - 1 > i32::MAX as i64 {
            return Err(Error::OutOfRange {
                value: t + width - 1,
                bits: 32,
            });
        }
        targets[i] = t;
    }

    let bins = stats
        .iter()
        .zip(targets)
        .map(|(s, t)| QuarsBin {
            lower: s.lower,
            target: t as i32,
        })
        .collect();
    QuarsMap::from_bins(bins)
}

pub fn quars_decode(mapped: &[i32], map: &QuarsMap) -> Result<Vec<i32>> {
    mapped.iter().map(|&m| map.inverse(m)).collect()
}
