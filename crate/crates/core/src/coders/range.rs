//! Static order-0 range coder (byte-oriented, with carry propagation).
//!
//! The model is the empirical symbol distribution quantized to a total mass of
//! 2^14. Header: `u32` symbol count, then `(i32 symbol, u16 frequency)` pairs
//! in ascending symbol order, little-endian. The payload follows; decoding
//! needs the header and the symbol count.

use crate::error::{Error, Result};
use crate::metrics::value_counts;

pub const MODEL_BITS: u32 = 14;
pub const MODEL_TOTAL: u32 = 1 << MODEL_BITS;

const TOP: u32 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyModel {
    symbols: Vec<i32>,
    freqs: Vec<u32>,
    cum: Vec<u32>,
}

impl FrequencyModel {
    /// Scales counts to sum to exactly [`MODEL_TOTAL`], every symbol keeping
    /// a frequency of at least 1.
    pub fn quantize(counts: &[(i32, u64)]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyInput);
        }
        if counts.len() > MODEL_TOTAL as usize {
            return Err(Error::AlphabetTooLarge {
                cardinality: counts.len(),
                limit: MODEL_TOTAL as usize,
            });
        }
        let n: u64 = counts.iter().map(|&(_, c)| c).sum();
        let mut freqs: Vec<u32> = counts
            .iter()
            .map(|&(_, c)| {
                let scaled = (c as u128 * MODEL_TOTAL as u128 + n as u128 / 2) / n as u128;
                (scaled as u32).max(1)
            })
            .collect();
        let mut sum: i64 = freqs.iter().map(|&f| f as i64).sum();
        // Settle the rounding difference on the largest frequencies, where it
        // costs the least.
        let mut order: Vec<usize> = (0..freqs.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(freqs[i]));
        let target = MODEL_TOTAL as i64;
        while sum != target {
            let mut changed = false;
            for &i in &order {
                if sum > target && freqs[i] > 1 {
                    freqs[i] -= 1;
                    sum -= 1;
                    changed = true;
                } else if sum < target {
                    freqs[i] += 1;
                    sum += 1;
                    changed = true;
                }
                if sum == target {
                    break;
                }
            }
            debug_assert!(changed);
        }
        Self::from_parts(counts.iter().map(|&(s, _)| s).collect(), freqs)
    }

    fn from_parts(symbols: Vec<i32>, freqs: Vec<u32>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::CorruptModel("no symbols".into()));
        }
        if freqs.contains(&0) {
            return Err(Error::CorruptModel("zero frequency".into()));
        }
        if symbols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::CorruptModel("symbols not ascending".into()));
        }
        let total: u64 = freqs.iter().map(|&f| f as u64).sum();
        if total != MODEL_TOTAL as u64 {
            return Err(Error::CorruptModel(format!(
                "frequencies sum to {total}, expected {MODEL_TOTAL}"
            )));
        }
        let mut cum = Vec::with_capacity(freqs.len());
        let mut acc = 0;
        for &f in &freqs {
            cum.push(acc);
            acc += f;
        }
        Ok(FrequencyModel {
            symbols,
            freqs,
            cum,
        })
    }

    pub fn symbols(&self) -> &[i32] {
        &self.symbols
    }

    pub fn freqs(&self) -> &[u32] {
        &self.freqs
    }

    pub fn header_len(&self) -> usize {
        4 + 6 * self.symbols.len()
    }

    pub fn write_header(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.symbols.len() as u32).to_le_bytes());
        for (&s, &f) in self.symbols.iter().zip(&self.freqs) {
            out.extend_from_slice(&s.to_le_bytes());
            out.extend_from_slice(&(f as u16).to_le_bytes());
        }
    }

    pub fn read_header(bytes: &[u8]) -> Result<(Self, usize)> {
        let count = bytes
            .get(..4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()) as usize)
            .ok_or(Error::TruncatedStream)?;
        if count == 0 || count > MODEL_TOTAL as usize {
            return Err(Error::CorruptModel(format!("symbol count {count}")));
        }
        let end = 4 + 6 * count;
        let body = bytes.get(4..end).ok_or(Error::TruncatedStream)?;
        let (symbols, freqs) = body
            .chunks_exact(6)
            .map(|c| {
                (
                    i32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                    u16::from_le_bytes([c[4], c[5]]) as u32,
                )
            })
            .unzip();
        Ok((Self::from_parts(symbols, freqs)?, end))
    }
}

struct Encoder {
    /// 33 significant bits: bit 32 is a pending carry.
    low: u64,
    range: u32,
    /// Last byte not yet written, since a carry may still reach it.
    cache: u8,
    /// `cache` plus the run of 0xFF bytes behind it.
    pending: u64,
    out: Vec<u8>,
}

impl Encoder {
    fn new(capacity: usize) -> Self {
        Encoder {
            low: 0,
            range: u32::MAX,
            cache: 0,
            pending: 1,
            out: Vec::with_capacity(capacity),
        }
    }

    #[inline]
    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || self.low >> 32 != 0 {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            while self.pending > 0 {
                self.out.push(byte.wrapping_add(carry));
                byte = 0xFF;
                self.pending -= 1;
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.pending += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    #[inline]
    fn encode(&mut self, cum: u32, freq: u32) {
        let r = self.range >> MODEL_BITS;
        self.low += r as u64 * cum as u64;
        self.range = r * freq;
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    fn finish(mut self) -> Vec<u8> {
        // Any value in [low, low + range) identifies the stream; pick the one
        // with the most trailing zero bits so the tail can be trimmed.
        let hi = self.low + self.range as u64 - 1;
        for shift in (0..32).rev() {
            let mask = (1u64 << shift) - 1;
            let v = (self.low + mask) & !mask;
            if v <= hi {
                self.low = v;
                break;
            }
        }
        for _ in 0..5 {
            self.shift_low();
        }
        // The first byte is the initial empty cache and always zero.
        debug_assert_eq!(self.out[0], 0);
        self.out.remove(0);
        // Trailing zeros of the final four bytes are implied by the decoder.
        let min_len = self.out.len().saturating_sub(FLUSH_BYTES);
        while self.out.len() > min_len && self.out.last() == Some(&0) {
            self.out.pop();
        }
        self.out
    }
}

const FLUSH_BYTES: usize = 4;

struct Decoder<'a> {
    range: u32,
    code: u32,
    input: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    fn new(input: &'a [u8]) -> Result<Self> {
        let mut d = Decoder {
            range: u32::MAX,
            code: 0,
            input,
            pos: 0,
        };
        for _ in 0..4 {
            d.code = (d.code << 8) | d.byte()? as u32;
        }
        Ok(d)
    }

    /// Bytes past the end read as zero, up to the trimmed flush length.
    #[inline]
    fn byte(&mut self) -> Result<u8> {
        let b = match self.input.get(self.pos) {
            Some(&b) => b,
            None if self.pos < self.input.len() + FLUSH_BYTES => 0,
            None => return Err(Error::TruncatedStream),
        };
        self.pos += 1;
        Ok(b)
    }

    #[inline]
    fn target(&mut self) -> Result<u32> {
        self.range >>= MODEL_BITS;
        let t = self.code / self.range;
        if t >= MODEL_TOTAL {
            return Err(Error::CorruptModel(
                "code outside the coding interval".into(),
            ));
        }
        Ok(t)
    }

    #[inline]
    fn consume(&mut self, cum: u32, freq: u32) -> Result<()> {
        self.code -= cum * self.range;
        self.range *= freq;
        while self.range < TOP {
            self.code = (self.code << 8) | self.byte()? as u32;
            self.range <<= 8;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RangeEncoded {
    pub model: FrequencyModel,
    pub payload: Vec<u8>,
}

impl RangeEncoded {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.model.header_len() + self.payload.len());
        self.model.write_header(&mut out);
        out.extend_from_slice(&self.payload);
        out
    }
}

pub fn range_encode_parts(values: &[i32]) -> Result<RangeEncoded> {
    let model = FrequencyModel::quantize(&value_counts(values))?;
    let mut enc = Encoder::new(values.len() / 2 + 8);
    for &v in values {
        let i = model
            .symbols
            .binary_search(&v)
            .expect("symbol present in its own model");
        enc.encode(model.cum[i], model.freqs[i]);
    }
    Ok(RangeEncoded {
        model,
        payload: enc.finish(),
    })
}

pub fn range_encode(values: &[i32]) -> Result<Vec<u8>> {
    Ok(range_encode_parts(values)?.to_bytes())
}

pub fn range_decode(bytes: &[u8], count: usize) -> Result<Vec<i32>> {
    let (model, used) = FrequencyModel::read_header(bytes)?;
    let mut lookup = vec![0u16; MODEL_TOTAL as usize];
    for (i, (&c, &f)) in model.cum.iter().zip(&model.freqs).enumerate() {
        lookup[c as usize..(c + f) as usize].fill(i as u16);
    }
    let mut dec = Decoder::new(&bytes[used..])?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let i = lookup[dec.target()? as usize] as usize;
        dec.consume(model.cum[i], model.freqs[i])?;
        out.push(model.symbols[i]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantized_model_sums_to_total() {
        let counts = [(1, 1u64), (2, 1_000_000), (3, 3), (4, 17)];
        let m = FrequencyModel::quantize(&counts).unwrap();
        assert_eq!(m.freqs().iter().sum::<u32>(), MODEL_TOTAL);
        assert!(m.freqs().iter().all(|&f| f >= 1));
    }

    #[test]
    fn constant_series_is_tiny() {
        for n in [1, 100, 100_000] {
            let vals = vec![-9; n];
            let enc = range_encode_parts(&vals).unwrap();
            assert!(enc.payload.len() <= 5, "n={n}: {}", enc.payload.len());
            assert_eq!(range_decode(&enc.to_bytes(), n).unwrap(), vals);
        }
    }

    #[test]
    fn round_trip_mixed() {
        let vals: Vec<i32> = (0..20_000)
            .map(|i| ((i * 7919) % 97) - 48 + (i % 3) * 1000)
            .collect();
        let bytes = range_encode(&vals).unwrap();
        assert_eq!(range_decode(&bytes, vals.len()).unwrap(), vals);
    }

    #[test]
    fn corrupt_model() {
        let mut header = Vec::new();
        header.extend_from_slice(&2u32.to_le_bytes());
        header.extend_from_slice(&0i32.to_le_bytes());
        header.extend_from_slice(&100u16.to_le_bytes());
        header.extend_from_slice(&1i32.to_le_bytes());
        header.extend_from_slice(&100u16.to_le_bytes());
        header.extend_from_slice(&[0; 8]);
        assert!(matches!(
            range_decode(&header, 1),
            Err(Error::CorruptModel(_))
        ));
    }

    #[test]
    fn alphabet_limit() {
        let vals: Vec<i32> = (0..=MODEL_TOTAL as i32).collect();
        assert!(matches!(
            range_encode(&vals),
            Err(Error::AlphabetTooLarge { .. })
        ));
    }

    #[test]
    fn truncated_payload() {
        let vals: Vec<i32> = (0..5000).map(|i| i % 251).collect();
        let bytes = range_encode(&vals).unwrap();
        assert!(matches!(
            range_decode(&bytes[..bytes.len() - 10], vals.len()),
            Err(Error::TruncatedStream)
        ));
    }
}
