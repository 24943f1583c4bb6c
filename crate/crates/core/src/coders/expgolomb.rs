//! Order-0 exponential Golomb code: `n` is written as `L - 1` zeros followed
//! by the `L`-bit binary form of `n + 1`.

use super::bits::{BitReader, BitStream, BitWriter};
use crate::error::{Error, Result};

/// Codeword length in bits: `2 * floor(log2(n + 1)) + 1`.
#[inline]
pub fn codeword_len(n: u32) -> u32 {
    let v = n as u64 + 1;
    2 * (63 - v.leading_zeros()) + 1
}

#[inline]
fn write_one(w: &mut BitWriter, n: u32) {
    let v = n as u64 + 1;
    let width = 64 - v.leading_zeros();
    w.write_repeated(false, width - 1);
    if width > 32 {
        w.write_bit(true);
        w.write_bits(v, 32);
    } else {
        w.write_bits(v, width);
    }
}

pub fn expgolomb_encode(values: &[u32]) -> BitStream {
    let mut w = BitWriter::with_capacity(values.len() / 2);
    for &n in values {
        write_one(&mut w, n);
    }
    w.finish()
}

/// Decodes exactly `count` values.
pub fn expgolomb_decode(bytes: &[u8], count: usize) -> Result<Vec<u32>> {
    let mut r = BitReader::new(bytes);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let zeros = r.read_run(false, 32)?;
        let rest = r.read_bits(zeros)?;
        let v = (1u64 << zeros) | rest;
        let n = u32::try_from(v - 1).map_err(|_| Error::OutOfRange {
            value: (v - 1) as i64,
            bits: 32,
        })?;
        out.push(n);
    }
    Ok(out)
}
