//! Block bit packing.
//!
//! Each block stores one width byte (bits of the block maximum, 0..=32)
//! followed by the block's values at that width, MSB-first. The final block
//! may be short; its length follows from the total value count.

use super::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};

pub const DEFAULT_BLOCK_SIZE: usize = 128;

#[inline]
fn width_of(max: u32) -> u32 {
    32 - max.leading_zeros()
}

pub fn bitpack_encode(values: &[u32], block_size: usize) -> Result<Vec<u8>> {
    if block_size == 0 {
        return Err(Error::InvalidParameter(
            "block size must be positive".into(),
        ));
    }
    let mut out = Vec::with_capacity(values.len() * 2);
    for block in values.chunks(block_size) {
        let width = width_of(block.iter().copied().max().unwrap_or(0));
        out.push(width as u8);
        let mut w = BitWriter::with_capacity((block.len() * width as usize).div_ceil(8));
        for &v in block {
            w.write_bits(v as u64, width);
        }
        out.extend_from_slice(&w.finish().bytes);
    }
    Ok(out)
}

pub fn bitpack_decode(bytes: &[u8], count: usize, block_size: usize) -> Result<Vec<u32>> {
    if block_size == 0 {
        return Err(Error::InvalidParameter(
            "block size must be positive".into(),
        ));
    }
    let mut out = Vec::with_capacity(count);
    let mut pos = 0usize;
    while out.len() < count {
        let n = block_size.min(count - out.len());
        let width = *bytes.get(pos).ok_or(Error::TruncatedStream)? as u32;
        if width > 32 {
            return Err(Error::CorruptBlockHeader);
        }
        pos += 1;
        let len = (n * width as usize).div_ceil(8);
        let payload = bytes.get(pos..pos + len).ok_or(Error::TruncatedStream)?;
        let mut r = BitReader::new(payload);
        for _ in 0..n {
            out.push(r.read_bits(width)? as u32);
        }
        pos += len;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_examples() {
        assert_eq!(
            bitpack_encode(&[3, 1, 2], 128).unwrap(),
            vec![2, 0b1101_1000]
        );
        assert_eq!(bitpack_encode(&[0; 128], 128).unwrap(), vec![0]);
        assert_eq!(bitpack_encode(&[1, 65535], 128).unwrap()[0], 16);
        assert_eq!(bitpack_encode(&[u32::MAX], 128).unwrap()[0], 32);
    }

    #[test]
    fn multi_block_round_trip() {
        let vals: Vec<u32> = (0..1000u32).map(|i| (i * 7919) % (1 << (i % 20))).collect();
        for bs in [1, 7, 128, 5000] {
            let enc = bitpack_encode(&vals, bs).unwrap();
            assert_eq!(bitpack_decode(&enc, vals.len(), bs).unwrap(), vals);
        }
    }

    #[test]
    fn corrupt_and_truncated() {
        assert!(matches!(
            bitpack_decode(&[33, 0, 0, 0, 0, 0], 1, 128),
            Err(Error::CorruptBlockHeader)
        ));
        let enc = bitpack_encode(&[300, 200, 100], 128).unwrap();
        assert!(matches!(
            bitpack_decode(&enc[..enc.len() - 1], 3, 128),
            Err(Error::TruncatedStream)
        ));
        assert!(bitpack_encode(&[1], 0).is_err());
    }
}
