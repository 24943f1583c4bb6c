//! Static JPEG-style magnitude-category code.
//!
//! A value's category `k` is the bit length of `|v|` (0 for zero). The
//! category is sent in unary (`k` ones, then a zero), followed for `k >= 1` by
//! `k` bits: the low bits of `v` when positive, of `v - 1` when negative. No
//! header is needed.

use super::bits::{BitReader, BitStream, BitWriter};
use crate::error::{Error, Result};

#[inline]
fn category(v: i32) -> u32 {
    32 - v.unsigned_abs().leading_zeros()
}

pub fn drh_encode(values: &[i32]) -> Result<BitStream> {
    let mut w = BitWriter::with_capacity(values.len());
    for &v in values {
        if v == i32::MIN {
            return Err(Error::OutOfRange {
                value: v as i64,
                bits: 32,
            });
        }
        let k = category(v);
        w.write_repeated(true, k);
        w.write_bit(false);
        if k > 0 {
            let bits = if v > 0 { v as i64 } else { v as i64 - 1 };
            w.write_bits(bits as u64, k);
        }
    }
    Ok(w.finish())
}

pub fn drh_decode(bytes: &[u8], count: usize) -> Result<Vec<i32>> {
    let mut r = BitReader::new(bytes);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = r.read_run(true, 31)?;
        if k == 0 {
            out.push(0);
            continue;
        }
        let bits = r.read_bits(k)? as i64;
        let v = if bits >> (k - 1) == 1 {
            bits
        } else {
            bits - ((1i64 << k) - 1)
        };
        out.push(v as i32);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(v: i32) -> String {
        drh_encode(&[v]).unwrap().to_bit_string()
    }

    #[test]
    fn codewords() {
        assert_eq!(bits(0), "0");
        assert_eq!(bits(1), "101");
        assert_eq!(bits(-1), "100");
        assert_eq!(bits(5), "1110101");
        assert_eq!(bits(-5), "1110010");
    }

    #[test]
    fn extremes() {
        let vals = [i32::MAX, -i32::MAX, 0, 1, -1, 65535, -65536];
        let s = drh_encode(&vals).unwrap();
        assert_eq!(drh_decode(&s.bytes, vals.len()).unwrap(), vals);
        assert!(drh_encode(&[i32::MIN]).is_err());
    }

    #[test]
    fn truncated() {
        let s = drh_encode(&[1000, -1000]).unwrap();
        assert!(matches!(
            drh_decode(&s.bytes[..2], 2),
            Err(Error::TruncatedStream)
        ));
    }
}
