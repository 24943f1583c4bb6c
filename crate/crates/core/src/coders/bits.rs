//! MSB-first bit I/O.

use crate::error::{Error, Result};

/// Packed bits with their exact length. Unused trailing bits are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitStream {
    pub bytes: Vec<u8>,
    pub bit_length: u64,
}

impl BitStream {
    /// Renders the bits as a `0`/`1` string.
    pub fn to_bit_string(&self) -> String {
        (0..self.bit_length)
            .map(|i| {
                let byte = self.bytes[(i / 8) as usize];
                if byte >> (7 - (i % 8)) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    nacc: u32,
    bit_length: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bytes: usize) -> Self {
        BitWriter {
            bytes: Vec::with_capacity(bytes),
            ..Self::default()
        }
    }

    /// Appends the low `n` bits of `value`, most significant first. `n <= 32`.
    #[inline]
    pub fn write_bits(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 32);
        if n == 0 {
            return;
        }
        let masked = value & ((1u64 << n) - 1);
        self.acc = (self.acc << n) | masked;
        self.nacc += n;
        self.bit_length += n as u64;
        while self.nacc >= 8 {
            self.nacc -= 8;
            self.bytes.push((self.acc >> self.nacc) as u8);
        }
        self.acc &= (1u64 << self.nacc) - 1;
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) {
        self.write_bits(bit as u64, 1);
    }

    /// Writes `count` copies of `bit`.
    pub fn write_repeated(&mut self, bit: bool, mut count: u32) {
        let pattern = if bit { u64::MAX } else { 0 };
        while count > 0 {
            let n = count.min(32);
            self.write_bits(pattern, n);
            count -= n;
        }
    }

    pub fn bit_length(&self) -> u64 {
        self.bit_length
    }

    pub fn finish(mut self) -> BitStream {
        if self.nacc > 0 {
            self.bytes.push((self.acc << (8 - self.nacc)) as u8);
        }
        BitStream {
            bytes: self.bytes,
            bit_length: self.bit_length,
        }
    }
}

#[derive(Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
    limit: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader {
            bytes,
            pos: 0,
            limit: bytes.len() as u64 * 8,
        }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.pos
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.limit {
            return Err(Error::TruncatedStream);
        }
        let byte = self.bytes[(self.pos >> 3) as usize];
        let bit = byte >> (7 - (self.pos & 7)) & 1;
        self.pos += 1;
        Ok(bit == 1)
    }

    /// Reads `n <= 32` bits as an unsigned integer, most significant first.
    #[inline]
    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        debug_assert!(n <= 32);
        if self.remaining() < n as u64 {
            return Err(Error::TruncatedStream);
        }
        let mut value = 0u64;
        let mut left = n;
        while left > 0 {
            let byte = self.bytes[(self.pos >> 3) as usize] as u64;
            let offset = (self.pos & 7) as u32;
            let avail = 8 - offset;
            let take = avail.min(left);
            let bits = (byte >> (avail - take)) & ((1 << take) - 1);
            value = (value << take) | bits;
            left -= take;
            self.pos += take as u64;
        }
        Ok(value)
    }

    /// Counts bits equal to `bit` up to and including the first differing one,
    /// returning the count of equal bits.
    pub fn read_run(&mut self, bit: bool, max: u32) -> Result<u32> {
        let mut n = 0;
        while self.read_bit()? == bit {
            n += 1;
            if n > max {
                return Err(Error::InvalidCodeTable(format!(
                    "run longer than {max} bits"
                )));
            }
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_packing() {
        let mut w = BitWriter::new();
        w.write_bits(0b11, 2);
        w.write_bits(0b01, 2);
        w.write_bits(0b10, 2);
        let s = w.finish();
        assert_eq!(s.bytes, vec![0b1101_1000]);
        assert_eq!(s.bit_length, 6);
        assert_eq!(s.to_bit_string(), "110110");
    }

    #[test]
    fn read_back_mixed_widths() {
        let mut w = BitWriter::new();
        let items = [
            (5u64, 3u32),
            (0xdead_beef, 32),
            (0, 0),
            (1, 1),
            (0x1234, 13),
        ];
        for &(v, n) in &items {
            w.write_bits(v, n);
        }
        let s = w.finish();
        let mut r = BitReader::new(&s.bytes);
        for &(v, n) in &items {
            assert_eq!(r.read_bits(n).unwrap(), v & ((1u64 << n) - 1));
        }
        assert_eq!(r.position(), s.bit_length);
    }

    #[test]
    fn truncation() {
        let mut r = BitReader::new(&[0xff]);
        assert!(r.read_bits(8).is_ok());
        assert!(matches!(r.read_bit(), Err(Error::TruncatedStream)));
        let mut r = BitReader::new(&[0xff]);
        assert!(matches!(r.read_bits(9), Err(Error::TruncatedStream)));
    }

    #[test]
    fn repeated_bits() {
        let mut w = BitWriter::new();
        w.write_repeated(true, 40);
        w.write_bit(false);
        let s = w.finish();
        assert_eq!(s.bit_length, 41);
        let mut r = BitReader::new(&s.bytes);
        assert_eq!(r.read_run(true, 64).unwrap(), 40);
    }
}
