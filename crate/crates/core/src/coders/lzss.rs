//! Byte-oriented LZSS with a 4096-byte window and an 18-byte lookahead.
//!
//! Tokens come in groups of up to eight, each group led by a flag byte whose
//! bits (most significant first) mark literals with 1 and back-references
//! with 0. A literal is one byte. A back-reference is a little-endian `u16`
//! holding `(distance - 1) << 4 | (length - 3)`, so distances span 1..=4096
//! and lengths 3..=18. Matches shorter than three bytes are sent as literals
//! since a reference would not be smaller.

use crate::error::{Error, Result};

pub const WINDOW_SIZE: usize = 4096;
pub const LOOKAHEAD: usize = 18;
pub const MIN_MATCH: usize = 3;

const HASH_BITS: u32 = 14;
const MAX_CHAIN: usize = 128;
const NIL: usize = usize::MAX;

#[inline]
fn hash3(b: &[u8]) -> usize {
    let v = (b[0] as u32) << 16 | (b[1] as u32) << 8 | b[2] as u32;
    (v.wrapping_mul(2_654_435_761) >> (32 - HASH_BITS)) as usize
}

struct MatchFinder {
    head: Vec<usize>,
    prev: Vec<usize>,
}

impl MatchFinder {
    fn new() -> Self {
        MatchFinder {
            head: vec![NIL; 1 << HASH_BITS],
            prev: vec![NIL; WINDOW_SIZE],
        }
    }

    fn insert(&mut self, input: &[u8], pos: usize) {
        if pos + MIN_MATCH > input.len() {
            return;
        }
        let h = hash3(&input[pos..]);
        self.prev[pos % WINDOW_SIZE] = self.head[h];
        self.head[h] = pos;
    }

    /// Longest match for `pos` as `(distance, length)`.
    fn find(&self, input: &[u8], pos: usize) -> (usize, usize) {
        let max_len = LOOKAHEAD.min(input.len() - pos);
        if max_len < MIN_MATCH {
            return (0, 0);
        }
        let mut best = (0, 0);
        let mut cand = self.head[hash3(&input[pos..])];
        let mut depth = 0;
        while cand != NIL && depth < MAX_CHAIN {
            let dist = pos - cand;
            if dist > WINDOW_SIZE {
                break;
            }
            let len = input[cand..]
                .iter()
                .zip(&input[pos..pos + max_len])
                .take_while(|(a, b)| a == b)
                .count();
            if len > best.1 {
                best = (dist, len);
                if len == max_len {
                    break;
                }
            }
            let next = self.prev[cand % WINDOW_SIZE];
            if next == NIL || next >= cand {
                break;
            }
            cand = next;
            depth += 1;
        }
        best
    }
}

pub fn lzss_encode(input: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(input.len() + input.len() / 8 + 1);
    let mut finder = MatchFinder::new();
    let mut flag_pos = 0;
    let mut tokens = 8;
    let mut pos = 0;
    while pos < input.len() {
        if tokens == 8 {
            flag_pos = out.len();
            out.push(0);
            tokens = 0;
        }
        let (dist, len) = finder.find(input, pos);
        if len >= MIN_MATCH {
            let word = ((dist - 1) << 4 | (len - MIN_MATCH)) as u16;
            out.extend_from_slice(&word.to_le_bytes());
            for p in pos..pos + len {
                finder.insert(input, p);
            }
            pos += len;
        } else {
            out[flag_pos] |= 0x80 >> tokens;
            out.push(input[pos]);
            finder.insert(input, pos);
            pos += 1;
        }
        tokens += 1;
    }
    out
}

pub fn lzss_decode(input: &[u8]) -> Result<Vec<u8>> {
    let mut out: Vec<u8> = Vec::with_capacity(input.len() * 2);
    let mut pos = 0;
    while pos < input.len() {
        let flags = input[pos];
        pos += 1;
        for bit in 0..8 {
            if pos >= input.len() {
                break;
            }
            if flags & (0x80 >> bit) != 0 {
                out.push(input[pos]);
                pos += 1;
                continue;
            }
            let pair = input.get(pos..pos + 2).ok_or(Error::TruncatedStream)?;
            let word = u16::from_le_bytes([pair[0], pair[1]]) as usize;
            pos += 2;
            let dist = (word >> 4) + 1;
            let len = (word & 0xf) + MIN_MATCH;
            if dist > out.len() {
                return Err(Error::InvalidBackReference(out.len()));
            }
            let start = out.len() - dist;
            for i in 0..len {
                out.push(out[start + i]);
            }
        }
    }
    Ok(out)
}
