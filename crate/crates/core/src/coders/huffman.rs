//! Dynamic canonical Huffman coding over `i32` symbols.
//!
//! Header layout: `u32` symbol count, then `(i32 symbol, u8 length)` pairs in
//! ascending symbol order, little-endian. Codes are rebuilt canonically from
//! the lengths alone. A one-symbol alphabet gets a 1-bit code.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::bits::{BitReader, BitStream, BitWriter};
use crate::error::{Error, Result};
use crate::metrics::value_counts;

pub const MAX_CODE_LEN: u8 = 32;

/// Symbol to code-length assignment, ascending by symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    entries: Vec<(i32, u8)>,
}

fn code_lengths(counts: &[u64]) -> Vec<u8> {
    if counts.len() == 1 {
        return vec![1];
    }
    let mut weights = counts.to_vec();
    loop {
        let lens = tree_depths(&weights);
        if lens.iter().all(|&l| l <= MAX_CODE_LEN as u32) {
            return lens.into_iter().map(|l| l as u8).collect();
        }
        // Flatten the distribution until the tree fits the length limit.
        for w in &mut weights {
            *w = (*w / 2).max(1);
        }
    }
}

fn tree_depths(weights: &[u64]) -> Vec<u32> {
    let n = weights.len();
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| Reverse((w, i)))
        .collect();
    let mut next = n;
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().unwrap();
        let Reverse((wb, b)) = heap.pop().unwrap();
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((wa + wb, next)));
        next += 1;
    }
    // Parents always have larger indices, so a reverse sweep fills depths.
    let mut depth = vec![0u32; 2 * n - 1];
    for i in (0..2 * n - 2).rev() {
        depth[i] = depth[parent[i]] + 1;
    }
    depth.truncate(n);
    depth
}

impl CodeTable {
    pub fn from_counts(counts: &[(i32, u64)]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyInput);
        }
        let weights: Vec<u64> = counts.iter().map(|&(_, c)| c).collect();
        let lens = code_lengths(&weights);
        Ok(CodeTable {
            entries: counts.iter().map(|&(s, _)| s).zip(lens).collect(),
        })
    }

    pub fn from_lengths(entries: Vec<(i32, u8)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidCodeTable("no symbols".into()));
        }
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidCodeTable("symbols not ascending".into()));
        }
        let mut kraft: u64 = 0;
        for &(s, len) in &entries {
            if len == 0 || len > MAX_CODE_LEN {
                return Err(Error::InvalidCodeTable(format!(
                    "symbol {s} has length {len}"
                )));
            }
            kraft += 1u64 << (MAX_CODE_LEN - len);
        }
        if kraft > 1u64 << MAX_CODE_LEN {
            return Err(Error::InvalidCodeTable("Kraft sum exceeds 1".into()));
        }
        Ok(CodeTable { entries })
    }

    pub fn entries(&self) -> &[(i32, u8)] {
        &self.entries
    }

    pub fn len_of(&self, symbol: i32) -> Option<u8> {
        self.entries
            .binary_search_by_key(&symbol, |&(s, _)| s)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn header_len(&self) -> usize {
        4 + 5 * self.entries.len()
    }

    pub fn write_header(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for &(s, len) in &self.entries {
            out.extend_from_slice(&s.to_le_bytes());
            out.push(len);
        }
    }

    pub fn read_header(bytes: &[u8]) -> Result<(Self, usize)> {
        let count = bytes
            .get(..4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()) as usize)
            .ok_or(Error::TruncatedStream)?;
        if count == 0 {
            return Err(Error::InvalidCodeTable("symbol count is zero".into()));
        }
        let end = count
            .checked_mul(5)
            .and_then(|b| b.checked_add(4))
            .ok_or(Error::TruncatedStream)?;
        let body = bytes.get(4..end).ok_or(Error::TruncatedStream)?;
        let entries = body
            .chunks_exact(5)
            .map(|c| (i32::from_le_bytes([c[0], c[1], c[2], c[3]]), c[4]))
            .collect();
        Ok((CodeTable::from_lengths(entries)?, end))
    }

    /// Canonical order: by length, then symbol.
    fn canonical_order(&self) -> Vec<(i32, u8)> {
        let mut order = self.entries.clone();
        order.sort_by_key(|&(s, l)| (l, s));
        order
    }

    /// `(code, length)` per entry, in ascending symbol order.
    pub fn codes(&self) -> Vec<(u32, u8)> {
        let order = self.canonical_order();
        let mut assigned: Vec<(i32, u32, u8)> = Vec::with_capacity(order.len());
        let mut code: u64 = 0;
        let mut prev_len = order[0].1;
        for (i, &(s, l)) in order.iter().enumerate() {
            if i > 0 {
                code = (code + 1) << (l - prev_len);
            }
            prev_len = l;
            assigned.push((s, code as u32, l));
        }
        assigned.sort_by_key(|&(s, _, _)| s);
        assigned.into_iter().map(|(_, c, l)| (c, l)).collect()
    }
}

struct Decoder {
    /// Symbols in canonical order.
    symbols: Vec<i32>,
    first_code: [u64; MAX_CODE_LEN as usize + 1],
    first_index: [usize; MAX_CODE_LEN as usize + 1],
    count: [usize; MAX_CODE_LEN as usize + 1],
}

impl Decoder {
    fn new(table: &CodeTable) -> Self {
        let order = table.canonical_order();
        let mut count = [0usize; MAX_CODE_LEN as usize + 1];
        for &(_, l) in &order {
            count[l as usize] += 1;
        }
        let mut first_code = [0u64; MAX_CODE_LEN as usize + 1];
        let mut first_index = [0usize; MAX_CODE_LEN as usize + 1];
        let mut code = 0u64;
        let mut index = 0usize;
        for len in 1..=MAX_CODE_LEN as usize {
            first_code[len] = code;
            first_index[len] = index;
            code = (code + count[len] as u64) << 1;
            index += count[len];
        }
        Decoder {
            symbols: order.into_iter().map(|(s, _)| s).collect(),
            first_code,
            first_index,
            count,
        }
    }

    fn next(&self, r: &mut BitReader<'_>) -> Result<i32> {
        let mut code = 0u64;
        for len in 1..=MAX_CODE_LEN as usize {
            code = (code << 1) | r.read_bit()? as u64;
            let offset = code.wrapping_sub(self.first_code[len]);
            if offset < self.count[len] as u64 {
                return Ok(self.symbols[self.first_index[len] + offset as usize]);
            }
        }
        Err(Error::InvalidCodeTable(
            "bit pattern matches no code".into(),
        ))
    }
}

#[derive(Debug, Clone)]
pub struct HuffmanEncoded {
    pub table: CodeTable,
    pub payload: BitStream,
}

impl HuffmanEncoded {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.table.header_len() + self.payload.bytes.len());
        self.table.write_header(&mut out);
        out.extend_from_slice(&self.payload.bytes);
        out
    }
}

pub fn huffman_encode_parts(values: &[i32]) -> Result<HuffmanEncoded> {
    let table = CodeTable::from_counts(&value_counts(values))?;
    let codes = table.codes();
    let mut w = BitWriter::with_capacity(values.len());
    for &v in values {
        let i = table
            .entries
            .binary_search_by_key(&v, |&(s, _)| s)
            .expect("symbol present in its own table");
        let (code, len) = codes[i];
        w.write_bits(code as u64, len as u32);
    }
    Ok(HuffmanEncoded {
        table,
        payload: w.finish(),
    })
}

/// Header followed by the payload bits.
pub fn huffman_encode(values: &[i32]) -> Result<Vec<u8>> {
    Ok(huffman_encode_parts(values)?.to_bytes())
}

pub fn huffman_decode(bytes: &[u8], count: usize) -> Result<Vec<i32>> {
    let (table, used) = CodeTable::read_header(bytes)?;
    let decoder = Decoder::new(&table);
    let mut r = BitReader::new(&bytes[used..]);
    (0..count).map(|_| decoder.next(&mut r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_pair_gets_one_bit_each() {
        let vals: Vec<i32> = (0..100).map(|i| if i % 2 == 0 { -3 } else { 8 }).collect();
        let enc = huffman_encode_parts(&vals).unwrap();
        assert_eq!(enc.table.entries(), &[(-3, 1), (8, 1)]);
        assert_eq!(enc.payload.bit_length, 100);
        assert_eq!(huffman_decode(&enc.to_bytes(), 100).unwrap(), vals);
    }

    #[test]
    fn constant_series_costs_one_bit_per_sample() {
        let vals = vec![42; 77];
        let enc = huffman_encode_parts(&vals).unwrap();
        assert_eq!(enc.payload.bit_length, 77);
        assert_eq!(enc.table.header_len(), 9);
        assert_eq!(huffman_decode(&enc.to_bytes(), 77).unwrap(), vals);
    }

    #[test]
    fn canonical_codes_are_prefix_free() {
        let table = CodeTable::from_lengths(vec![(1, 2), (2, 1), (3, 3), (4, 3)]).unwrap();
        // Canonical: 2 -> 0, 1 -> 10, 3 -> 110, 4 -> 111.
        assert_eq!(
            table.codes(),
            vec![(0b10, 2), (0b0, 1), (0b110, 3), (0b111, 3)]
        );
    }

    #[test]
    fn length_limit_holds_on_fibonacci_weights() {
        let mut counts = Vec::new();
        let (mut a, mut b) = (1u64, 1u64);
        for s in 0..45 {
            counts.push((s, a));
            (a, b) = (b, a + b);
        }
        let table = CodeTable::from_counts(&counts).unwrap();
        assert!(table.entries().iter().all(|&(_, l)| l <= MAX_CODE_LEN));
        assert!(CodeTable::from_lengths(table.entries().to_vec()).is_ok());
    }

    #[test]
    fn invalid_tables() {
        assert!(matches!(
            CodeTable::read_header(&[0, 0, 0, 0]),
            Err(Error::InvalidCodeTable(_))
        ));
        assert!(CodeTable::from_lengths(vec![(0, 1), (1, 1), (2, 1)]).is_err());
        assert!(CodeTable::from_lengths(vec![(0, 0)]).is_err());
        assert!(CodeTable::from_lengths(vec![(0, 33)]).is_err());
        assert!(CodeTable::from_lengths(vec![(2, 1), (1, 1)]).is_err());
    }

    #[test]
    fn truncated_payload() {
        let vals: Vec<i32> = (0..50).collect();
        let bytes = huffman_encode(&vals).unwrap();
        assert!(matches!(
            huffman_decode(&bytes[..bytes.len() - 3], 50),
            Err(Error::TruncatedStream)
        ));
    }
}
