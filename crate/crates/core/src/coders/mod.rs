//! Entropy and dictionary coders, plus a uniform [`Coder`] interface over
//! them and over external backends.

pub mod bitpack;
pub mod bits;
pub mod drh;
pub mod expgolomb;
pub mod huffman;
pub mod lzss;
pub mod range;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bitpack::{bitpack_decode, bitpack_encode, DEFAULT_BLOCK_SIZE};
pub use bits::{BitReader, BitStream, BitWriter};
pub use drh::{drh_decode, drh_encode};
pub use expgolomb::{expgolomb_decode, expgolomb_encode};
pub use huffman::{huffman_decode, huffman_encode, CodeTable};
pub use lzss::{lzss_decode, lzss_encode};
pub use range::{range_decode, range_encode, FrequencyModel};

use crate::backends::{
    backend_compress, backend_decompress, deserialize_series, serialize_series, BackendDescriptor,
    BackendId,
};
use crate::error::{Error, Result};
use crate::transforms::{unzigzag_all, zigzag_all};

/// Byte width used when tokens are serialized for byte-oriented coders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SampleWidth {
    W16,
    W32,
}

impl SampleWidth {
    pub const fn bytes(self) -> usize {
        match self {
            SampleWidth::W16 => 2,
            SampleWidth::W32 => 4,
        }
    }

    pub const fn bits(self) -> u8 {
        (self.bytes() * 8) as u8
    }

    pub fn from_bits(bits: u8) -> Option<Self> {
        match bits {
            16 => Some(SampleWidth::W16),
            32 => Some(SampleWidth::W32),
            _ => None,
        }
    }

    /// Narrowest width holding every value.
    pub fn fitting(values: &[i32]) -> Self {
        if values
            .iter()
            .all(|&v| (i16::MIN as i32..=i16::MAX as i32).contains(&v))
        {
            SampleWidth::W16
        } else {
            SampleWidth::W32
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum CoderId {
    ExpGolomb,
    BitPack,
    Huffman,
    Drh,
    Range,
    Lzss,
    Backend(BackendId),
}

impl CoderId {
    /// The in-repo coders, in registry order.
    pub const INTERNAL: [CoderId; 6] = [
        CoderId::ExpGolomb,
        CoderId::BitPack,
        CoderId::Huffman,
        CoderId::Drh,
        CoderId::Range,
        CoderId::Lzss,
    ];

    /// Container registry byte.
    pub fn code(self) -> u8 {
        match self {
            CoderId::ExpGolomb => 1,
            CoderId::BitPack => 2,
            CoderId::Huffman => 3,
            CoderId::Drh => 4,
            CoderId::Range => 5,
            CoderId::Lzss => 6,
            CoderId::Backend(b) => b.code(),
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        CoderId::INTERNAL
            .into_iter()
            .find(|c| c.code() == code)
            .or_else(|| BackendId::from_code(code).map(CoderId::Backend))
    }

    pub fn name(self) -> &'static str {
        match self {
            CoderId::ExpGolomb => "expgolomb",
            CoderId::BitPack => "bitpack",
            CoderId::Huffman => "huffman",
            CoderId::Drh => "drh",
            CoderId::Range => "range",
            CoderId::Lzss => "lzss",
            CoderId::Backend(b) => b.name(),
        }
    }

    pub fn is_internal(self) -> bool {
        !matches!(self, CoderId::Backend(_))
    }

    /// Whether the coder models symbol frequencies order-0 (and so is bounded
    /// by the empirical entropy).
    pub fn is_order0_entropy(self) -> bool {
        matches!(self, CoderId::Huffman | CoderId::Range)
    }
}

impl fmt::Display for CoderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoderId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let internal = match lower.as_str() {
            "expgolomb" | "exp-golomb" | "golomb" => Some(CoderId::ExpGolomb),
            "bitpack" | "bitpacking" => Some(CoderId::BitPack),
            "huffman" => Some(CoderId::Huffman),
            "drh" => Some(CoderId::Drh),
            "range" | "arithmetic" => Some(CoderId::Range),
            "lzss" => Some(CoderId::Lzss),
            _ => None,
        };
        match internal {
            Some(c) => Ok(c),
            None => lower.parse::<BackendId>().map(CoderId::Backend),
        }
    }
}

impl From<CoderId> for String {
    fn from(c: CoderId) -> String {
        c.name().to_string()
    }
}

impl TryFrom<String> for CoderId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Coder output with the share of bytes spent on model headers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Encoded {
    pub bytes: Vec<u8>,
    pub header_bytes: usize,
}

impl Encoded {
    fn plain(bytes: Vec<u8>) -> Self {
        Encoded {
            bytes,
            header_bytes: 0,
        }
    }
}

/// Entropy stage of a pipeline: integer tokens in, self-contained bytes out.
/// Decoding needs the token count and serialization width recorded by the
/// container.
pub trait Coder: Send + Sync {
    fn id(&self) -> CoderId;
    fn encode(&self, tokens: &[i32], width: SampleWidth) -> Result<Encoded>;
    fn decode(&self, bytes: &[u8], count: usize, width: SampleWidth) -> Result<Vec<i32>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExpGolombCoder;

impl Coder for ExpGolombCoder {
    fn id(&self) -> CoderId {
        CoderId::ExpGolomb
    }

    fn encode(&self, tokens: &[i32], _: SampleWidth) -> Result<Encoded> {
        Ok(Encoded::plain(expgolomb_encode(&zigzag_all(tokens)).bytes))
    }

    fn decode(&self, bytes: &[u8], count: usize, _: SampleWidth) -> Result<Vec<i32>> {
        Ok(unzigzag_all(&expgolomb_decode(bytes, count)?))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BitPackCoder {
    pub block_size: usize,
}

impl Default for BitPackCoder {
    fn default() -> Self {
        BitPackCoder {
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }
}

impl Coder for BitPackCoder {
    fn id(&self) -> CoderId {
        CoderId::BitPack
    }

    fn encode(&self, tokens: &[i32], _: SampleWidth) -> Result<Encoded> {
        Ok(Encoded::plain(bitpack_encode(
            &zigzag_all(tokens),
            self.block_size,
        )?))
    }

    fn decode(&self, bytes: &[u8], count: usize, _: SampleWidth) -> Result<Vec<i32>> {
        Ok(unzigzag_all(&bitpack_decode(
            bytes,
            count,
            self.block_size,
        )?))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HuffmanCoder;

impl Coder for HuffmanCoder {
    fn id(&self) -> CoderId {
        CoderId::Huffman
    }

    fn encode(&self, tokens: &[i32], _: SampleWidth) -> Result<Encoded> {
        if tokens.is_empty() {
            return Ok(Encoded::default());
        }
        let parts = huffman::huffman_encode_parts(tokens)?;
        Ok(Encoded {
            header_bytes: parts.table.header_len(),
            bytes: parts.to_bytes(),
        })
    }

    fn decode(&self, bytes: &[u8], count: usize, _: SampleWidth) -> Result<Vec<i32>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        huffman_decode(bytes, count)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DrhCoder;

impl Coder for DrhCoder {
    fn id(&self) -> CoderId {
        CoderId::Drh
    }

    fn encode(&self, tokens: &[i32], _: SampleWidth) -> Result<Encoded> {
        Ok(Encoded::plain(drh_encode(tokens)?.bytes))
    }

    fn decode(&self, bytes: &[u8], count: usize, _: SampleWidth) -> Result<Vec<i32>> {
        drh_decode(bytes, count)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RangeCoder;

impl Coder for RangeCoder {
    fn id(&self) -> CoderId {
        CoderId::Range
    }

    fn encode(&self, tokens: &[i32], _: SampleWidth) -> Result<Encoded> {
        if tokens.is_empty() {
            return Ok(Encoded::default());
        }
        let parts = range::range_encode_parts(tokens)?;
        Ok(Encoded {
            header_bytes: parts.model.header_len(),
            bytes: parts.to_bytes(),
        })
    }

    fn decode(&self, bytes: &[u8], count: usize, _: SampleWidth) -> Result<Vec<i32>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        range_decode(bytes, count)
    }
}

/// LZSS over the little-endian serialization of the tokens.
#[derive(Debug, Clone, Copy, Default)]
pub struct LzssCoder;

impl Coder for LzssCoder {
    fn id(&self) -> CoderId {
        CoderId::Lzss
    }

    fn encode(&self, tokens: &[i32], width: SampleWidth) -> Result<Encoded> {
        Ok(Encoded::plain(lzss_encode(&serialize_series(
            tokens, width,
        )?)))
    }

    fn decode(&self, bytes: &[u8], count: usize, width: SampleWidth) -> Result<Vec<i32>> {
        let raw = lzss_decode(bytes)?;
        if raw.len() != count * width.bytes() {
            return Err(Error::TruncatedStream);
        }
        deserialize_series(&raw, width)
    }
}

/// Serializes tokens and hands them to an external compressor.
#[derive(Debug, Clone)]
pub struct BackendCoder {
    pub descriptor: BackendDescriptor,
}

impl BackendCoder {
    fn descriptor_for(&self, width: SampleWidth) -> BackendDescriptor {
        let mut d = self.descriptor.clone();
        d.options
            .entry("dtype".into())
            .or_insert_with(|| format!("i{}", width.bits()));
        d
    }
}

impl Coder for BackendCoder {
    fn id(&self) -> CoderId {
        CoderId::Backend(self.descriptor.backend)
    }

    fn encode(&self, tokens: &[i32], width: SampleWidth) -> Result<Encoded> {
        let raw = serialize_series(tokens, width)?;
        Ok(Encoded::plain(backend_compress(
            &raw,
            &self.descriptor_for(width),
        )?))
    }

    fn decode(&self, bytes: &[u8], count: usize, width: SampleWidth) -> Result<Vec<i32>> {
        let raw = backend_decompress(bytes, &self.descriptor_for(width))?;
        if raw.len() != count * width.bytes() {
            return Err(Error::TruncatedStream);
        }
        deserialize_series(&raw, width)
    }
}

/// A coder choice plus its level, as named on the command line (`huffman`,
/// `zstd:19`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoderSpec {
    pub coder: CoderId,
    pub level: Option<i32>,
}

impl CoderSpec {
    pub fn new(coder: CoderId) -> Self {
        CoderSpec { coder, level: None }
    }

    pub fn with_level(coder: CoderId, level: i32) -> Self {
        CoderSpec {
            coder,
            level: Some(level),
        }
    }

    pub fn internal_all() -> Vec<CoderSpec> {
        CoderId::INTERNAL.into_iter().map(CoderSpec::new).collect()
    }

    /// Level actually used: the explicit one or the backend default.
    pub fn effective_level(&self) -> Option<i32> {
        match self.coder {
            CoderId::Backend(b) => self.level.or(b.default_level()),
            _ => None,
        }
    }

    pub fn build(&self) -> Box<dyn Coder> {
        match self.coder {
            CoderId::ExpGolomb => Box::new(ExpGolombCoder),
            CoderId::BitPack => Box::new(BitPackCoder::default()),
            CoderId::Huffman => Box::new(HuffmanCoder),
            CoderId::Drh => Box::new(DrhCoder),
            CoderId::Range => Box::new(RangeCoder),
            CoderId::Lzss => Box::new(LzssCoder),
            CoderId::Backend(b) => Box::new(BackendCoder {
                descriptor: BackendDescriptor {
                    backend: b,
                    level: self.level,
                    options: Default::default(),
                },
            }),
        }
    }

    pub fn label(&self) -> String {
        match self.effective_level() {
            Some(l) => format!("{}:{l}", self.coder),
            None => self.coder.to_string(),
        }
    }
}

impl fmt::Display for CoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for CoderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, level) = match s.split_once(':') {
            Some((n, l)) => {
                let level = l
                    .trim()
                    .parse::<i32>()
                    .map_err(|_| Error::InvalidParameter(format!("level {l:?}")))?;
                (n, Some(level))
            }
            None => (s, None),
        };
        let coder: CoderId = name.parse()?;
        if level.is_some() && coder.is_internal() {
            return Err(Error::InvalidParameter(format!(
                "{coder} does not take a level"
            )));
        }
        Ok(CoderSpec { coder, level })
    }
}
