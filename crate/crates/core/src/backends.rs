//! Adapters over external compressors.
//!
//! Every backend is registered whether or not it was compiled in; calling an
//! absent one yields [`Error::BackendUnavailable`] so reports can mark the
//! cell instead of silently dropping it. Payloads are the library's standard
//! framing with nothing added.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coders::SampleWidth;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendId {
    Deflate,
    Zstd,
    Brotli,
    Bzip2,
    Lzma,
    Lz4,
    Snappy,
    Blosc,
    Sprintz,
    Pcodec,
}

impl BackendId {
    pub const ALL: [BackendId; 10] = [
        BackendId::Deflate,
        BackendId::Zstd,
        BackendId::Brotli,
        BackendId::Bzip2,
        BackendId::Lzma,
        BackendId::Lz4,
        BackendId::Snappy,
        BackendId::Blosc,
        BackendId::Sprintz,
        BackendId::Pcodec,
    ];

    pub fn code(self) -> u8 {
        16 + BackendId::ALL.iter().position(|&b| b == self).unwrap() as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        code.checked_sub(16)
            .and_then(|i| BackendId::ALL.get(i as usize).copied())
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendId::Deflate => "deflate",
            BackendId::Zstd => "zstd",
            BackendId::Brotli => "brotli",
            BackendId::Bzip2 => "bzip2",
            BackendId::Lzma => "lzma",
            BackendId::Lz4 => "lz4",
            BackendId::Snappy => "snappy",
            BackendId::Blosc => "blosc",
            BackendId::Sprintz => "sprintz",
            BackendId::Pcodec => "pcodec",
        }
    }

    /// Highest or near-highest settings used for benchmarking.
    pub fn default_level(self) -> Option<i32> {
        match self {
            BackendId::Deflate => Some(9),
            BackendId::Zstd => Some(19),
            BackendId::Brotli => Some(10),
            BackendId::Bzip2 => Some(9),
            BackendId::Lzma => Some(6),
            BackendId::Blosc => Some(9),
            BackendId::Pcodec => Some(12),
            BackendId::Lz4 | BackendId::Snappy | BackendId::Sprintz => None,
        }
    }

    pub fn is_available(self) -> bool {
        match self {
            BackendId::Deflate => cfg!(feature = "deflate"),
            BackendId::Zstd => cfg!(feature = "zstd"),
            BackendId::Brotli => cfg!(feature = "brotli"),
            BackendId::Bzip2 => cfg!(feature = "bzip2"),
            BackendId::Lzma => cfg!(feature = "lzma"),
            BackendId::Lz4 => cfg!(feature = "lz4"),
            BackendId::Snappy => cfg!(feature = "snappy"),
            BackendId::Pcodec => cfg!(feature = "pcodec"),
            // No pure-library binding is wired up for these two.
            BackendId::Blosc | BackendId::Sprintz => false,
        }
    }

    pub fn available() -> Vec<BackendId> {
        BackendId::ALL
            .into_iter()
            .filter(|b| b.is_available())
            .collect()
    }
}

impl fmt::Display for BackendId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BackendId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let alias = match lower.as_str() {
            "zlib" => "deflate",
            "xz" => "lzma",
            "snap" => "snappy",
            "pco" => "pcodec",
            other => other,
        };
        BackendId::ALL
            .into_iter()
            .find(|b| b.name() == alias)
            .ok_or_else(|| Error::UnregisteredBackend(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendDescriptor {
    pub backend: BackendId,
    pub level: Option<i32>,
    /// Free-form options. `dtype` (`i16`/`i32`) tells numeric backends how to
    /// read the bytes.
    pub options: BTreeMap<String, String>,
}

impl BackendDescriptor {
    pub fn new(backend: BackendId) -> Self {
        BackendDescriptor {
            backend,
            level: None,
            options: BTreeMap::new(),
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        Ok(Self::new(id.parse()?))
    }

    pub fn level_or_default(&self) -> Option<i32> {
        self.level.or(self.backend.default_level())
    }

    #[allow(dead_code)]
    fn width(&self) -> Result<SampleWidth> {
        match self.options.get("dtype").map(String::as_str) {
            None | Some("i16") => Ok(SampleWidth::W16),
            Some("i32") => Ok(SampleWidth::W32),
            Some(other) => Err(Error::InvalidParameter(format!("dtype {other:?}"))),
        }
    }
}

/// Fixed-width little-endian two's complement bytes.
pub fn serialize_series(samples: &[i32], width: SampleWidth) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(samples.len() * width.bytes());
    match width {
        SampleWidth::W16 => {
            for &v in samples {
                let narrow = i16::try_from(v).map_err(|_| Error::OutOfRange {
                    value: v as i64,
                    bits: 16,
                })?;
                out.extend_from_slice(&narrow.to_le_bytes());
            }
        }
        SampleWidth::W32 => {
            for &v in samples {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn deserialize_series(bytes: &[u8], width: SampleWidth) -> Result<Vec<i32>> {
    if !bytes.len().is_multiple_of(width.bytes()) {
        return Err(Error::TruncatedStream);
    }
    Ok(match width {
        SampleWidth::W16 => bytes
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as i32)
            .collect(),
        SampleWidth::W32 => bytes
            .chunks_exact(4)
            .map(|c| i32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect(),
    })
}

pub fn backend_compress(data: &[u8], desc: &BackendDescriptor) -> Result<Vec<u8>> {
    let b = desc.backend;
    if !b.is_available() {
        return Err(Error::BackendUnavailable(b));
    }
    imp::compress(data, desc).map_err(|e| match e {
        e @ (Error::Backend { .. } | Error::BackendUnavailable(_) | Error::InvalidParameter(_)) => {
            e
        }
        other => Error::backend(b, other),
    })
}

pub fn backend_decompress(data: &[u8], desc: &BackendDescriptor) -> Result<Vec<u8>> {
    let b = desc.backend;
    if !b.is_available() {
        return Err(Error::BackendUnavailable(b));
    }
    imp::decompress(data, desc).map_err(|e| match e {
        e @ (Error::Backend { .. } | Error::BackendUnavailable(_) | Error::InvalidParameter(_)) => {
            e
        }
        other => Error::backend(b, other),
    })
}

#[allow(unused_imports, unused_variables, unused_mut, dead_code)]
mod imp {
    use std::io::{Read, Write};

    use super::{deserialize_series, serialize_series, BackendDescriptor, BackendId};
    use crate::coders::SampleWidth;
    use crate::error::{Error, Result};

    fn level(desc: &BackendDescriptor) -> i32 {
        desc.level_or_default().unwrap_or(0)
    }

    pub(super) fn compress(data: &[u8], desc: &BackendDescriptor) -> Result<Vec<u8>> {
        let b = desc.backend;
        let fail = |e: &dyn std::fmt::Display| Error::backend(b, e);
        match b {
            #[cfg(feature = "deflate")]
            BackendId::Deflate => {
                let lvl = flate2::Compression::new(level(desc).clamp(0, 9) as u32);
                let mut enc = flate2::write::ZlibEncoder::new(Vec::new(), lvl);
                enc.write_all(data).map_err(|e| fail(&e))?;
                enc.finish().map_err(|e| fail(&e))
            }
            #[cfg(feature = "zstd")]
            BackendId::Zstd => zstd::bulk::compress(data, level(desc)).map_err(|e| fail(&e)),
            #[cfg(feature = "brotli")]
            BackendId::Brotli => {
                let mut out = Vec::new();
                let params = brotli::enc::BrotliEncoderParams {
                    quality: level(desc).clamp(0, 11),
                    ..Default::default()
                };
                brotli::BrotliCompress(&mut &data[..], &mut out, &params).map_err(|e| fail(&e))?;
                Ok(out)
            }
            #[cfg(feature = "bzip2")]
            BackendId::Bzip2 => {
                let lvl = bzip2::Compression::new(level(desc).clamp(1, 9) as u32);
                let mut enc = bzip2::write::BzEncoder::new(Vec::new(), lvl);
                enc.write_all(data).map_err(|e| fail(&e))?;
                enc.finish().map_err(|e| fail(&e))
            }
            #[cfg(feature = "lzma")]
            BackendId::Lzma => {
                let mut enc =
                    xz2::write::XzEncoder::new(Vec::new(), level(desc).clamp(0, 9) as u32);
                enc.write_all(data).map_err(|e| fail(&e))?;
                enc.finish().map_err(|e| fail(&e))
            }
            #[cfg(feature = "lz4")]
            BackendId::Lz4 => Ok(lz4_flex::frame::FrameEncoder::new(Vec::new())
                .and_write(data)
                .map_err(|e| fail(&e))?),
            #[cfg(feature = "snappy")]
            BackendId::Snappy => snap::raw::Encoder::new()
                .compress_vec(data)
                .map_err(|e| fail(&e)),
            #[cfg(feature = "pcodec")]
            BackendId::Pcodec => {
                let cfg = pco::ChunkConfig::default()
                    .with_compression_level(level(desc).clamp(0, 12) as usize);
                let res = match desc.width()? {
                    SampleWidth::W16 => {
                        let nums: Vec<i16> = deserialize_series(data, SampleWidth::W16)?
                            .into_iter()
                            .map(|v| v as i16)
                            .collect();
                        pco::standalone::simple_compress(&nums, &cfg)
                    }
                    SampleWidth::W32 => {
                        let nums = deserialize_series(data, SampleWidth::W32)?;
                        pco::standalone::simple_compress(&nums, &cfg)
                    }
                };
                res.map_err(|e| fail(&e))
            }
            _ => Err(Error::BackendUnavailable(b)),
        }
    }

    pub(super) fn decompress(data: &[u8], desc: &BackendDescriptor) -> Result<Vec<u8>> {
        let b = desc.backend;
        let fail = |e: &dyn std::fmt::Display| Error::backend(b, e);
        let mut out: Vec<u8> = Vec::new();
        match b {
            #[cfg(feature = "deflate")]
            BackendId::Deflate => {
                flate2::read::ZlibDecoder::new(data)
                    .read_to_end(&mut out)
                    .map_err(|e| fail(&e))?;
                Ok(out)
            }
            #[cfg(feature = "zstd")]
            BackendId::Zstd => zstd::stream::decode_all(data).map_err(|e| fail(&e)),
            #[cfg(feature = "brotli")]
            BackendId::Brotli => {
                brotli::BrotliDecompress(&mut &data[..], &mut out).map_err(|e| fail(&e))?;
                Ok(out)
            }
            #[cfg(feature = "bzip2")]
            BackendId::Bzip2 => {
                bzip2::read::BzDecoder::new(data)
                    .read_to_end(&mut out)
                    .map_err(|e| fail(&e))?;
                Ok(out)
            }
            #[cfg(feature = "lzma")]
            BackendId::Lzma => {
                xz2::read::XzDecoder::new(data)
                    .read_to_end(&mut out)
                    .map_err(|e| fail(&e))?;
                Ok(out)
            }
            #[cfg(feature = "lz4")]
            BackendId::Lz4 => {
                lz4_flex::frame::FrameDecoder::new(data)
                    .read_to_end(&mut out)
                    .map_err(|e| fail(&e))?;
                Ok(out)
            }
            #[cfg(feature = "snappy")]
            BackendId::Snappy => snap::raw::Decoder::new()
                .decompress_vec(data)
                .map_err(|e| fail(&e)),
            #[cfg(feature = "pcodec")]
            BackendId::Pcodec => match desc.width()? {
                SampleWidth::W16 => {
                    let nums: Vec<i16> =
                        pco::standalone::simple_decompress(data).map_err(|e| fail(&e))?;
                    let wide: Vec<i32> = nums.into_iter().map(i32::from).collect();
                    serialize_series(&wide, SampleWidth::W16)
                }
                SampleWidth::W32 => {
                    let nums: Vec<i32> =
                        pco::standalone::simple_decompress(data).map_err(|e| fail(&e))?;
                    serialize_series(&nums, SampleWidth::W32)
                }
            },
            _ => Err(Error::BackendUnavailable(b)),
        }
    }

    #[cfg(feature = "lz4")]
    trait AndWrite: Sized {
        fn and_write(self, data: &[u8]) -> std::io::Result<Vec<u8>>;
    }

    #[cfg(feature = "lz4")]
    impl AndWrite for lz4_flex::frame::FrameEncoder<Vec<u8>> {
        fn and_write(mut self, data: &[u8]) -> std::io::Result<Vec<u8>> {
            self.write_all(data)?;
            self.finish().map_err(std::io::Error::other)
        }
    }
}
