//! Transform chain plus coder, producing and consuming containers.

use serde::{Deserialize, Serialize};

use crate::coders::{Coder, CoderSpec, SampleWidth};
use crate::container::{framing_len, ChannelBlock, Container};
use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::transforms::{chain_apply, chain_invert, QuarsMap, SideHeaders, TransformChain};

/// Bytes per sample of the uncompressed 16-bit source.
pub const SOURCE_SAMPLE_BYTES: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pipeline {
    pub chain: TransformChain,
    pub coder: CoderSpec,
}

/// Container bytes with a breakdown of where they went.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compressed {
    pub bytes: Vec<u8>,
    /// Coder output excluding model headers.
    pub payload_bytes: u64,
    /// Coder model headers (code tables, frequency tables).
    pub model_header_bytes: u64,
    /// Container framing and transform side headers.
    pub framing_bytes: u64,
}

pub fn original_bytes(channels: &[TimeSeries]) -> u64 {
    channels.iter().map(|c| c.len() as u64).sum::<u64>() * SOURCE_SAMPLE_BYTES
}

impl Pipeline {
    pub fn new(chain: TransformChain, coder: CoderSpec) -> Self {
        Pipeline { chain, coder }
    }

    pub fn compress(&self, channels: &[TimeSeries]) -> Result<Compressed> {
        compress_with(channels, &self.chain, self.coder.build().as_ref())
    }
}

fn side_header(count: usize, headers: &SideHeaders) -> Vec<u8> {
    let mut out = (count as u64).to_le_bytes().to_vec();
    if let Some(map) = &headers.quars {
        out.extend_from_slice(&map.to_bytes());
    }
    out
}

fn parse_side_header(bytes: &[u8], chain: &TransformChain) -> Result<(usize, SideHeaders)> {
    let count = bytes
        .get(..8)
        .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
        .ok_or(Error::TruncatedStream)?;
    let count = usize::try_from(count).map_err(|_| Error::TruncatedStream)?;
    let rest = &bytes[8..];
    let mut headers = SideHeaders::default();
    if chain.has_quars() && count > 0 {
        let (map, used) = QuarsMap::from_bytes(rest)?;
        if used != rest.len() {
            return Err(Error::UnsupportedContainer(
                "trailing side-header bytes".into(),
            ));
        }
        headers.quars = Some(map);
    } else if !rest.is_empty() {
        return Err(Error::UnsupportedContainer(
            "unexpected side-header bytes".into(),
        ));
    }
    Ok((count, headers))
}

/// Compresses each channel independently into one container.
pub fn compress_with(
    channels: &[TimeSeries],
    chain: &TransformChain,
    coder: &dyn Coder,
) -> Result<Compressed> {
    let mut blocks = Vec::with_capacity(channels.len());
    let mut payload = 0u64;
    let mut model = 0u64;
    for ch in channels {
        let (tokens, headers) = if ch.is_empty() {
            (Vec::new(), SideHeaders::default())
        } else {
            chain_apply(ch, chain)?
        };
        let width = SampleWidth::fitting(&tokens);
        let enc = coder.encode(&tokens, width)?;
        model += enc.header_bytes as u64;
        payload += (enc.bytes.len() - enc.header_bytes) as u64;
        blocks.push(ChannelBlock {
            sample_count: ch.len() as u64,
            width,
            side_header: side_header(tokens.len(), &headers),
            payload: enc.bytes,
        });
    }
    let container = Container {
        chain: chain.clone(),
        coder: coder.id(),
        channels: blocks,
    };
    let framing = framing_len(&container) as u64;
    Ok(Compressed {
        bytes: container.to_bytes()?,
        payload_bytes: payload,
        model_header_bytes: model,
        framing_bytes: framing,
    })
}

/// Decodes a container with the coder its id names.
pub fn decompress(bytes: &[u8]) -> Result<Vec<TimeSeries>> {
    let container = Container::from_bytes(bytes)?;
    let coder = CoderSpec::new(container.coder).build();
    decode_container(&container, coder.as_ref())
}

/// Decodes with an explicitly supplied coder.
pub fn decode_container(container: &Container, coder: &dyn Coder) -> Result<Vec<TimeSeries>> {
    container
        .channels
        .iter()
        .enumerate()
        .map(|(i, block)| {
            let (count, headers) = parse_side_header(&block.side_header, &container.chain)?;
            let expected =
                usize::try_from(block.sample_count).map_err(|_| Error::TruncatedStream)?;
            let samples = if expected == 0 {
                if count != 0 {
                    return Err(Error::UnsupportedContainer(
                        "tokens for an empty channel".into(),
                    ));
                }
                Vec::new()
            } else {
                let tokens = coder.decode(&block.payload, count, block.width)?;
                chain_invert(&tokens, &container.chain, &headers)?
            };
            if samples.len() != expected {
                return Err(Error::TruncatedStream);
            }
            Ok(TimeSeries::with_channel(i as u16, samples))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coders::CoderId;

    #[test]
    fn round_trip_multichannel() {
        let chans = vec![
            TimeSeries::with_channel(0, (0..500).map(|i| (i % 37) * 3 - 50).collect()),
            TimeSeries::with_channel(1, vec![]),
            TimeSeries::with_channel(2, vec![7; 40]),
        ];
        for chain in TransformChain::ablation_chains() {
            for spec in CoderSpec::internal_all() {
                let p = Pipeline::new(chain.clone(), spec);
                let c = p.compress(&chans).unwrap();
                assert_eq!(
                    c.bytes.len() as u64,
                    c.payload_bytes + c.model_header_bytes + c.framing_bytes
                );
                assert_eq!(decompress(&c.bytes).unwrap(), chans, "{chain} {spec}");
            }
        }
    }

    #[test]
    fn header_accounting() {
        let chans = vec![TimeSeries::new(vec![1, 2, 3, 1])];
        let p = Pipeline::new(TransformChain::none(), CoderSpec::new(CoderId::Huffman));
        let c = p.compress(&chans).unwrap();
        assert_eq!(c.model_header_bytes, 4 + 5 * 3);
        assert_eq!(original_bytes(&chans), 8);
    }
}
