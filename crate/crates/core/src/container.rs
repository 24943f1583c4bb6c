//! The `TSC1` container.
//!
//! ```text
//! magic "TSC1" | version u8 | transform count u8 | transform ids u8...
//! | coder id u8 | channel count u16
//! per channel: sample count u64 | width u8 (bits) | side header len u32
//!              | side header | payload len u64 | payload
//! ```
//!
//! All integers are little-endian. The per-channel side header is the token
//! count (`u64`) followed by the QuaRs map when the chain has one.

use crate::coders::{CoderId, SampleWidth};
use crate::error::{Error, Result};
use crate::transforms::TransformChain;

pub const MAGIC: &[u8; 4] = b"TSC1";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelBlock {
    pub sample_count: u64,
    pub width: SampleWidth,
    pub side_header: Vec<u8>,
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub chain: TransformChain,
    pub coder: CoderId,
    pub channels: Vec<ChannelBlock>,
}

/// Bytes of framing around the channel payloads, side headers included.
pub fn framing_len(container: &Container) -> usize {
    4 + 1
        + 1
        + container.chain.ids().len()
        + 1
        + 2
        + container
            .channels
            .iter()
            .map(|c| 8 + 1 + 4 + c.side_header.len() + 8)
            .sum::<usize>()
}

impl Container {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let ids = self.chain.ids();
        let channels = u16::try_from(self.channels.len())
            .map_err(|_| Error::InvalidParameter("more than 65535 channels".into()))?;
        let mut out = Vec::with_capacity(
            framing_len(self) + self.channels.iter().map(|c| c.payload.len()).sum::<usize>(),
        );
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(ids.len() as u8);
        out.extend_from_slice(&ids);
        out.push(self.coder.code());
        out.extend_from_slice(&channels.to_le_bytes());
        for c in &self.channels {
            out.extend_from_slice(&c.sample_count.to_le_bytes());
            out.push(c.width.bits());
            let side = u32::try_from(c.side_header.len())
                .map_err(|_| Error::InvalidParameter("side header too large".into()))?;
            out.extend_from_slice(&side.to_le_bytes());
            out.extend_from_slice(&c.side_header);
            out.extend_from_slice(&(c.payload.len() as u64).to_le_bytes());
            out.extend_from_slice(&c.payload);
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Cursor { bytes, pos: 0 };
        let magic = r.take(4).map_err(|_| unsupported("too short for magic"))?;
        if magic != MAGIC {
            return Err(unsupported("bad magic"));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(unsupported(&format!(
                "version {version} (this build reads version {VERSION})"
            )));
        }
        let n_ids = r.u8()? as usize;
        let ids = r.take(n_ids)?.to_vec();
        let chain = TransformChain::from_ids(&ids).map_err(|e| match e {
            Error::InvalidChain(m) => unsupported(&m),
            other => other,
        })?;
        let code = r.u8()?;
        let coder = CoderId::from_code(code)
            .ok_or_else(|| unsupported(&format!("unknown coder id {code}")))?;
        let n_channels = r.u16()? as usize;
        let mut channels = Vec::with_capacity(n_channels.min(1024));
        for _ in 0..n_channels {
            let sample_count = r.u64()?;
            let bits = r.u8()?;
            let width = SampleWidth::from_bits(bits)
                .ok_or_else(|| unsupported(&format!("sample width {bits}")))?;
            let side_len = r.u32()? as usize;
            let side_header = r.take(side_len)?.to_vec();
            let payload_len = usize::try_from(r.u64()?).map_err(|_| Error::TruncatedStream)?;
            let payload = r.take(payload_len)?.to_vec();
            channels.push(ChannelBlock {
                sample_count,
                width,
                side_header,
                payload,
            });
        }
        if r.pos != bytes.len() {
            return Err(unsupported("trailing bytes after last channel"));
        }
        Ok(Container {
            chain,
            coder,
            channels,
        })
    }
}

fn unsupported(msg: &str) -> Error {
    Error::UnsupportedContainer(msg.to_string())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(Error::TruncatedStream)?;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or(Error::TruncatedStream)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Container {
        Container {
            chain: "delta,rle0".parse().unwrap(),
            coder: CoderId::Huffman,
            channels: vec![ChannelBlock {
                sample_count: 3,
                width: SampleWidth::W16,
                side_header: 2u64.to_le_bytes().to_vec(),
                payload: vec![9, 8, 7],
            }],
        }
    }

    #[test]
    fn layout() {
        let c = sample();
        let b = c.to_bytes().unwrap();
        assert_eq!(&b[..4], b"TSC1");
        assert_eq!(b[4], VERSION);
        assert_eq!(&b[5..8], &[2, 1, 2]);
        assert_eq!(b[8], CoderId::Huffman.code());
        assert_eq!(&b[9..11], &[1, 0]);
        assert_eq!(&b[11..19], &3u64.to_le_bytes());
        assert_eq!(b[19], 16);
        assert_eq!(b.len(), framing_len(&c) + 3);
        assert_eq!(Container::from_bytes(&b).unwrap(), c);
    }

    #[test]
    fn rejects_unknown() {
        let b = sample().to_bytes().unwrap();
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(matches!(
            Container::from_bytes(&bad),
            Err(Error::UnsupportedContainer(_))
        ));
        let mut newer = b.clone();
        newer[4] = VERSION + 1;
        assert!(matches!(
            Container::from_bytes(&newer),
            Err(Error::UnsupportedContainer(_))
        ));
        let mut coder = b.clone();
        coder[8] = 200;
        assert!(matches!(
            Container::from_bytes(&coder),
            Err(Error::UnsupportedContainer(_))
        ));
        let mut order = b.clone();
        order[6] = 2;
        order[7] = 1;
        assert!(matches!(
            Container::from_bytes(&order),
            Err(Error::UnsupportedContainer(_))
        ));
        assert!(matches!(
            Container::from_bytes(&b[..b.len() - 1]),
            Err(Error::TruncatedStream)
        ));
    }
}
