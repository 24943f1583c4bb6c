//! Compression-aiding transforms and their composition into chains.

mod delta;
mod quars;
mod rle0;
mod zigzag;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use delta::{delta_decode, delta_encode};
pub use quars::{
    quars_decode, quars_encode, quars_fit, QuarsBin, QuarsMap, DEFAULT_BIN_COUNT, MAX_BIN_COUNT,
};
pub use rle0::{rle0_decode, rle0_encode};
pub use zigzag::{unzigzag, unzigzag_all, zigzag, zigzag_all};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transform {
    Delta,
    Rle0,
    Quars { bins: u16 },
}

impl Transform {
    pub const fn id(self) -> u8 {
        match self {
            Transform::Delta => 1,
            Transform::Rle0 => 2,
            Transform::Quars { .. } => 3,
        }
    }

    /// Decoding never needs the bin count (it lives in the map), so QuaRs ids
    /// come back with the default.
    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(Transform::Delta),
            2 => Some(Transform::Rle0),
            3 => Some(Transform::Quars {
                bins: DEFAULT_BIN_COUNT as u16,
            }),
            _ => None,
        }
    }

    pub const fn short(self) -> &'static str {
        match self {
            Transform::Delta => "D",
            Transform::Rle0 => "R",
            Transform::Quars { .. } => "Q",
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Delta => f.write_str("delta"),
            Transform::Rle0 => f.write_str("rle0"),
            Transform::Quars { bins } if *bins as usize == DEFAULT_BIN_COUNT => {
                f.write_str("quars")
            }
            Transform::Quars { bins } => write!(f, "quars:{bins}"),
        }
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let t =
            match name.trim().to_ascii_lowercase().as_str() {
                "delta" | "d" => Transform::Delta,
                "rle0" | "rle" | "r" => Transform::Rle0,
                "quars" | "q" => {
                    let bins =
                        match param {
                            Some(p) => p.trim().parse::<u16>().ok().filter(|&b| b > 0).ok_or_else(
                                || Error::InvalidParameter(format!("QuaRs bin count {p:?}")),
                            )?,
                            None => DEFAULT_BIN_COUNT as u16,
                        };
                    return Ok(Transform::Quars { bins });
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown transform {other:?} (expected delta, rle0, quars)"
                    )))
                }
            };
        if param.is_some() {
            return Err(Error::InvalidParameter(format!(
                "{name} takes no parameter"
            )));
        }
        Ok(t)
    }
}

/// Ordered, validated list of transforms. Stages must follow the order
/// delta, rle0, quars, each at most once.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransformChain {
    stages: Vec<Transform>,
}

impl TransformChain {
    pub fn new(stages: Vec<Transform>) -> Result<Self> {
        for w in stages.windows(2) {
            if w[0].id() >= w[1].id() {
                return Err(Error::InvalidChain(format!(
                    "{} cannot follow {} (order is delta, rle0, quars, each once)",
                    w[1], w[0]
                )));
            }
        }
        Ok(TransformChain { stages })
    }

    pub fn none() -> Self {
        TransformChain::default()
    }

    /// The four cumulative chains of the ablation: none, D, D+R, D+R+Q.
    pub fn ablation_chains() -> [TransformChain; 4] {
        let q = Transform::Quars {
            bins: DEFAULT_BIN_COUNT as u16,
        };
        [
            TransformChain::none(),
            TransformChain {
                stages: vec![Transform::Delta],
            },
            TransformChain {
                stages: vec![Transform::Delta, Transform::Rle0],
            },
            TransformChain {
                stages: vec![Transform::Delta, Transform::Rle0, q],
            },
        ]
    }

    pub fn from_ids(ids: &[u8]) -> Result<Self> {
        let stages = ids
            .iter()
            .map(|&id| {
                Transform::from_id(id).ok_or_else(|| {
                    Error::UnsupportedContainer(format!("unknown transform id {id}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TransformChain::new(stages)
    }

    pub fn stages(&self) -> &[Transform] {
        &self.stages
    }

    pub fn ids(&self) -> Vec<u8> {
        self.stages.iter().map(|t| t.id()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn has_quars(&self) -> bool {
        self.stages
            .iter()
            .any(|t| matches!(t, Transform::Quars { .. }))
    }

    /// Table-style label: `none`, `D`, `D+R`, `D+R+Q`, ...
    pub fn label(&self) -> String {
        if self.stages.is_empty() {
            return "none".to_string();
        }
        self.stages
            .iter()
            .map(|t| t.short())
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Display for TransformChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.stages.is_empty() {
            return f.write_str("none");
        }
        let parts: Vec<String> = self.stages.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for TransformChain {
    type Err = Error;

    /// Accepts `none`, comma lists (`delta,rle0,quars:64`) and the short
    /// ablation form (`d+r+q`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("none") {
            return Ok(TransformChain::none());
        }
        let stages = s
            .split([',', '+'])
            .map(str::parse)
            .collect::<Result<Vec<Transform>>>()?;
        TransformChain::new(stages)
    }
}

/// Per-channel side information produced by a chain and needed to invert it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SideHeaders {
    pub quars: Option<QuarsMap>,
}

/// Runs every stage of `chain` over `samples`.
pub fn chain_apply(samples: &[i32], chain: &TransformChain) -> Result<(Vec<i32>, SideHeaders)> {
    let mut data = samples.to_vec();
    let mut headers = SideHeaders::default();
    for stage in chain.stages() {
        data = match *stage {
            Transform::Delta => delta_encode(&data)?,
            Transform::Rle0 => rle0_encode(&data)?,
            Transform::Quars { bins } => {
                let (mapped, map) = quars_encode(&data, bins as usize)?;
                headers.quars = Some(map);
                mapped
            }
        };
    }
    Ok((data, headers))
}

/// Inverse stages in reverse order.
pub fn chain_invert(
    tokens: &[i32],
    chain: &TransformChain,
    headers: &SideHeaders,
) -> Result<Vec<i32>> {
    let mut data = tokens.to_vec();
    for stage in chain.stages().iter().rev() {
        data = match stage {
            Transform::Delta => delta_decode(&data)?,
            Transform::Rle0 => rle0_decode(&data)?,
            Transform::Quars { .. } => {
                let map = headers.quars.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("chain contains quars but no map was supplied".into())
                })?;
                quars_decode(&data, map)?
            }
        };
    }
    Ok(data)
}
