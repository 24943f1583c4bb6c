//! Deterministic synthetic test signals.
//!
//! Randomness comes from ChaCha8 seeded with the configured 64-bit seed. Each
//! component draws from its own ChaCha stream (noise uses stream 1, the
//! switching generator stream 2), so `sine_noise` reuses exactly the noise of
//! the `noise` case with the same seed.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Bernoulli, Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

const NOISE_STREAM: u64 = 1;
const SWITCHING_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Sine,
    Noise,
    SineNoise,
    Switching,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::Sine, Case::Noise, Case::SineNoise, Case::Switching];

    pub fn name(self) -> &'static str {
        match self {
            Case::Sine => "sine",
            Case::Noise => "noise",
            Case::SineNoise => "sine_noise",
            Case::Switching => "switching",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', '+'], "_");
        Case::ALL
            .into_iter()
            .find(|c| c.name() == norm)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown case {s:?} (expected sine, noise, sine_noise or switching)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub case: Case,
    pub n: usize,
    pub seed: u64,
    pub amplitude: f64,
    pub period: f64,
    /// Noise is uniform on `[-noise_half_range, noise_half_range]`.
    pub noise_half_range: i32,
    pub levels: Vec<i32>,
    /// Mean of the geometric dwell time, in samples.
    pub mean_dwell: f64,
}

impl SynthSpec {
    pub const DEFAULT_N: usize = 10_000;
    pub const DEFAULT_SEED: u64 = 42;

    pub fn new(case: Case) -> Self {
        SynthSpec {
            case,
            n: Self::DEFAULT_N,
            seed: Self::DEFAULT_SEED,
            amplitude: 1000.0,
            // A prime period keeps phases from repeating across cycles.
            period: 997.0,
            noise_half_range: 98,
            levels: vec![-700, -200, 0, 300, 800],
            mean_dwell: 6.5,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_len(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter(
                "series length must be at least 1".into(),
            ));
        }
        if !(self.amplitude.is_finite() && self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidParameter(
                "sine needs finite amplitude and positive period".into(),
            ));
        }
        if self.amplitude.abs() > i16::MAX as f64 {
            return Err(Error::InvalidParameter(
                "amplitude exceeds the 16-bit range".into(),
            ));
        }
        if self.noise_half_range < 0 {
            return Err(Error::InvalidParameter(
                "noise half-range must be non-negative".into(),
            ));
        }
        if self.case == Case::Switching {
            if self.levels.len() < 2 {
                return Err(Error::InvalidParameter(
                    "switching needs at least two levels".into(),
                ));
            }
            if self.mean_dwell.is_nan() || self.mean_dwell < 1.0 {
                return Err(Error::InvalidParameter(
                    "mean dwell must be at least 1".into(),
                ));
            }
        }
        Ok(())
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn sine(spec: &SynthSpec) -> Vec<i32> {
    (0..spec.n)
        .map(|k| {
            let phase = 2.0 * std::f64::consts::PI * k as f64 / spec.period;
            // f64::round is half away from zero.
            (spec.amplitude * phase.sin()).round() as i32
        })
        .collect()
}

fn noise(spec: &SynthSpec) -> Vec<i32> {
    let a = spec.noise_half_range;
    let dist = Uniform::new_inclusive(-a, a);
    dist.sample_iter(rng(spec.seed, NOISE_STREAM))
        .take(spec.n)
        .collect()
}

fn switching(spec: &SynthSpec) -> Result<Vec<i32>> {
    let mut r = rng(spec.seed, SWITCHING_STREAM);
    let stay = Bernoulli::new(1.0 - 1.0 / spec.mean_dwell)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let k = spec.levels.len();
    let mut level = Uniform::new(0, k).sample(&mut r);
    let mut out = Vec::with_capacity(spec.n);
    while out.len() < spec.n {
        out.push(spec.levels[level]);
        if !stay.sample(&mut r) {
            // Jump to one of the other levels.
            let step = Uniform::new(1, k).sample(&mut r);
            level = (level + step) % k;
        }
    }
    Ok(out)
}

pub fn generate(spec: &SynthSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let samples = match spec.case {
        Case::Sine => sine(spec),
        Case::Noise => noise(spec),
        Case::SineNoise => sine(spec)
            .into_iter()
            .zip(noise(spec))
            .map(|(s, e)| s + e)
            .collect(),
        Case::Switching => switching(spec)?,
    };
    Ok(TimeSeries::new(samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{aad, cardinality};

    #[test]
    fn deterministic() {
        for case in Case::ALL {
            let s = SynthSpec::new(case).with_seed(7);
            assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        }
        let a = generate(&SynthSpec::new(Case::Noise).with_seed(1)).unwrap();
        let b = generate(&SynthSpec::new(Case::Noise).with_seed(2)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn sine_statistics() {
        let s = generate(&SynthSpec::new(Case::Sine)).unwrap();
        let expected = 2000.0 / std::f64::consts::PI;
        assert!((aad::<f64>(&s).unwrap() - expected).abs() / expected < 0.05);
        assert_eq!(s[0], 0);
        assert_eq!(s.iter().max(), Some(&1000));
        assert_eq!(s.iter().min(), Some(&-1000));
        assert!(cardinality(&s) > 500);
    }

    #[test]
    fn noise_statistics() {
        let s = generate(&SynthSpec::new(Case::Noise)).unwrap();
        assert!(cardinality(&s) <= 197);
        assert!(s.iter().all(|v| v.abs() <= 98));
        assert!((aad::<f64>(&s).unwrap() - 49.5).abs() / 49.5 < 0.05);
    }

    #[test]
    fn switching_levels() {
        let spec = SynthSpec::new(Case::Switching);
        let s = generate(&spec).unwrap();
        assert_eq!(cardinality(&s), 5);
        let jumps = s.windows(2).filter(|w| w[0] != w[1]).count();
        let dwell = s.len() as f64 / (jumps + 1) as f64;
        assert!((dwell - spec.mean_dwell).abs() < 1.0, "dwell {dwell}");
    }

    #[test]
    fn parse_and_validate() {
        assert_eq!("sine-noise".parse::<Case>().unwrap(), Case::SineNoise);
        assert!("square".parse::<Case>().is_err());
        assert!(generate(&SynthSpec::new(Case::Sine).with_len(0)).is_err());
    }
}
