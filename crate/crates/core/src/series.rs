use std::ops::Deref;

use serde::{Deserialize, Serialize};

/// Ordered integer samples of one channel.
///
/// Source data lives in the signed 16-bit range; transform outputs may use
/// the full `i32` range. Multichannel data is a `Vec<TimeSeries>`, one entry
/// per channel, and channels are always processed independently.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    pub channel_id: u16,
    pub samples: Vec<i32>,
}

impl TimeSeries {
    pub fn new(samples: Vec<i32>) -> Self {
        TimeSeries {
            channel_id: 0,
            samples,
        }
    }

    pub fn with_channel(channel_id: u16, samples: Vec<i32>) -> Self {
        TimeSeries {
            channel_id,
            samples,
        }
    }

    pub fn into_samples(self) -> Vec<i32> {
        self.samples
    }
}

impl Deref for TimeSeries {
    type Target = [i32];

    fn deref(&self) -> &[i32] {
        &self.samples
    }
}

impl From<Vec<i32>> for TimeSeries {
    fn from(samples: Vec<i32>) -> Self {
        TimeSeries::new(samples)
    }
}

impl FromIterator<i32> for TimeSeries {
    fn from_iter<I: IntoIterator<Item = i32>>(iter: I) -> Self {
        TimeSeries::new(iter.into_iter().collect())
    }
}
