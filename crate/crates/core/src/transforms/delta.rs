use crate::error::{Error, Result};

/// First sample verbatim, then consecutive differences.
pub fn delta_encode(samples: &[i32]) -> Result<Vec<i32>> {
    let (&first, _) = samples.split_first().ok_or(Error::EmptyInput)?;
    let mut out = Vec::with_capacity(samples.len());
    out.push(first);
    for w in samples.windows(2) {
        let d = w[1] as i64 - w[0] as i64;
        out.push(i32::try_from(d).map_err(|_| Error::OutOfRange { value: d, bits: 32 })?);
    }
    Ok(out)
}

/// Prefix sums; inverse of [`delta_encode`].
pub fn delta_decode(deltas: &[i32]) -> Result<Vec<i32>> {
    if deltas.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut acc: i64 = 0;
    deltas
        .iter()
        .map(|&d| {
            acc += d as i64;
            i32::try_from(acc).map_err(|_| Error::CorruptDelta)
        })
        .collect()
}
