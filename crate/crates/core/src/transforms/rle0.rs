//! Run-length coding applied to zero runs only.
//!
//! A maximal run of `k` zeros becomes the token pair `(0, k)`; nonzero values
//! pass through as single tokens. Since a zero datum always opens a run, 0 is
//! free to act as the run marker without an escape.

use crate::error::{Error, Result};

pub fn rle0_encode(samples: &[i32]) -> Result<Vec<i32>> {
    let mut out = Vec::with_capacity(samples.len());
    let mut run: i64 = 0;
    for &v in samples {
        if v == 0 {
            run += 1;
            continue;
        }
        if run > 0 {
            push_run(&mut out, run)?;
            run = 0;
        }
        out.push(v);
    }
    if run > 0 {
        push_run(&mut out, run)?;
    }
    Ok(out)
}

fn push_run(out: &mut Vec<i32>, run: i64) -> Result<()> {
    let k = i32::try_from(run).map_err(|_| Error::OutOfRange {
        value: run,
        bits: 32,
    })?;
    out.push(0);
    out.push(k);
    Ok(())
}

pub fn rle0_decode(tokens: &[i32]) -> Result<Vec<i32>> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let v = tokens[i];
        if v != 0 {
            out.push(v);
            i += 1;
            continue;
        }
        match tokens.get(i + 1) {
            Some(&k) if k > 0 => out.resize(out.len() + k as usize, 0),
            _ => return Err(Error::MalformedRun(i)),
        }
        i += 2;
    }
    Ok(out)
}
