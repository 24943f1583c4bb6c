//! Signed to unsigned interleaving: 0, -1, 1, -2, 2, ... map to 0, 1, 2, 3, 4, ...

#[inline]
pub fn zigzag(v: i32) -> u32 {
    ((v << 1) ^ (v >> 31)) as u32
}

#[inline]
pub fn unzigzag(u: u32) -> i32 {
    ((u >> 1) as i32) ^ -((u & 1) as i32)
}

pub fn zigzag_all(values: &[i32]) -> Vec<u32> {
    values.iter().map(|&v| zigzag(v)).collect()
}

pub fn unzigzag_all(values: &[u32]) -> Vec<i32> {
    values.iter().map(|&u| unzigzag(u)).collect()
}
