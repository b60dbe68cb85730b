use crate::error::{Error, Result};
use crate::weights::WeightArray;

/// Largest `m + n` accepted by [`brute_force_passage`].
pub const MAX_ENUMERATION: usize = 16;

/// `G(m, n)` as the maximum over every up-right path, by explicit enumeration.
///
/// Independent of the dynamic program: each path is a choice of which `m` of
/// the `m + n` steps go right, encoded as a bitmask.
pub fn brute_force_passage(w: &WeightArray) -> Result<f64> {
    let (m, n) = (w.m(), w.n());
    let len = m + n;
    if len > MAX_ENUMERATION {
        return Err(Error::EnumerationBound(len));
    }
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1u32 << len) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let (mut i, mut j) = (0usize, 0usize);
        let mut total = w.get(0, 0);
        for step in 0..len {
            if mask >> step & 1 == 1 {
                i += 1;
            } else {
                j += 1;
            }
            total += w.get(i, j);
        }
        best = best.max(total);
    }
    Ok(best)
}
