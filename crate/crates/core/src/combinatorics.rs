//! Lexicographic enumeration of `k`-subsets of `0..n`.
//!
//! Subsets are addressed by their lexicographic rank so that the parallel
//! drivers can split a size class into contiguous chunks and still report the
//! lexicographically smallest hit.

use crate::error::{Error, Result};

/// Default column limit for anything that enumerates column subsets.
pub const MAX_ENUMERATION_COLUMNS: usize = 24;

/// Opt-in override for the enumeration guard.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationLimit {
    pub force_large: bool,
}

impl EnumerationLimit {
    pub const FORCED: Self = Self { force_large: true };

    pub fn check(self, cols: usize) -> Result<()> {
        if !self.force_large && cols > MAX_ENUMERATION_COLUMNS {
            return Err(Error::EnumerationGuard {
                cols,
                limit: MAX_ENUMERATION_COLUMNS,
            });
        }
        Ok(())
    }
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    debug_assert!(rank < binomial(n, k));
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            // subsets that start with `next` at this slot
            let block = binomial(n - next - 1, remaining);
            if rank < block {
                break;
            }
            rank -= block;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Advance `subset` to its lexicographic successor. Returns `false` after the last one.
pub fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
