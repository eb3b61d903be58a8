//! Order-constrained vector transforms: decreasing isotonic regression and
//! decreasing rearrangement.

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Constant regions of an isotonic fit.
///
/// `boundaries[r]` is the last index of block `r`; the final boundary is
/// `len - 1`. `levels[r]` is the mean of the input over block `r`, and the
/// levels are strictly decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub boundaries: Vec<usize>,
    pub levels: Vec<f64>,
}

impl BlockPartition {
    pub fn num_blocks(&self) -> usize {
        self.levels.len()
    }

    /// Half-open index range of block `r`.
    pub fn block_range(&self, r: usize) -> std::ops::Range<usize> {
        let start = if r == 0 { 0 } else { self.boundaries[r - 1] + 1 };
        start..self.boundaries[r] + 1
    }

    pub fn expand(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.boundaries.last().map_or(0, |b| b + 1));
        for (r, &level) in self.levels.iter().enumerate() {
            out.extend(std::iter::repeat(level).take(self.block_range(r).len()));
        }
        out
    }
}

#[derive(Clone, Copy)]
struct Block {
    sum: CompensatedSum,
    len: usize,
}

impl Block {
    #[inline]
    fn mean(&self) -> f64 {
        self.sum.value() / self.len as f64
    }
}

/// Least-squares projection of `v` onto nonincreasing vectors.
///
/// Stack-based pool-adjacent-violators scan, O(len) amortized. Adjacent blocks
/// with equal means are pooled, so each block is the largest one attaining
/// its mean and the returned levels are strictly decreasing.
pub fn isotonic_decreasing(v: &[f64]) -> Result<(Vec<f64>, BlockPartition)> {
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut stack: Vec<Block> = Vec::with_capacity(v.len());
    for &x in v {
        let mut sum = CompensatedSum::new();
        sum.add(x);
        let mut cur = Block { sum, len: 1 };
        while let Some(prev) = stack.last() {
            if prev.mean() <= cur.mean() {
                let prev = stack.pop().unwrap();
                let mut merged = prev.sum;
                merged.merge(&cur.sum);
                cur = Block {
                    sum: merged,
                    len: prev.len + cur.len,
                };
            } else {
                break;
            }
        }
        stack.push(cur);
    }

    let mut boundaries = Vec::with_capacity(stack.len());
    let mut levels = Vec::with_capacity(stack.len());
    let mut end = 0usize;
    for b in &stack {
        end += b.len;
        boundaries.push(end - 1);
        levels.push(b.mean());
    }
    let blocks = BlockPartition { boundaries, levels };
    Ok((blocks.expand(), blocks))
}

/// Permutation of `v` sorted nonincreasingly; ties keep original index order.
pub fn rearrange_decreasing(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = v.to_vec();
    // stable sort, so equal values keep their relative order
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}
