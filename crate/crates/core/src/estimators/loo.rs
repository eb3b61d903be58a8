//! Leave-one-out diagonals of the empirical and shape-constrained estimators.
//!
//! For every index `j` with `x_j > 0`, one observation equal to `j` is
//! removed, the estimator is refit on `(x - e_j) / (n - 1)` over the full
//! original support, and only coordinate `j` of the refit is kept.

use serde::{Deserialize, Serialize};

use super::{FrequencyData, ShapeKind};
use crate::error::{Error, Result};

/// Leave-one-out diagonals: `pi_j` for the empirical estimator and
/// `shape_loo_j` for the rearrangement or Grenander estimator. Entries at
/// indices with `x_j = 0` are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooVectors {
    pub pi: Vec<f64>,
    pub shape_loo: Vec<f64>,
    pub kind: ShapeKind,
}

fn require_two(x: &FrequencyData) -> Result<()> {
    if x.n() < 2 {
        return Err(Error::InsufficientSample {
            needed: 2,
            got: x.n(),
        });
    }
    Ok(())
}

fn empirical_loo(x: &FrequencyData) -> Vec<f64> {
    let nm1 = (x.n() - 1) as f64;
    x.counts()
        .iter()
        .map(|&c| if c > 0 { (c - 1) as f64 / nm1 } else { 0.0 })
        .collect()
}

/// Direct evaluation: one full refit per index, O(D^2) or O(D^2 log D).
pub fn loo_vectors(x: &FrequencyData, kind: ShapeKind) -> Result<LooVectors> {
    require_two(x)?;
    let nm1 = (x.n() - 1) as f64;
    let counts = x.counts();
    let mut shape_loo = vec![0.0; counts.len()];
    let mut modified = vec![0.0; counts.len()];
    for (j, &cj) in counts.iter().enumerate() {
        if cj == 0 {
            continue;
        }
        for (k, (m, &c)) in modified.iter_mut().zip(counts).enumerate() {
            let c = if k == j { c - 1 } else { c };
            *m = c as f64 / nm1;
        }
        shape_loo[j] = kind.apply(&modified)?[j];
    }
    Ok(LooVectors {
        pi: empirical_loo(x),
        shape_loo,
        kind,
    })
}

/// Same output as [`loo_vectors`] without refitting from scratch.
///
/// Rearrangement: removing one observation from a cell with count `c`
/// lowers the last occurrence of `c` in the sorted counts by one and leaves
/// the sorted order intact, so each coordinate is a binary search away.
///
/// Grenander: the isotonic fits of the prefix `x[..j]` and the suffix
/// `x[j+1..]` are kept as persistent block stacks. The refit at `j` pools the
/// perturbed singleton with whole prefix and suffix blocks only, because
/// blocks of a sub-sequence fit are never split in the fit of a longer one.
/// Block levels are compared exactly on integer counts.
pub fn loo_vectors_fast(x: &FrequencyData, kind: ShapeKind) -> Result<LooVectors> {
    require_two(x)?;
    let shape_loo = match kind {
        ShapeKind::Rearrangement => rearrangement_loo(x),
        ShapeKind::Grenander => grenander_loo(x),
    };
    Ok(LooVectors {
        pi: empirical_loo(x),
        shape_loo,
        kind,
    })
}

fn rearrangement_loo(x: &FrequencyData) -> Vec<f64> {
    let nm1 = (x.n() - 1) as f64;
    let mut sorted = x.counts().to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    x.counts()
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            if c == 0 {
                return 0.0;
            }
            let last_of_c = sorted.partition_point(|&v| v >= c) - 1;
            let v = sorted[j] - u64::from(j == last_of_c);
            v as f64 / nm1
        })
        .collect()
}

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Node {
    sum: u64,
    len: u64,
    parent: u32,
}

#[derive(Clone, Copy)]
struct Run {
    sum: u64,
    len: u64,
}

impl Run {
    /// `self.level <= other.level`, exact.
    #[inline]
    fn level_le(&self, sum: u64, len: u64) -> bool {
        (self.sum as u128) * (len as u128) <= (sum as u128) * (self.len as u128)
    }

    #[inline]
    fn level_ge(&self, sum: u64, len: u64) -> bool {
        (self.sum as u128) * (len as u128) >= (sum as u128) * (self.len as u128)
    }

    #[inline]
    fn absorb(&mut self, node: &Node) {
        self.sum += node.sum;
        self.len += node.len;
    }
}

/// Arena of immutable stack nodes; a stack is a pointer to its top node.
struct Arena {
    nodes: Vec<Node>,
}

impl Arena {
    /// Pushes a singleton onto the right end of a left-to-right fit.
    fn push_right(&mut self, mut top: u32, value: u64) -> u32 {
        let mut cur = Run { sum: value, len: 1 };
        while top != NIL {
            let node = self.nodes[top as usize];
            if cur.level_ge(node.sum, node.len) {
                cur.absorb(&node);
                top = node.parent;
            } else {
                break;
            }
        }
        self.alloc(cur, top)
    }

    /// Pushes a singleton onto the left end of a right-to-left fit.
    fn push_left(&mut self, mut top: u32, value: u64) -> u32 {
        let mut cur = Run { sum: value, len: 1 };
        while top != NIL {
            let node = self.nodes[top as usize];
            if cur.level_le(node.sum, node.len) {
                cur.absorb(&node);
                top = node.parent;
            } else {
                break;
            }
        }
        self.alloc(cur, top)
    }

    fn alloc(&mut self, run: Run, parent: u32) -> u32 {
        self.nodes.push(Node {
            sum: run.sum,
            len: run.len,
            parent,
        });
        (self.nodes.len() - 1) as u32
    }
}

fn grenander_loo(x: &FrequencyData) -> Vec<f64> {
    let counts = x.counts();
    let d = counts.len();
    let nm1 = (x.n() - 1) as f64;
    let mut arena = Arena {
        nodes: Vec::with_capacity(2 * d),
    };

    // suffix_top[j]: fit of counts[j+1..], leftmost block on top
    let mut suffix_top = vec![NIL; d];
    for j in (1..d).rev() {
        suffix_top[j - 1] = arena.push_left(suffix_top[j], counts[j]);
    }

    let mut out = vec![0.0; d];
    let mut prefix_top = NIL;
    for (j, &c) in counts.iter().enumerate() {
        if c > 0 {
            let mut cur = Run { sum: c - 1, len: 1 };
            let mut left = prefix_top;
            let mut right = suffix_top[j];
            loop {
                if right != NIL {
                    let node = arena.nodes[right as usize];
                    if cur.level_le(node.sum, node.len) {
                        cur.absorb(&node);
                        right = node.parent;
                        continue;
                    }
                }
                if left != NIL {
                    let node = arena.nodes[left as usize];
                    if cur.level_ge(node.sum, node.len) {
                        cur.absorb(&node);
                        left = node.parent;
                        continue;
                    }
                }
                break;
            }
            out[j] = cur.sum as f64 / cur.len as f64 / nm1;
        }
        prefix_top = arena.push_right(prefix_top, c);
    }
    out
}
