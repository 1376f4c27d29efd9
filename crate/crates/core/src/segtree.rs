//! Dyadic segment-tree geometry over a power-of-two horizon.
//!
//! The full balanced binary tree over the trials `1..=T` assigns to each
//! vertex of height `h` an aligned block of `2^h` consecutive trials. This
//! module computes, for any segment of trials, its partition into maximal
//! aligned blocks (the blocks whose parent block sticks out of the segment),
//! entirely arithmetically: no tree is ever materialised, so a decomposition
//! costs O(log T) time and O(log T) output.
//!
//! It also carries the constants of the switching-regret envelope
//! `(c * gamma + d) * sum_k sqrt(len_k)` and the root-sum inequality
//! `sum sqrt(2^k) <= xi * sqrt(sum 2^k)` over distinct powers that those
//! constants come from.

use crate::error::{Error, Result};

/// An aligned dyadic block of trials: `2^height` trials starting at `first`,
/// with `first - 1` a multiple of `2^height`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub height: u32,
    pub first: usize,
    pub last: usize,
}

impl Vertex {
    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The parent block of twice the length, unless this block spans the
    /// whole horizon already.
    pub fn parent(&self, horizon: usize) -> Option<Vertex> {
        let span = self.len() * 2;
        if span > horizon {
            return None;
        }
        let first = ((self.first - 1) / span) * span + 1;
        Some(Vertex {
            height: self.height + 1,
            first,
            last: first + span - 1,
        })
    }
}

/// Constants of the switching-regret envelope, all derived from the
/// two-at-a-time pairing of block heights inside one segment:
/// `xi = 1 / (sqrt(2) - 1)` bounds a root sum over distinct powers,
/// `c = xi * sqrt(2)` covers the two interleaved runs of blocks,
/// `alpha = 2 sqrt(ln 2) / (sqrt(2) - 1)` aggregates the mixing-weight costs
/// up the tree, and `d = c * alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c: f64,
    pub d: f64,
    pub alpha: f64,
    pub xi: f64,
}

impl Constants {
    pub fn new() -> Self {
        let sqrt2 = std::f64::consts::SQRT_2;
        let ln2 = std::f64::consts::LN_2;
        Constants {
            c: sqrt2 / (sqrt2 - 1.0),
            d: (8.0 * ln2).sqrt() / (3.0 - 2.0 * sqrt2),
            alpha: 2.0 * ln2.sqrt() / (sqrt2 - 1.0),
            xi: 1.0 / (sqrt2 - 1.0),
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::new()
    }
}

/// Partition the trials `first..=last` into maximal aligned dyadic blocks.
///
/// Greedy from the left: at each position take the tallest block that is
/// aligned there and still fits inside the remaining segment. The result is
/// exactly the set of blocks contained in the segment whose parent is not,
/// ordered left to right; block lengths sum to the segment length and at
/// most two blocks share any height.
pub fn dyadic_cover(first: usize, last: usize, horizon: usize) -> Result<Vec<Vertex>> {
    if horizon == 0 || !horizon.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(horizon));
    }
    if first < 1 || first > last || last > horizon {
        return Err(Error::segment(format!(
            "need 1 <= first <= last <= horizon, got first={first} last={last} horizon={horizon}"
        )));
    }
    let max_height = horizon.trailing_zeros();
    let mut blocks = Vec::new();
    let mut pos = first;
    while pos <= last {
        let alignment = if pos == 1 {
            max_height
        } else {
            (pos - 1).trailing_zeros().min(max_height)
        };
        let remaining = last - pos + 1;
        let fit = usize::BITS - 1 - remaining.leading_zeros();
        let height = alignment.min(fit);
        let span = 1usize << height;
        blocks.push(Vertex {
            height,
            first: pos,
            last: pos + span - 1,
        });
        pos += span;
    }
    Ok(blocks)
}

/// `sum_v sqrt(2^height(v))`, the quantity the envelope compares against
/// `c * sqrt(segment length)`.
pub fn sqrt_length_sum(blocks: &[Vertex]) -> f64 {
    blocks
        .iter()
        .map(|v| (v.len() as f64).sqrt())
        .sum()
}

/// Root-sum inequality over distinct powers of two: returns
/// `(sum_k sqrt(2^k), xi * sqrt(sum_k 2^k))`; the left side never exceeds
/// the right.
pub fn distinct_power_bound(levels: &[u32]) -> Result<(f64, f64)> {
    if levels.is_empty() {
        return Err(Error::contract("distinct_power_bound needs a nonempty set"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &k in levels {
        if !seen.insert(k) {
            return Err(Error::contract(format!("level {k} repeated")));
        }
    }
    let lhs: f64 = levels.iter().map(|&k| (2f64).powi(k as i32).sqrt()).sum();
    let total: f64 = levels.iter().map(|&k| (2f64).powi(k as i32)).sum();
    Ok((lhs, Constants::new().xi * total.sqrt()))
}

/// The switching-regret envelope `(c * gamma + d) * sum_k sqrt(len_k)` for a
/// base learner with regret constant `gamma` and the given segment lengths.
pub fn switching_bound(segment_lengths: &[usize], gamma: f64) -> Result<f64> {
    if segment_lengths.contains(&0) {
        return Err(Error::segment("segment lengths must be >= 1"));
    }
    let consts = Constants::new();
    let root_sum: f64 = segment_lengths.iter().map(|&l| (l as f64).sqrt()).sum();
    Ok((consts.c * gamma + consts.d) * root_sum)
}
