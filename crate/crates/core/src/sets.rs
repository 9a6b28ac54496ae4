//! Node subsets as bitmasks over 0-based node indices.

use itertools::Itertools;

pub type Mask = u32;

pub const MAX_NODES: usize = 31;

pub fn mask_of<I: IntoIterator<Item = usize>>(nodes: I) -> Mask {
    nodes.into_iter().fold(0, |m, k| m | (1 << k))
}

pub fn members(mask: Mask) -> Vec<usize> {
    (0..32).filter(|&k| mask & (1 << k) != 0).collect()
}

#[inline]
pub fn contains(mask: Mask, k: usize) -> bool {
    mask & (1 << k) != 0
}

#[inline]
pub fn size(mask: Mask) -> usize {
    mask.count_ones() as usize
}

/// z-subsets of `nodes` (assumed sorted) in lexicographic order.
pub fn subsets_of(nodes: &[usize], z: usize) -> Vec<Mask> {
    nodes.iter().copied().combinations(z).map(mask_of).collect()
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Signed-argument binomial with C(n, k) = 0 outside 0 <= k <= n.
pub fn binomial_i(n: i64, k: i64) -> u64 {
    if n < 0 || k < 0 || k > n {
        0
    } else {
        binomial(n as usize, k as usize)
    }
}

/// 1-based rendering, e.g. `{1,2,4}`.
pub fn display(mask: Mask) -> String {
    format!("{{{}}}", members(mask).iter().map(|k| (k + 1).to_string()).join(","))
}

/// 1-based node list.
pub fn one_based(mask: Mask) -> Vec<usize> {
    members(mask).into_iter().map(|k| k + 1).collect()
}
