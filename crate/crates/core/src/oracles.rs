//! Independent references for the engines: closed forms and exhaustive checks.

use crate::algebra::rational::{from_u64, rat, Rational};
use crate::instance::SystemInstance;
use crate::sets::binomial_i;
use itertools::Itertools;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ThreeNodePartition {
    pub s1: u64,
    pub s2: u64,
    pub s3: u64,
    pub s12: u64,
    pub s13: u64,
    pub s23: u64,
    pub s123: u64,
}

impl ThreeNodePartition {
    pub fn of(inst: &SystemInstance) -> Self {
        assert_eq!(inst.k, 3, "three-node partition needs K = 3");
        let mut p = ThreeNodePartition::default();
        for n in 0..inst.n {
            let has = |k| inst.maps(k, n);
            match (has(0), has(1), has(2)) {
                (true, false, false) => p.s1 += 1,
                (false, true, false) => p.s2 += 1,
                (false, false, true) => p.s3 += 1,
                (true, true, false) => p.s12 += 1,
                (true, false, true) => p.s13 += 1,
                (false, true, true) => p.s23 += 1,
                (true, true, true) => p.s123 += 1,
                (false, false, false) => unreachable!("validated instance maps every file"),
            }
        }
        p
    }

    pub fn total(&self) -> u64 {
        self.s1 + self.s2 + self.s3 + self.s12 + self.s13 + self.s23 + self.s123
    }
}

/// ½(|max + Σ/2| + |max − Σ/2|).
pub fn g(x1: u64, x2: u64, x3: u64) -> Rational {
    let m = from_u64(x1.max(x2).max(x3));
    let half = from_u64(x1 + x2 + x3) * rat(1, 2);
    ((&m + &half).abs() + (&m - &half).abs()) * rat(1, 2)
}

/// 2(S1+S2+S3) + g(S12, S13, S23), in IVs.
pub fn three_node_load(p: &ThreeNodePartition) -> Rational {
    from_u64(2 * (p.s1 + p.s2 + p.s3)) + g(p.s12, p.s13, p.s23)
}

/// Normalized load of the homogeneous system with every function reduced by `s` nodes.
pub fn homogeneous_load(k: usize, r: usize, s: usize) -> Rational {
    let (k, r, s) = (k as i64, r as i64, s as i64);
    let mut total = Rational::zero();
    for l in (r + 1).max(s)..=(r + s).min(k) {
        let num = l as u64 * binomial_i(k, l) * binomial_i(l - 2, r - 1) * binomial_i(r, l - s);
        total += from_u64(num);
    }
    total / from_u64(r as u64 * binomial_i(k, r) * binomial_i(k, s))
}

/// Σ_s L(s)·Q_s/Q with `q_s[s-1]` functions reduced by s nodes.
pub fn semi_homogeneous_load(k: usize, r: usize, q_s: &[usize]) -> Rational {
    let q: usize = q_s.iter().sum();
    q_s.iter()
        .enumerate()
        .map(|(i, &c)| homogeneous_load(k, r, i + 1) * from_u64(c as u64))
        .sum::<Rational>()
        / from_u64(q as u64)
}

/// a_{t,d} of the semi-homogeneous system with N files.
pub fn semi_homogeneous_a_table(k: usize, r: usize, n: usize, q_s: &[usize]) -> BTreeMap<(usize, usize), u64> {
    let mut out = BTreeMap::new();
    let t = r;
    for d in 1..=k - t {
        let mut a = Rational::zero();
        for (i, &qs) in q_s.iter().enumerate() {
            let s = (i + 1) as i64;
            let (ti, di, ki) = (t as i64, d as i64, k as i64);
            let num = (n * qs) as u64 * binomial_i(ti, ti + di - s) * binomial_i(ki, ti + di) * binomial_i(ti + di, ti);
            a += Rational::new(num.into(), (binomial_i(ki, ti) * binomial_i(ki, s)).into());
        }
        assert!(a.is_integer());
        if !a.is_zero() {
            out.insert((t, d), a.to_integer().try_into().unwrap());
        }
    }
    out
}

pub const TINY_MAX_NODES: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("instance with {0} nodes is too large for exhaustive search")]
pub struct TooLarge(pub usize);

/// Best cut-set chain over node orderings: for k_1, k_2, ..., every IV that k_i reduces but
/// none of k_1..k_i maps must cross the cut. Any valid shuffle sends at least this much.
pub fn brute_force_min_load_tiny(inst: &SystemInstance) -> Result<Rational, TooLarge> {
    if inst.k > TINY_MAX_NODES {
        return Err(TooLarge(inst.k));
    }
    let mut best = 0u64;
    for order in (0..inst.k).permutations(inst.k) {
        let mut known = vec![false; inst.n];
        let mut counted = vec![false; inst.n * inst.q];
        let mut total = 0u64;
        for &k in &order {
            for &f in &inst.placement[k] {
                known[f] = true;
            }
            for &q in &inst.assignment[k] {
                for n in (0..inst.n).filter(|&n| !known[n]) {
                    if !counted[q * inst.n + n] {
                        counted[q * inst.n + n] = true;
                        total += 1;
                    }
                }
            }
        }
        best = best.max(total);
    }
    Ok(Rational::new(best.into(), ((inst.q * inst.n) as u64).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceDescriptor;

    #[test]
    fn g_values() {
        assert_eq!(g(1, 1, 1), rat(3, 2));
        assert_eq!(g(1, 2, 2), rat(5, 2));
        assert_eq!(g(1, 1, 3), from_u64(3));
    }

    #[test]
    fn cdc_small_cases() {
        assert_eq!(homogeneous_load(3, 2, 1), rat(1, 6));
        assert_eq!(homogeneous_load(4, 4, 1), Rational::zero());
        // uncoded-free K=2: one unicast of half the IVs of the other node
        assert_eq!(homogeneous_load(2, 1, 1), rat(1, 2));
    }

    #[test]
    fn tiny_oracle() {
        let all = SystemInstance::from_one_based(2, 1, 1, &[vec![1], vec![1]], &[vec![1], vec![]]).unwrap();
        assert_eq!(brute_force_min_load_tiny(&all).unwrap(), Rational::zero());
        let one = SystemInstance::from_one_based(2, 1, 1, &[vec![1], vec![]], &[vec![], vec![1]]).unwrap();
        assert_eq!(brute_force_min_load_tiny(&one).unwrap(), rat(1, 1));
        let big = InstanceDescriptor::Homogeneous { k: 9, r: 1, s: 1, n: 9, q: 9 }.generate().unwrap();
        assert_eq!(brute_force_min_load_tiny(&big), Err(TooLarge(9)));
    }
}
