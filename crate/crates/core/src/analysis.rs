//! IV classification, sending clusters and rounds, and the combinatorial quantities built on them.

use crate::algebra::rational::{from_u64, Rational};
use crate::instance::{IvKey, SystemInstance};
use crate::sets::{self, mask_of, subsets_of, Mask};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IvClass {
    pub key: IvKey,
    pub mappers: Mask,
    pub requesters: Mask,
}

impl IvClass {
    pub fn t(&self) -> usize {
        sets::size(self.mappers)
    }

    pub fn d(&self) -> usize {
        sets::size(self.requesters)
    }
}

/// Every IV with at least one requester, grouped by (cluster, mapper set).
#[derive(Clone, Debug)]
pub struct IvCatalog {
    pub k: usize,
    pub n: usize,
    pub q: usize,
    pub r_min: usize,
    pub q_min: usize,
    /// Ordered by file, then function.
    pub needed: Vec<IvClass>,
    /// (S, S1) -> member IVs in catalog order.
    pub cells: BTreeMap<(Mask, Mask), Vec<IvKey>>,
}

/// Exclusive set: IVs mapped by exactly `mappers`, requested by exactly `cluster \ mappers`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusiveIvSet {
    pub cluster: Mask,
    pub mappers: Mask,
    pub members: Vec<IvKey>,
}

#[derive(Clone, Debug)]
pub struct ClusterRound {
    pub cluster: Mask,
    pub z: usize,
    /// Sorted 0-based nodes of the cluster.
    pub nodes: Vec<usize>,
    /// The z-subsets in lexicographic order with their exclusive sets.
    pub cells: Vec<ExclusiveIvSet>,
}

impl ClusterRound {
    pub fn skippable(&self) -> bool {
        self.cells.iter().all(|c| c.members.is_empty())
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.cells.iter().map(|c| c.members.len() as u64).collect()
    }

    pub fn total(&self) -> u64 {
        self.sizes().iter().sum()
    }

    /// Position of `node` within `nodes`.
    pub fn position(&self, node: usize) -> Option<usize> {
        self.nodes.iter().position(|&k| k == node)
    }

    /// Σ |V| over cells containing `node`, and over cells not containing it.
    pub fn split_sums(&self, node: usize) -> (u64, u64) {
        let mut inside = 0;
        let mut outside = 0;
        for c in &self.cells {
            let s = c.members.len() as u64;
            if sets::contains(c.mappers, node) {
                inside += s;
            } else {
                outside += s;
            }
        }
        (inside, outside)
    }

    pub fn label(&self) -> String {
        format!("{}/z={}", sets::display(self.cluster), self.z)
    }
}

impl IvCatalog {
    pub fn build(inst: &SystemInstance) -> Self {
        let mut file_mappers = vec![0 as Mask; inst.n];
        for (k, files) in inst.placement.iter().enumerate() {
            for &f in files {
                file_mappers[f] |= 1 << k;
            }
        }
        let mut func_reducers = vec![0 as Mask; inst.q];
        for (k, funcs) in inst.assignment.iter().enumerate() {
            for &g in funcs {
                func_reducers[g] |= 1 << k;
            }
        }
        let r_min = file_mappers.iter().map(|&m| sets::size(m)).min().unwrap_or(0);
        let q_min = func_reducers.iter().map(|&m| sets::size(m)).min().unwrap_or(0);
        let mut needed = Vec::new();
        let mut cells: BTreeMap<(Mask, Mask), Vec<IvKey>> = BTreeMap::new();
        for (n, &mappers) in file_mappers.iter().enumerate() {
            for (q, &reducers) in func_reducers.iter().enumerate() {
                let requesters = reducers & !mappers;
                if requesters == 0 {
                    continue;
                }
                let key = IvKey { q, n };
                debug_assert!(sets::size(mappers) >= r_min);
                cells.entry((mappers | requesters, mappers)).or_default().push(key);
                needed.push(IvClass { key, mappers, requesters });
            }
        }
        IvCatalog { k: inst.k, n: inst.n, q: inst.q, r_min, q_min, needed, cells }
    }

    pub fn classify(&self, key: IvKey) -> Option<&IvClass> {
        self.needed.iter().find(|c| c.key == key)
    }

    pub fn qn(&self) -> Rational {
        from_u64((self.q * self.n) as u64)
    }

    /// Cluster sizes that can hold a nonempty cell.
    ///
    /// Every cluster S = mappers ∪ requesters has more than r_min nodes and contains
    /// all reducers of its function, so at least q_min of them.
    pub fn cluster_size_window(&self) -> (usize, usize) {
        ((self.r_min + 1).max(self.q_min).max(2), self.k)
    }

    pub fn enumerate_cluster_rounds(&self) -> Vec<ClusterRound> {
        let (lo, hi) = self.cluster_size_window();
        let all: Vec<usize> = (0..self.k).collect();
        let mut out = Vec::new();
        for size in lo..=hi {
            for cluster in subsets_of(&all, size) {
                let nodes = sets::members(cluster);
                for z in self.r_min.max(1)..size {
                    let cells = subsets_of(&nodes, z)
                        .into_iter()
                        .map(|s1| ExclusiveIvSet {
                            cluster,
                            mappers: s1,
                            members: self.cells.get(&(cluster, s1)).cloned().unwrap_or_default(),
                        })
                        .collect();
                    out.push(ClusterRound { cluster, z, nodes: nodes.clone(), cells });
                }
            }
        }
        out
    }

    /// Nonempty rounds only.
    pub fn active_rounds(&self) -> Vec<ClusterRound> {
        self.enumerate_cluster_rounds().into_iter().filter(|r| !r.skippable()).collect()
    }

    /// a_{t,d}, nonzero cells only.
    pub fn a_table(&self) -> BTreeMap<(usize, usize), u64> {
        let mut table = BTreeMap::new();
        for c in &self.needed {
            *table.entry((c.t(), c.d())).or_insert(0) += 1;
        }
        table
    }

    pub fn lower_bound(&self) -> Rational {
        let mut acc = Rational::zero();
        for (&(t, d), &a) in &self.a_table() {
            acc += Rational::new((a * d as u64).into(), ((t + d - 1) as u64).into());
        }
        acc / self.qn()
    }

    /// Every needed IV sent once to each of its requesters.
    pub fn uncoded_load(&self) -> Rational {
        let total: u64 = self.a_table().iter().map(|(&(_, d), &a)| a * d as u64).sum();
        from_u64(total) / self.qn()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeDeficit {
    pub node: usize,
    pub inside: u64,
    pub outside: u64,
    /// `None` encodes an infinite ratio (requests but knows nothing).
    pub ratio: Option<Rational>,
    pub n: i64,
}

#[derive(Clone, Debug)]
pub struct DeficitProfile {
    pub cluster: Mask,
    pub z: usize,
    pub nodes: Vec<NodeDeficit>,
}

impl DeficitProfile {
    pub fn of(&self, node: usize) -> &NodeDeficit {
        self.nodes.iter().find(|d| d.node == node).expect("node in cluster")
    }

    /// (|S|-z)/(z-1), `None` when z = 1.
    pub fn threshold(&self) -> Option<Rational> {
        let s = self.nodes.len() as i64;
        let z = self.z as i64;
        (z > 1).then(|| Rational::new((s - z).into(), (z - 1).into()))
    }

    pub fn ratio_within(&self, node: usize, strict: bool) -> bool {
        let d = self.of(node);
        match (&d.ratio, self.threshold()) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(r), Some(t)) => {
                if strict {
                    *r < t
                } else {
                    *r <= t
                }
            }
        }
    }
}

pub fn deficit_profile(round: &ClusterRound) -> DeficitProfile {
    let s = round.size() as i64;
    let z = round.z as i64;
    let nodes = round
        .nodes
        .iter()
        .map(|&node| {
            let (inside, outside) = round.split_sums(node);
            let ratio = match (inside, outside) {
                (0, 0) => Some(Rational::zero()),
                (0, _) => None,
                (i, o) => Some(Rational::new(o.into(), i.into())),
            };
            let n = (s - z) * inside as i64 - (z - 1) * outside as i64;
            NodeDeficit { node, inside, outside, ratio, n }
        })
        .collect();
    DeficitProfile { cluster: round.cluster, z: round.z, nodes }
}

/// Cluster containing exactly the union of mappers and requesters, for lookups by IV.
pub fn cell_of(class: &IvClass) -> (Mask, Mask) {
    (class.mappers | class.requesters, class.mappers)
}

pub fn mask1(nodes: &[usize]) -> Mask {
    mask_of(nodes.iter().map(|k| k - 1))
}
