use super::flow::{FlowNetwork, INF};
use crate::algebra::rational::{from_u64, lcm_denominators, Rational, RationalExt};
use crate::analysis::{ClusterRound, DeficitProfile};
use crate::sets::{self, Mask};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;

/// β indexed by (sender j, mapper set S1).
pub type Betas = BTreeMap<(usize, Mask), Rational>;

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityResult {
    pub node: usize,
    pub cluster: Mask,
    pub z: usize,
    pub feasible: bool,
    /// Every qualifying (j, S1) pair; meaningful only when feasible.
    pub betas: Betas,
}

pub fn check_deficit(profile: &DeficitProfile, node: usize) -> bool {
    profile.of(node).n >= 0
}

/// Cells with `node ∉ S1`, as round cell indices.
pub fn cells_missing(round: &ClusterRound, node: usize) -> Vec<usize> {
    (0..round.cells.len()).filter(|&c| !sets::contains(round.cells[c].mappers, node)).collect()
}

/// Decides the nonnegative β system for receiver `node` against per-sender budgets `caps`
/// (indexed by position in `round.nodes`) by max-flow after scaling to integers.
pub fn feasibility_with(round: &ClusterRound, node: usize, caps: &[Rational]) -> FeasibilityResult {
    let s = round.size();
    let scale = lcm_denominators(caps);
    let scale_r = Rational::from_integer(scale.clone());
    let to_int = |x: &Rational| -> i128 {
        let v = x * &scale_r;
        assert!(v.is_integer());
        v.to_integer().to_i128().expect("capacity fits")
    };
    let cells = cells_missing(round, node);
    // source, one vertex per qualifying cell, one per node, sink
    let src = 0;
    let sink = 1 + cells.len() + s;
    let mut g = FlowNetwork::new(sink + 1);
    let mut demand = 0i128;
    let mut arcs = Vec::new();
    for (ci, &c) in cells.iter().enumerate() {
        let need = ((s - 1) * round.cells[c].members.len()) as i128 * scale.to_i128().unwrap();
        demand += need;
        g.add_edge(src, 1 + ci, need);
        for k in sets::members(round.cells[c].mappers) {
            let pos = round.position(k).unwrap();
            arcs.push((k, round.cells[c].mappers, g.add_edge(1 + ci, 1 + cells.len() + pos, INF)));
        }
    }
    for (pos, &k) in round.nodes.iter().enumerate() {
        if k != node {
            g.add_edge(1 + cells.len() + pos, sink, to_int(&caps[pos].positive_part()));
        }
    }
    let flow = g.max_flow(src, sink);
    let betas = arcs
        .into_iter()
        .map(|(k, m, e)| ((k, m), Rational::new(BigInt::from(g.flow_on(e)), scale.clone())))
        .collect();
    FeasibilityResult { node, cluster: round.cluster, z: round.z, feasible: flow == demand, betas }
}

pub fn check_feasible(round: &ClusterRound, profile: &DeficitProfile, node: usize) -> FeasibilityResult {
    let caps: Vec<Rational> = round.nodes.iter().map(|&k| Rational::from_integer(profile.of(k).n.into())).collect();
    feasibility_with(round, node, &caps)
}

/// Direct check of the β system for receiver `node`.
pub fn betas_satisfy(round: &ClusterRound, node: usize, caps: &[Rational], betas: &Betas) -> bool {
    let s = round.size();
    let demands_met = cells_missing(round, node).into_iter().all(|c| {
        let m = round.cells[c].mappers;
        let got: Rational = sets::members(m).iter().map(|&j| betas.get(&(j, m)).cloned().unwrap_or_default()).sum();
        got >= from_u64(((s - 1) * round.cells[c].members.len()) as u64)
    });
    let budgets_met = round.nodes.iter().enumerate().filter(|&(_, &j)| j != node).all(|(pos, &j)| {
        let used: Rational = betas
            .iter()
            .filter(|((k, m), _)| *k == j && !sets::contains(*m, node))
            .map(|(_, b)| b.clone())
            .sum();
        used <= caps[pos].positive_part()
    });
    let nonnegative = betas.values().all(|b| *b >= Rational::zero());
    demands_met && budgets_met && nonnegative
}

/// β_{j,S1} = ((|S|-1)/z)·|V_{S1}| for every receiver.
pub fn update_witness(round: &ClusterRound, node: usize) -> Betas {
    let f = Rational::new(BigInt::from(round.size() - 1), BigInt::from(round.z));
    let mut out = Betas::new();
    for c in cells_missing(round, node) {
        let cell = &round.cells[c];
        for j in sets::members(cell.mappers) {
            out.insert((j, cell.mappers), &f * from_u64(cell.members.len() as u64));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterUpdate {
    /// n̄ per position in `round.nodes`.
    pub nbar: Vec<Rational>,
    pub all_feasible: bool,
    pub deficit_ok: Vec<bool>,
    pub feasibility: Vec<FeasibilityResult>,
}

impl ParameterUpdate {
    /// Witness consumed by the decoding certificate for `node`.
    pub fn witness(&self, round: &ClusterRound, node: usize) -> Betas {
        if self.all_feasible {
            self.feasibility[round.position(node).unwrap()].betas.clone()
        } else {
            update_witness(round, node)
        }
    }
}

/// Σ_{S1∋k, i∉S1} |V|, maximized over receivers i ≠ k.
pub fn max_exclusive_sum(round: &ClusterRound, k: usize) -> u64 {
    round
        .nodes
        .iter()
        .filter(|&&i| i != k)
        .map(|&i| {
            round
                .cells
                .iter()
                .filter(|c| sets::contains(c.mappers, k) && !sets::contains(c.mappers, i))
                .map(|c| c.members.len() as u64)
                .sum::<u64>()
        })
        .max()
        .unwrap_or(0)
}

/// n̄_k = n_k⁺ when every node is feasible; otherwise ((|S|-1)/z)·max_{i≠k} Σ_{S1∋k, i∉S1}|V| for all k.
pub fn update_parameters(round: &ClusterRound, profile: &DeficitProfile) -> ParameterUpdate {
    let feasibility: Vec<FeasibilityResult> = round.nodes.iter().map(|&k| check_feasible(round, profile, k)).collect();
    let deficit_ok = round.nodes.iter().map(|&k| check_deficit(profile, k)).collect();
    let all_feasible = feasibility.iter().all(|f| f.feasible);
    let nbar = if all_feasible {
        round.nodes.iter().map(|&k| Rational::from_integer(profile.of(k).n.into()).positive_part()).collect()
    } else {
        let f = Rational::new(BigInt::from(round.size() - 1), BigInt::from(round.z));
        round.nodes.iter().map(|&k| &f * from_u64(max_exclusive_sum(round, k))).collect()
    };
    ParameterUpdate { nbar, all_feasible, deficit_ok, feasibility }
}
