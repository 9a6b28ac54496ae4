use crate::algebra::rational::{from_u64, solve_square, Rational, RationalExt};
use crate::analysis::{deficit_profile, ClusterRound, DeficitProfile};
use crate::sets::{self, binomial, Mask};
use num_traits::{Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    /// Every cell empty.
    Empty,
    /// Unconstrained stationary point, valid when every node is strictly below the deficit threshold.
    ClosedForm,
    /// Exhaustive support enumeration over the unpinned variables.
    ActiveSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSolution {
    pub cluster: Mask,
    pub z: usize,
    pub nodes: Vec<usize>,
    /// Per node of `nodes`.
    pub alpha: Vec<Rational>,
    /// Per cell of the round, in cell order.
    pub tau: Vec<Rational>,
    pub objective: Rational,
    pub method: SolveMethod,
}

impl AlphaSolution {
    pub fn alpha_of(&self, node: usize) -> &Rational {
        let i = self.nodes.iter().position(|&k| k == node).expect("node in cluster");
        &self.alpha[i]
    }
}

/// Nodes forced to zero because they belong to an empty cell.
pub fn pinned(round: &ClusterRound) -> Vec<bool> {
    round
        .nodes
        .iter()
        .map(|&k| round.cells.iter().any(|c| c.members.is_empty() && sets::contains(c.mappers, k)))
        .collect()
}

pub fn taus(round: &ClusterRound, alpha: &[Rational]) -> Vec<Rational> {
    round
        .cells
        .iter()
        .map(|c| {
            let mut t = from_u64(c.members.len() as u64);
            for (i, &k) in round.nodes.iter().enumerate() {
                if sets::contains(c.mappers, k) {
                    t -= &alpha[i];
                }
            }
            t
        })
        .collect()
}

pub fn objective(round: &ClusterRound, alpha: &[Rational]) -> Rational {
    taus(round, alpha).iter().map(|t| t * t).sum()
}

/// Stationary point of the unconstrained objective:
/// α_j = Σ_{cells∋j}|V| / C(|S|-1,z-1) - (z-1)·Σ_{cells∌j}|V| / ((|S|-z)·C(|S|-1,z-1)).
pub fn closed_form(round: &ClusterRound) -> Vec<Rational> {
    let s = round.size();
    let z = round.z;
    let c = from_u64(binomial(s - 1, z - 1));
    round
        .nodes
        .iter()
        .map(|&k| {
            let (inside, outside) = round.split_sums(k);
            from_u64(inside) / &c
                - from_u64((z as u64 - 1) * outside) / (from_u64((s - z) as u64) * &c)
        })
        .collect()
}

pub fn closed_form_applies(round: &ClusterRound, profile: &DeficitProfile) -> bool {
    round.cells.iter().all(|c| !c.members.is_empty())
        && round.nodes.iter().all(|&k| profile.ratio_within(k, true))
}

/// Least squares restricted to the support `support` (positions into `nodes`).
fn restricted_stationary(round: &ClusterRound, support: &[usize]) -> Option<Vec<Rational>> {
    let n = support.len();
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut b = vec![Rational::zero(); n];
    for cell in &round.cells {
        let inside: Vec<usize> = (0..n).filter(|&i| sets::contains(cell.mappers, round.nodes[support[i]])).collect();
        let v = from_u64(cell.members.len() as u64);
        for &i in &inside {
            b[i] += &v;
            for &j in &inside {
                a[i][j] += from_u64(1);
            }
        }
    }
    let x = solve_square(&a, &b)?;
    let mut alpha = vec![Rational::zero(); round.size()];
    for (i, &p) in support.iter().enumerate() {
        alpha[p] = x[i].clone();
    }
    Some(alpha)
}

/// Minimum of the objective over α ≥ 0 with pinned nodes at zero, by enumerating supports.
/// Supports are tried by increasing size; a strictly smaller objective replaces the incumbent.
pub fn solve_active_set(round: &ClusterRound) -> (Vec<Rational>, Rational) {
    let pins = pinned(round);
    let free: Vec<usize> = (0..round.size()).filter(|&i| !pins[i]).collect();
    let zero = vec![Rational::zero(); round.size()];
    let mut best_obj = objective(round, &zero);
    let mut best = zero;
    let f = free.len();
    let mut masks: Vec<u32> = (1..(1u32 << f)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for m in masks {
        let support: Vec<usize> = (0..f).filter(|&i| m & (1 << i) != 0).map(|i| free[i]).collect();
        let Some(alpha) = restricted_stationary(round, &support) else { continue };
        if alpha.iter().any(|a| a.is_negative()) {
            continue;
        }
        let obj = objective(round, &alpha);
        if obj < best_obj {
            best_obj = obj;
            best = alpha;
        }
    }
    (best, best_obj)
}

pub fn solve_p_osct(round: &ClusterRound, profile: &DeficitProfile) -> AlphaSolution {
    let (alpha, method) = if round.skippable() {
        (vec![Rational::zero(); round.size()], SolveMethod::Empty)
    } else if closed_form_applies(round, profile) {
        (closed_form(round), SolveMethod::ClosedForm)
    } else {
        (solve_active_set(round).0, SolveMethod::ActiveSet)
    };
    let tau = taus(round, &alpha);
    let objective = tau.iter().map(|t| t * t).sum();
    AlphaSolution { cluster: round.cluster, z: round.z, nodes: round.nodes.clone(), alpha, tau, objective, method }
}

pub fn solve(round: &ClusterRound) -> AlphaSolution {
    solve_p_osct(round, &deficit_profile(round))
}

/// Σ_j C(|S|-2, z-1)·α_j + Σ_i τ_i^+, in IV units.
pub fn round_cost(sol: &AlphaSolution) -> Rational {
    let per = from_u64(binomial(sol.nodes.len() - 2, sol.z - 1));
    let coded: Rational = sol.alpha.iter().map(|a| a * &per).sum();
    let residue: Rational = sol.tau.iter().map(|t| t.positive_part()).sum();
    coded + residue
}
