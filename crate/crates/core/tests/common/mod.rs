#![allow(dead_code)]

use coded_shuffle::analysis::{ClusterRound, IvCatalog};
use coded_shuffle::SystemInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every file on a uniformly random nonempty node set, every function on a random nonempty reducer set.
pub fn random_instance(seed: u64, k: usize, n: usize, q: usize) -> SystemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = (1u32 << k) - 1;
    let mut placement = vec![Vec::new(); k];
    let mut assignment = vec![Vec::new(); k];
    for f in 1..=n {
        let m = rng.gen_range(1..=full);
        for (node, set) in placement.iter_mut().enumerate() {
            if m & (1 << node) != 0 {
                set.push(f);
            }
        }
    }
    for g in 1..=q {
        let m = rng.gen_range(1..=full);
        for (node, set) in assignment.iter_mut().enumerate() {
            if m & (1 << node) != 0 {
                set.push(g);
            }
        }
    }
    SystemInstance::from_one_based(k, n, q, &placement, &assignment).unwrap()
}

/// Instance `i` of the decode corpus: K ∈ {3,4,5}, N, Q ∈ 1..=24.
pub fn corpus_instance(i: u64) -> SystemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE_0000 + i);
    let k = 3 + (i % 3) as usize;
    let n = rng.gen_range(1..=24);
    let q = rng.gen_range(1..=24);
    random_instance(rng.gen(), k, n, q)
}

/// Three-node placement with the given region sizes (S1, S2, S3, S12, S13, S23, S123).
pub fn three_node_placement(counts: [usize; 7]) -> Vec<Vec<usize>> {
    const REGIONS: [&[usize]; 7] = [&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];
    let mut placement = vec![Vec::new(); 3];
    let mut next = 1;
    for (region, &c) in REGIONS.iter().zip(&counts) {
        for _ in 0..c {
            for &node in *region {
                placement[node].push(next);
            }
            next += 1;
        }
    }
    placement
}

pub fn rounds_of(inst: &SystemInstance) -> Vec<ClusterRound> {
    IvCatalog::build(inst).active_rounds()
}

pub mod exact {
    use coded_shuffle::Rational;
    use num_traits::{One, Signed, Zero};

    /// Unique solution of the square system, `None` when singular.
    pub fn gauss(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
        let n = b.len();
        for col in 0..n {
            let p = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, p);
            b.swap(col, p);
            let inv = Rational::one() / &a[col][col];
            for x in a[col].iter_mut() {
                *x *= &inv;
            }
            b[col] *= &inv;
            let (pivot, pb) = (a[col].clone(), b[col].clone());
            for (r, (row, br)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, p) in row.iter_mut().zip(&pivot) {
                        *x -= &f * p;
                    }
                    *br -= &f * &pb;
                }
            }
        }
        Some(b)
    }

    pub fn nonnegative(x: &[Rational]) -> bool {
        x.iter().all(|v| !v.is_negative())
    }
}

/// Reference optimizer for min Σ_cells (|V| - Σ_{j∈S1} α_j)² over α ≥ 0 with empty-cell nodes fixed at 0.
pub mod osct_oracle {
    use super::exact::{gauss, nonnegative};
    use coded_shuffle::analysis::ClusterRound;
    use coded_shuffle::Rational;
    use num_traits::{Signed, Zero};

    fn incidence(round: &ClusterRound) -> Vec<Vec<bool>> {
        round
            .cells
            .iter()
            .map(|c| round.nodes.iter().map(|&k| c.mappers & (1 << k) != 0).collect())
            .collect()
    }

    fn fixed(round: &ClusterRound) -> Vec<bool> {
        let inc = incidence(round);
        (0..round.nodes.len())
            .map(|j| round.cells.iter().zip(&inc).any(|(c, row)| row[j] && c.members.is_empty()))
            .collect()
    }

    pub fn residuals(round: &ClusterRound, alpha: &[Rational]) -> Vec<Rational> {
        incidence(round)
            .iter()
            .zip(&round.cells)
            .map(|(row, c)| {
                let used: Rational = row.iter().zip(alpha).filter(|(m, _)| **m).map(|(_, a)| a.clone()).sum();
                Rational::from_integer((c.members.len() as i64).into()) - used
            })
            .collect()
    }

    pub fn value(round: &ClusterRound, alpha: &[Rational]) -> Rational {
        residuals(round, alpha).iter().map(|t| t * t).sum()
    }

    /// KKT for the convex problem: ∂/∂α_j = -2 Σ_{cells∋j} τ, zero on the support, nonnegative off it.
    pub fn kkt_holds(round: &ClusterRound, alpha: &[Rational]) -> bool {
        let fix = fixed(round);
        let tau = residuals(round, alpha);
        let inc = incidence(round);
        (0..round.nodes.len()).all(|j| {
            if fix[j] {
                return alpha[j].is_zero();
            }
            let s: Rational = inc.iter().zip(&tau).filter(|(row, _)| row[j]).map(|(_, t)| t.clone()).sum();
            if alpha[j].is_negative() {
                false
            } else if alpha[j].is_positive() {
                s.is_zero()
            } else {
                !s.is_positive()
            }
        })
    }

    /// Minimum over every support of the free variables; singular supports are covered by smaller ones.
    pub fn min_value(round: &ClusterRound) -> Rational {
        let fix = fixed(round);
        let free: Vec<usize> = (0..round.nodes.len()).filter(|&j| !fix[j]).collect();
        let inc = incidence(round);
        let zero = vec![Rational::zero(); round.nodes.len()];
        let mut best = value(round, &zero);
        for mask in 1u32..(1 << free.len()) {
            let sup: Vec<usize> = (0..free.len()).filter(|i| mask & (1 << i) != 0).map(|i| free[i]).collect();
            let a: Vec<Vec<Rational>> = sup
                .iter()
                .map(|&p| {
                    sup.iter()
                        .map(|&q| {
                            let c = inc.iter().filter(|row| row[p] && row[q]).count();
                            Rational::from_integer((c as i64).into())
                        })
                        .collect()
                })
                .collect();
            let b: Vec<Rational> = sup
                .iter()
                .map(|&p| {
                    let s: usize = inc.iter().zip(&round.cells).filter(|(row, _)| row[p]).map(|(_, c)| c.members.len()).sum();
                    Rational::from_integer((s as i64).into())
                })
                .collect();
            let Some(x) = gauss(a, b) else { continue };
            if !nonnegative(&x) {
                continue;
            }
            let mut alpha = zero.clone();
            for (v, &p) in x.into_iter().zip(&sup) {
                alpha[p] = v;
            }
            let v = value(round, &alpha);
            if v < best {
                best = v;
            }
        }
        best
    }
}

/// Vertex enumeration of { β ≥ 0 : Σ_{j∈S1} β_{j,S1} ≥ (|S|-1)|V_S1| for S1 ∌ i, Σ_{S1∋j, i∉S1} β_{j,S1} ≤ cap_j }.
pub mod feasibility_oracle {
    use super::exact::gauss;
    use coded_shuffle::analysis::ClusterRound;
    use coded_shuffle::Rational;
    use itertools::Itertools;
    use num_traits::{Signed, Zero};

    /// (sender, cell index) per variable.
    pub fn variables(round: &ClusterRound, receiver: usize) -> Vec<(usize, usize)> {
        let mut vars = Vec::new();
        for (ci, c) in round.cells.iter().enumerate() {
            if c.mappers & (1 << receiver) != 0 {
                continue;
            }
            for &j in &round.nodes {
                if c.mappers & (1 << j) != 0 {
                    vars.push((j, ci));
                }
            }
        }
        vars
    }

    /// `caps[p]` is the budget of `round.nodes[p]`; negatives act as zero.
    pub fn feasible(round: &ClusterRound, receiver: usize, caps: &[Rational]) -> bool {
        let vars = variables(round, receiver);
        let m = vars.len();
        let s = round.nodes.len() as i64;
        let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
        let one = Rational::from_integer(1.into());
        for (ci, c) in round.cells.iter().enumerate() {
            if c.mappers & (1 << receiver) != 0 {
                continue;
            }
            let a = vars.iter().map(|&(_, vc)| if vc == ci { one.clone() } else { Rational::zero() }).collect();
            rows.push((a, Rational::from_integer(((s - 1) * c.members.len() as i64).into())));
        }
        for (p, &j) in round.nodes.iter().enumerate() {
            if j == receiver {
                continue;
            }
            let cap = if caps[p].is_negative() { Rational::zero() } else { caps[p].clone() };
            let a = vars.iter().map(|&(vj, _)| if vj == j { -one.clone() } else { Rational::zero() }).collect();
            rows.push((a, -cap));
        }
        for v in 0..m {
            let a = (0..m).map(|u| if u == v { one.clone() } else { Rational::zero() }).collect();
            rows.push((a, Rational::zero()));
        }
        let satisfies = |x: &[Rational]| {
            rows.iter().all(|(a, b)| {
                let lhs: Rational = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
                lhs >= *b
            })
        };
        if m == 0 {
            return satisfies(&[]);
        }
        rows.iter().combinations(m).any(|tight| {
            let a = tight.iter().map(|(a, _)| a.clone()).collect();
            let b = tight.iter().map(|(_, b)| b.clone()).collect();
            gauss(a, b).is_some_and(|x| satisfies(&x))
        })
    }
}
