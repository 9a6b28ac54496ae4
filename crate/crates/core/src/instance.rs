//! System instances: K nodes, N files, Q reduce functions, placement and assignment.

use crate::algebra::rational::{Rational, RationalExt};
use crate::sets::{binomial, subsets_of, MAX_NODES};
use num_traits::{ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Placement and assignment, 0-based and sorted internally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemInstance {
    pub k: usize,
    pub n: usize,
    pub q: usize,
    pub placement: Vec<Vec<usize>>,
    pub assignment: Vec<Vec<usize>>,
}

/// Intermediate value of reduce function `q` on file `n`, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IvKey {
    pub q: usize,
    pub n: usize,
}

impl fmt::Display for IvKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v[{},{}]", self.q + 1, self.n + 1)
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("K must be ≥ 1")]
    ZeroNodes,
    #[error("N must be ≥ 1")]
    ZeroFiles,
    #[error("Q must be ≥ 1")]
    ZeroFunctions,
    #[error("at most {MAX_NODES} nodes are supported, got {0}")]
    TooManyNodes(usize),
    #[error("{0} has {1} entries, expected K = {2}")]
    WrongArity(&'static str, usize, usize),
    #[error("{what} index {index} of node {node} is outside 1..={max}")]
    OutOfRange { what: &'static str, node: usize, index: usize, max: usize },
    #[error("node {node} lists {what} {index} twice")]
    Duplicate { what: &'static str, node: usize, index: usize },
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("{0}")]
    Descriptor(String),
    #[error("malformed instance document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.violations.join("; "))
    }
}

/// On-disk form, 1-based.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[allow(non_snake_case)]
pub struct InstanceDoc {
    pub K: usize,
    pub N: usize,
    pub Q: usize,
    pub placement: Vec<Vec<usize>>,
    pub assignment: Vec<Vec<usize>>,
}

impl SystemInstance {
    /// Builds from 1-based sets; structural errors only, cover is left to [`validate`].
    pub fn from_one_based(
        k: usize,
        n: usize,
        q: usize,
        placement: &[Vec<usize>],
        assignment: &[Vec<usize>],
    ) -> Result<Self, InstanceError> {
        if k == 0 {
            return Err(InstanceError::ZeroNodes);
        }
        if k > MAX_NODES {
            return Err(InstanceError::TooManyNodes(k));
        }
        if n == 0 {
            return Err(InstanceError::ZeroFiles);
        }
        if q == 0 {
            return Err(InstanceError::ZeroFunctions);
        }
        if placement.len() != k {
            return Err(InstanceError::WrongArity("placement", placement.len(), k));
        }
        if assignment.len() != k {
            return Err(InstanceError::WrongArity("assignment", assignment.len(), k));
        }
        let conv = |sets: &[Vec<usize>], what: &'static str, max: usize| {
            sets.iter()
                .enumerate()
                .map(|(node, s)| {
                    let mut out = Vec::with_capacity(s.len());
                    for &i in s {
                        if i == 0 || i > max {
                            return Err(InstanceError::OutOfRange { what, node: node + 1, index: i, max });
                        }
                        out.push(i - 1);
                    }
                    out.sort_unstable();
                    if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
                        return Err(InstanceError::Duplicate { what, node: node + 1, index: w[0] + 1 });
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(SystemInstance {
            k,
            n,
            q,
            placement: conv(placement, "file", n)?,
            assignment: conv(assignment, "function", q)?,
        })
    }

    pub fn from_doc(doc: &InstanceDoc) -> Result<Self, InstanceError> {
        Self::from_one_based(doc.K, doc.N, doc.Q, &doc.placement, &doc.assignment)
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let one = |sets: &Vec<Vec<usize>>| sets.iter().map(|s| s.iter().map(|i| i + 1).collect()).collect();
        InstanceDoc {
            K: self.k,
            N: self.n,
            Q: self.q,
            placement: one(&self.placement),
            assignment: one(&self.assignment),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.k == 0 {
            violations.push("K must be ≥ 1".to_string());
        }
        if self.n == 0 {
            violations.push("N must be ≥ 1".to_string());
        }
        if self.q == 0 {
            violations.push("Q must be ≥ 1".to_string());
        }
        if self.placement.len() != self.k {
            violations.push(format!("placement has {} nodes, expected {}", self.placement.len(), self.k));
        }
        if self.assignment.len() != self.k {
            violations.push(format!("assignment has {} nodes, expected {}", self.assignment.len(), self.k));
        }
        let mut check = |sets: &[Vec<usize>], what: &str, max: usize| {
            let mut covered = vec![false; max];
            for (node, s) in sets.iter().enumerate() {
                for (j, &i) in s.iter().enumerate() {
                    if i >= max {
                        violations.push(format!("node {} lists {what} {} outside 1..={max}", node + 1, i + 1));
                        continue;
                    }
                    if s[..j].contains(&i) {
                        violations.push(format!("node {} lists {what} {} twice", node + 1, i + 1));
                    }
                    covered[i] = true;
                }
            }
            for (i, c) in covered.iter().enumerate() {
                if !c {
                    let verb = if what == "file" { "unmapped" } else { "unassigned" };
                    violations.push(format!("{what} {} {verb}", i + 1));
                }
            }
        };
        check(&self.placement, "file", self.n);
        check(&self.assignment, "function", self.q);
        ValidationReport { violations }
    }

    pub fn maps(&self, node: usize, file: usize) -> bool {
        self.placement[node].binary_search(&file).is_ok()
    }

    pub fn reduces(&self, node: usize, func: usize) -> bool {
        self.assignment[node].binary_search(&func).is_ok()
    }

    /// Fraction of files mapped by `node`.
    pub fn mapping_load(&self, node: usize) -> Rational {
        Rational::new(self.placement[node].len().into(), self.n.into())
    }

    pub fn reducing_load(&self, node: usize) -> Rational {
        Rational::new(self.assignment[node].len().into(), self.q.into())
    }

    /// Total mapped files over N.
    pub fn computation_load(&self) -> Rational {
        let total: usize = self.placement.iter().map(|s| s.len()).sum();
        Rational::new(total.into(), self.n.into())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self, InstanceError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| InstanceError::Io { path: path.display().to_string(), source })?;
        Self::from_json_str(&text)
    }

    /// Parses and validates.
    pub fn from_json_str(text: &str) -> Result<Self, InstanceError> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        let inst = Self::from_doc(&doc)?;
        let report = inst.validate();
        if !report.is_valid() {
            return Err(InstanceError::Invalid(report));
        }
        Ok(inst)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("instance serializes")
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<(), InstanceError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string() + "\n")
            .map_err(|source| InstanceError::Io { path: path.display().to_string(), source })
    }
}

/// Recipe for an instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceDescriptor {
    Explicit {
        instance: InstanceDoc,
    },
    Homogeneous {
        k: usize,
        r: usize,
        s: usize,
        n: usize,
        q: usize,
    },
    /// `q_s[s-1]` functions are reduced by each s-subset batch.
    SemiHomogeneous {
        k: usize,
        r: usize,
        n: usize,
        q_s: Vec<usize>,
    },
    /// Loads are rationals written as strings, e.g. "1/2".
    RandomByLoad {
        k: usize,
        n: usize,
        q: usize,
        mapping: Vec<String>,
        reducing: Vec<String>,
        seed: u64,
    },
    /// Three nodes, node i reduces function i only.
    ThreeNode {
        placement: Vec<Vec<usize>>,
    },
}

pub const MAX_RESAMPLE: usize = 10_000;

fn desc_err(msg: impl Into<String>) -> InstanceError {
    InstanceError::Descriptor(msg.into())
}

/// Assigns consecutive index blocks of `per` items to each `size`-subset in lexicographic order.
fn batches(k: usize, size: usize, per: usize, offset: usize, sets: &mut [Vec<usize>]) -> usize {
    let nodes: Vec<usize> = (0..k).collect();
    let mut next = offset;
    for mask in subsets_of(&nodes, size) {
        for _ in 0..per {
            for (node, set) in sets.iter_mut().enumerate() {
                if mask & (1 << node) != 0 {
                    set.push(next);
                }
            }
            next += 1;
        }
    }
    next
}

fn symmetric_placement(k: usize, r: usize, n: usize) -> Result<Vec<Vec<usize>>, InstanceError> {
    if r == 0 || r > k {
        return Err(desc_err(format!("r = {r} must lie in 1..={k}")));
    }
    let c = binomial(k, r) as usize;
    if !n.is_multiple_of(c) {
        return Err(desc_err(format!("N = {n} is not divisible by C({k},{r}) = {c}")));
    }
    let mut placement = vec![Vec::new(); k];
    batches(k, r, n / c, 0, &mut placement);
    Ok(placement)
}

fn parse_loads(values: &[String], k: usize, what: &str) -> Result<Vec<Rational>, InstanceError> {
    if values.len() != k {
        return Err(desc_err(format!("{what} loads: {} entries, expected {k}", values.len())));
    }
    values
        .iter()
        .map(|s| {
            let v = crate::algebra::rational::parse_rational(s)
                .ok_or_else(|| desc_err(format!("{what} load {s:?} is not a rational")))?;
            if v < Rational::zero() || v > Rational::from_integer(1.into()) {
                return Err(desc_err(format!("{what} load {s} outside [0,1]")));
            }
            Ok(v)
        })
        .collect()
}

fn load_counts(loads: &[Rational], total: usize, what: &str) -> Result<Vec<usize>, InstanceError> {
    let counts: Vec<usize> = loads
        .iter()
        .map(|m| (m * Rational::from_integer(total.into())).round_half_up().to_usize().unwrap())
        .collect();
    if counts.iter().sum::<usize>() < total {
        return Err(desc_err(format!(
            "{what} loads give {} slots, fewer than the {total} items to cover",
            counts.iter().sum::<usize>()
        )));
    }
    Ok(counts)
}

/// Uniform subsets of the requested sizes, redrawn until they cover `0..total`.
fn covering_draw(
    rng: &mut ChaCha8Rng,
    counts: &[usize],
    total: usize,
    what: &str,
) -> Result<Vec<Vec<usize>>, InstanceError> {
    for _ in 0..MAX_RESAMPLE {
        let sets: Vec<Vec<usize>> = counts
            .iter()
            .map(|&c| {
                let mut s = sample(rng, total, c).into_vec();
                s.sort_unstable();
                s
            })
            .collect();
        let mut covered = vec![false; total];
        for s in &sets {
            for &i in s {
                covered[i] = true;
            }
        }
        if covered.iter().all(|&c| c) {
            return Ok(sets);
        }
    }
    Err(desc_err(format!("no covering {what} found in {MAX_RESAMPLE} draws")))
}

impl InstanceDescriptor {
    pub fn generate(&self) -> Result<SystemInstance, InstanceError> {
        match self {
            InstanceDescriptor::Explicit { instance } => SystemInstance::from_doc(instance),
            InstanceDescriptor::Homogeneous { k, r, s, n, q } => {
                let (k, s, q) = (*k, *s, *q);
                let placement = symmetric_placement(k, *r, *n)?;
                if s == 0 || s > k {
                    return Err(desc_err(format!("s = {s} must lie in 1..={k}")));
                }
                let c = binomial(k, s) as usize;
                if !q.is_multiple_of(c) {
                    return Err(desc_err(format!("Q = {q} is not divisible by C({k},{s}) = {c}")));
                }
                let mut assignment = vec![Vec::new(); k];
                batches(k, s, q / c, 0, &mut assignment);
                finish(k, *n, q, placement, assignment)
            }
            InstanceDescriptor::SemiHomogeneous { k, r, n, q_s } => {
                let k = *k;
                let placement = symmetric_placement(k, *r, *n)?;
                if q_s.len() > k {
                    return Err(desc_err(format!("{} function groups for {k} nodes", q_s.len())));
                }
                let mut assignment = vec![Vec::new(); k];
                let mut next = 0;
                for (i, &count) in q_s.iter().enumerate() {
                    let s = i + 1;
                    let c = binomial(k, s) as usize;
                    if !count.is_multiple_of(c) {
                        return Err(desc_err(format!("|Q_{s}| = {count} is not divisible by C({k},{s}) = {c}")));
                    }
                    next = batches(k, s, count / c, next, &mut assignment);
                }
                finish(k, *n, next, placement, assignment)
            }
            InstanceDescriptor::RandomByLoad { k, n, q, mapping, reducing, seed } => {
                let (k, n, q) = (*k, *n, *q);
                if k == 0 {
                    return Err(InstanceError::ZeroNodes);
                }
                let m = parse_loads(mapping, k, "mapping")?;
                let w = parse_loads(reducing, k, "reducing")?;
                let mc = load_counts(&m, n, "mapping")?;
                let wc = load_counts(&w, q, "reducing")?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let placement = covering_draw(&mut rng, &mc, n, "placement")?;
                let assignment = covering_draw(&mut rng, &wc, q, "assignment")?;
                finish(k, n, q, placement, assignment)
            }
            InstanceDescriptor::ThreeNode { placement } => {
                if placement.len() != 3 {
                    return Err(desc_err("three_node placement needs exactly 3 node sets"));
                }
                let n = placement.iter().flatten().copied().max().unwrap_or(0);
                let inst = SystemInstance::from_one_based(3, n, 3, placement, &[vec![1], vec![2], vec![3]])?;
                check_valid(inst)
            }
        }
    }
}

fn check_valid(inst: SystemInstance) -> Result<SystemInstance, InstanceError> {
    let report = inst.validate();
    if report.is_valid() {
        Ok(inst)
    } else {
        Err(InstanceError::Invalid(report))
    }
}

fn finish(
    k: usize,
    n: usize,
    q: usize,
    placement: Vec<Vec<usize>>,
    assignment: Vec<Vec<usize>>,
) -> Result<SystemInstance, InstanceError> {
    if k == 0 {
        return Err(InstanceError::ZeroNodes);
    }
    if n == 0 {
        return Err(InstanceError::ZeroFiles);
    }
    if q == 0 {
        return Err(InstanceError::ZeroFunctions);
    }
    check_valid(SystemInstance { k, n, q, placement, assignment })
}
