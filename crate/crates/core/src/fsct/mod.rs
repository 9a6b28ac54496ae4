//! Few-shot coded transmission.

pub mod certificate;
pub mod coding;
pub mod conditions;
pub mod flow;

pub use certificate::{certify_nonzero_path, decoding_structure, path_is_valid, CertificateError, DecodingStructure};
pub use coding::{fsct_decode, fsct_encode, FsctDecodeFailure, FsctMessageBlock, FsctRoundLayout};
pub use conditions::{
    betas_satisfy, check_deficit, check_feasible, feasibility_with, update_parameters, update_witness, Betas,
    FeasibilityResult, ParameterUpdate,
};

use crate::algebra::rational::{from_u64, Rational};
use crate::algebra::GaloisField;
use crate::analysis::{deficit_profile, ClusterRound, IvCatalog};
use crate::error::DecodeError;
use crate::par::Exec;
use crate::payload::{LocalStore, PayloadSource};
use crate::sets;
use crate::transcript::{Transcript, TranscriptRecord};
use crate::SystemInstance;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MAX_ATTEMPTS: usize = 16;

/// Everything the round needs before coding.
#[derive(Clone, Debug)]
pub struct RoundPlan {
    pub update: ParameterUpdate,
    /// Certificate witness per position in `round.nodes`.
    pub witnesses: Vec<Betas>,
    pub layout: FsctRoundLayout,
}

pub fn plan_round(round: &ClusterRound, w: usize) -> RoundPlan {
    let update = update_parameters(round, &deficit_profile(round));
    let witnesses: Vec<Betas> = round.nodes.iter().map(|&k| update.witness(round, k)).collect();
    let layout = FsctRoundLayout::new(round, &update, &witnesses, w);
    RoundPlan { update, witnesses, layout }
}

/// Σ_k n̄_k / (|S|-1) in IV units.
pub fn round_cost(update: &ParameterUpdate, round: &ClusterRound) -> Rational {
    let total: Rational = update.nbar.iter().sum();
    total / from_u64(round.size() as u64 - 1)
}

pub fn fsct_load(inst: &SystemInstance) -> Rational {
    fsct_load_catalog(&IvCatalog::build(inst))
}

pub fn fsct_load_catalog(cat: &IvCatalog) -> Rational {
    let total: Rational = cat
        .active_rounds()
        .iter()
        .map(|r| round_cost(&update_parameters(r, &deficit_profile(r)), r))
        .sum();
    total / cat.qn()
}

/// The three-term closed form: bound + deficit correction + feasibility penalty.
/// Coincides with [`fsct_load`] when every round is feasible for all nodes.
pub fn theorem3_formula(inst: &SystemInstance) -> Rational {
    let cat = IvCatalog::build(inst);
    let mut extra = Rational::zero();
    for r in cat.active_rounds() {
        let p = deficit_profile(&r);
        let s1 = from_u64(r.size() as u64 - 1);
        let mut corr = Rational::zero();
        let mut penalty = Rational::zero();
        for &k in &r.nodes {
            let n = Rational::from_integer(p.of(k).n.into());
            let e1 = check_deficit(&p, k);
            let e2 = check_feasible(&r, &p, k).feasible;
            if !e1 {
                corr += n.clone() * Rational::from_integer((-1).into());
            } else if !e2 {
                corr -= n;
            }
            if !e2 {
                let best = r
                    .nodes
                    .iter()
                    .map(|&j| {
                        r.cells
                            .iter()
                            .filter(|c| sets::contains(c.mappers, j) && !sets::contains(c.mappers, k))
                            .map(|c| c.members.len() as u64)
                            .sum::<u64>()
                    })
                    .max()
                    .unwrap_or(0);
                penalty += from_u64(best);
            }
        }
        extra += corr / s1 + penalty / from_u64(r.z as u64);
    }
    cat.lower_bound() + extra / cat.qn()
}

#[derive(Clone, Debug)]
pub struct Theorem4Check {
    pub optimal: bool,
    /// (round label, 1-based node, deficit ok, feasible) for every failing node.
    pub violations: Vec<(String, usize, bool, bool)>,
    pub fsct_load: Rational,
    pub lower_bound: Rational,
}

pub fn check_theorem4(inst: &SystemInstance) -> Theorem4Check {
    let cat = IvCatalog::build(inst);
    let mut violations = Vec::new();
    for r in cat.active_rounds() {
        let p = deficit_profile(&r);
        for &k in &r.nodes {
            let e1 = check_deficit(&p, k);
            let e2 = check_feasible(&r, &p, k).feasible;
            if !(e1 && e2) {
                violations.push((r.label(), k + 1, e1, e2));
            }
        }
    }
    let fsct_load = fsct_load_catalog(&cat);
    let lower_bound = cat.lower_bound();
    let optimal = violations.is_empty();
    if optimal {
        assert_eq!(fsct_load, lower_bound, "both conditions everywhere must meet the bound");
    }
    Theorem4Check { optimal, violations, fsct_load, lower_bound }
}

fn round_rng(seed: u64, round: &ClusterRound, attempt: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((round.cluster as u64) << 16) | ((round.z as u64) << 8) | attempt as u64);
    rng
}

#[derive(Clone, Debug)]
pub struct FsctRun {
    pub transcript: Transcript,
    pub load: Rational,
    pub recovered: usize,
    /// Largest number of encode attempts any round needed.
    pub max_attempts: usize,
}

struct RoundOutcome {
    records: Vec<TranscriptRecord>,
    cost: Rational,
    recovered: usize,
    attempts: usize,
}

fn execute_round(
    inst: &SystemInstance,
    round: &ClusterRound,
    field: &GaloisField,
    source: PayloadSource,
    w: usize,
    verify: bool,
    seed: u64,
) -> Result<RoundOutcome, DecodeError> {
    let plan = plan_round(round, w);
    let layout = &plan.layout;
    assert_eq!(layout.units(), round_cost(&plan.update, round));
    'attempt: for attempt in 1..=MAX_ATTEMPTS {
        let mut rng = round_rng(seed, round, attempt);
        let blocks = fsct_encode(field, round, layout, |k| LocalStore::new(k, inst, source), &mut rng);
        let records = blocks.iter().map(|b| b.record(layout, field.bits())).collect();
        let mut recovered = 0;
        if verify {
            for &j in &round.nodes {
                let store = LocalStore::new(j, inst, source);
                let got = match fsct_decode(field, round, layout, &blocks, &store) {
                    Ok(g) => g,
                    Err(FsctDecodeFailure::RetryNeeded(_)) => continue 'attempt,
                    Err(FsctDecodeFailure::Fatal(e)) => return Err(e),
                };
                for cell in round.cells.iter().filter(|c| !sets::contains(c.mappers, j)) {
                    for &key in &cell.members {
                        if got.get(&key) != Some(&source.payload(key, layout.iv_len())) {
                            return Err(DecodeError::Mismatch { round: round.label(), receiver: j + 1, iv: key.to_string() });
                        }
                        recovered += 1;
                    }
                }
            }
        }
        return Ok(RoundOutcome { records, cost: layout.units(), recovered, attempts: attempt });
    }
    Err(DecodeError::RetriesExhausted { round: round.label(), attempts: MAX_ATTEMPTS })
}

/// Encodes and, when `verify`, jointly decodes every active round, re-drawing coefficients on singular draws.
#[allow(clippy::too_many_arguments)]
pub fn fsct_execute(
    inst: &SystemInstance,
    cat: &IvCatalog,
    field: &GaloisField,
    source: PayloadSource,
    w: usize,
    verify: bool,
    seed: u64,
    exec: Exec,
) -> Result<FsctRun, DecodeError> {
    let rounds = cat.active_rounds();
    let outcomes = exec.try_map(&rounds, |r| execute_round(inst, r, field, source, w, verify, seed))?;
    let mut run = FsctRun { transcript: Transcript::default(), load: Rational::zero(), recovered: 0, max_attempts: 0 };
    let mut total = Rational::zero();
    for o in outcomes {
        run.transcript.records.extend(o.records);
        total += o.cost;
        run.recovered += o.recovered;
        run.max_attempts = run.max_attempts.max(o.attempts);
    }
    run.load = total / cat.qn();
    Ok(run)
}
