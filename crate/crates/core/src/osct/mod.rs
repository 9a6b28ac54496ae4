//! One-shot coded transmission.

pub mod coding;
pub mod solver;

pub use coding::{osct_decode, osct_encode, OsctMessageBlock, OsctRoundLayout};
pub use solver::{round_cost, solve, solve_p_osct, AlphaSolution, SolveMethod};

use crate::algebra::rational::Rational;
use crate::analysis::IvCatalog;
use crate::instance::SystemInstance;
use num_traits::Zero;

/// Analytic load, normalized by QN.
pub fn osct_load(inst: &SystemInstance) -> Rational {
    osct_load_catalog(&IvCatalog::build(inst))
}

pub fn osct_load_catalog(cat: &IvCatalog) -> Rational {
    let total: Rational = cat.active_rounds().iter().map(|r| round_cost(&solve(r))).sum();
    total / cat.qn()
}

#[derive(Clone, Debug)]
pub struct Theorem2Check {
    pub optimal: bool,
    /// Rounds with a nonzero optimal objective, as (label, objective).
    pub witness: Vec<(String, Rational)>,
    pub osct_load: Rational,
    pub lower_bound: Rational,
}

/// Zero optimal objective in every round; then the load must meet the bound exactly.
pub fn check_theorem2(inst: &SystemInstance) -> Theorem2Check {
    let cat = IvCatalog::build(inst);
    let mut witness = Vec::new();
    let mut total = Rational::zero();
    for r in cat.active_rounds() {
        let sol = solve(&r);
        total += round_cost(&sol);
        if !sol.objective.is_zero() {
            witness.push((r.label(), sol.objective.clone()));
        }
    }
    let osct_load = total / cat.qn();
    let lower_bound = cat.lower_bound();
    let optimal = witness.is_empty();
    if optimal {
        assert_eq!(osct_load, lower_bound, "zero objective everywhere must meet the bound");
    }
    Theorem2Check { optimal, witness, osct_load, lower_bound }
}

#[derive(Clone, Debug)]
pub struct OsctRun {
    pub transcript: crate::transcript::Transcript,
    /// Analytic load, normalized by QN.
    pub load: Rational,
    /// (IV, requester) pairs recovered and checked.
    pub recovered: usize,
}

/// Encodes every active round, then decodes at every requester and compares with the payload source.
pub fn osct_execute(
    inst: &SystemInstance,
    cat: &IvCatalog,
    field: &crate::algebra::GaloisField,
    source: crate::payload::PayloadSource,
    w: usize,
    verify: bool,
    exec: crate::par::Exec,
) -> Result<OsctRun, crate::error::DecodeError> {
    use crate::error::DecodeError;
    use crate::payload::LocalStore;
    let rounds = cat.active_rounds();
    let per_round = exec.try_map(&rounds, |round| {
        let sol = solve(round);
        let layout = OsctRoundLayout::new(round, &sol, w);
        assert_eq!(layout.units(), round_cost(&sol), "layout disagrees with the round cost");
        let blocks = osct_encode(field, round, &layout, |k| LocalStore::new(k, inst, source));
        let records: Vec<_> = blocks.iter().map(|b| b.record(&layout, field.bits())).collect();
        let mut recovered = 0;
        if verify {
            for &j in &round.nodes {
                let store = LocalStore::new(j, inst, source);
                let got = osct_decode(field, round, &layout, &blocks, &store)?;
                for cell in round.cells.iter().filter(|c| !crate::sets::contains(c.mappers, j)) {
                    for &key in &cell.members {
                        if got.get(&key) != Some(&source.payload(key, layout.iv_len)) {
                            return Err(DecodeError::Mismatch { round: round.label(), receiver: j + 1, iv: key.to_string() });
                        }
                        recovered += 1;
                    }
                }
            }
        }
        Ok((records, round_cost(&sol), recovered))
    })?;
    let mut transcript = crate::transcript::Transcript::default();
    let mut total = Rational::zero();
    let mut recovered = 0;
    for (records, cost, rec) in per_round {
        transcript.records.extend(records);
        total += cost;
        recovered += rec;
    }
    Ok(OsctRun { transcript, load: total / cat.qn(), recovered })
}
