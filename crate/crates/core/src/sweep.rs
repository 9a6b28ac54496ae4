//! Load-bias sweep over random 4-node instances.

use crate::algebra::rational::{from_u64, parse_rational, rat, Rational, RationalExt};
use crate::analysis::IvCatalog;
use crate::instance::{InstanceDescriptor, InstanceError};
use crate::par::Exec;
use crate::report::SchemeKind;
use crate::{fsct, osct};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::io::Write;

pub const CSV_HEADER: &str = "d,sample,seed,lower_bound,uncoded,osct,fsct";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "K")]
    pub k: usize,
    /// Bias values as rationals, e.g. "3/64".
    pub d: Vec<String>,
    pub samples: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    pub seed: u64,
    pub schemes: Vec<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            k: 4,
            d: (0..32).map(|i| rat(i, 64).to_string()).collect(),
            samples: 50,
            n: 64,
            q: 64,
            seed: 2024,
            schemes: vec!["uncoded".into(), "osct".into(), "fsct".into()],
        }
    }
}

/// Mapping loads (½−d, ½−d, ½+d, ½+d) and reducing loads (½+d, ½+d, ½−d, ½−d); for K ≠ 4 the
/// first half of the nodes takes ½−d.
pub fn bias_loads(k: usize, d: &Rational) -> (Vec<String>, Vec<String>) {
    let lo = (rat(1, 2) - d).to_string();
    let hi = (rat(1, 2) + d).to_string();
    let m = (0..k).map(|i| if i < k / 2 { lo.clone() } else { hi.clone() }).collect();
    let w = (0..k).map(|i| if i < k / 2 { hi.clone() } else { lo.clone() }).collect();
    (m, w)
}

/// Seed of sample `s` at grid index `i`.
pub fn sample_seed(master: u64, i: usize, s: usize) -> u64 {
    let mut x = master ^ ((i as u64) << 32 | s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub d: Rational,
    /// `None` on the per-d mean row.
    pub sample: Option<usize>,
    pub seed: Option<u64>,
    pub lower_bound: Rational,
    pub uncoded: Option<Rational>,
    pub osct: Option<Rational>,
    pub fsct: Option<Rational>,
}

impl SweepRow {
    pub fn csv(&self) -> String {
        let f = |v: &Option<Rational>| v.as_ref().map(|x| x.decimal(6)).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.d.decimal(6),
            self.sample.map(|s| s.to_string()).unwrap_or_else(|| "mean".into()),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.lower_bound.decimal(6),
            f(&self.uncoded),
            f(&self.osct),
            f(&self.fsct)
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("bad bias value '{0}'")]
    BadBias(String),
    #[error("{0}")]
    Scheme(String),
    #[error("sample d={d} #{sample}: {source}")]
    Instance { d: String, sample: usize, source: InstanceError },
}

fn mean(rows: &[SweepRow], pick: impl Fn(&SweepRow) -> Option<Rational>) -> Option<Rational> {
    let vals: Option<Vec<Rational>> = rows.iter().map(pick).collect();
    let vals = vals?;
    if vals.is_empty() {
        return None;
    }
    let n = from_u64(vals.len() as u64);
    Some(vals.into_iter().sum::<Rational>() / n)
}

/// Sample rows followed by one mean row per bias value, ordered by (d, sample).
pub fn run_sweep(cfg: &SweepConfig, exec: Exec) -> Result<Vec<SweepRow>, SweepError> {
    let schemes: BTreeSet<SchemeKind> = cfg
        .schemes
        .iter()
        .map(|s| s.parse::<SchemeKind>())
        .collect::<Result<_, _>>()
        .map_err(SweepError::Scheme)?;
    let grid: Vec<Rational> = cfg
        .d
        .iter()
        .map(|s| parse_rational(s).ok_or_else(|| SweepError::BadBias(s.clone())))
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|i| (0..cfg.samples).map(move |s| (i, s))).collect();
    let rows = exec.try_map(&jobs, |&(i, s)| {
        let d = &grid[i];
        let seed = sample_seed(cfg.seed, i, s);
        let (mapping, reducing) = bias_loads(cfg.k, d);
        let inst = InstanceDescriptor::RandomByLoad { k: cfg.k, n: cfg.n, q: cfg.q, mapping, reducing, seed }
            .generate()
            .map_err(|source| SweepError::Instance { d: d.to_string(), sample: s, source })?;
        let cat = IvCatalog::build(&inst);
        Ok(SweepRow {
            d: d.clone(),
            sample: Some(s),
            seed: Some(seed),
            lower_bound: cat.lower_bound(),
            uncoded: schemes.contains(&SchemeKind::Uncoded).then(|| cat.uncoded_load()),
            osct: schemes.contains(&SchemeKind::Osct).then(|| osct::osct_load_catalog(&cat)),
            fsct: schemes.contains(&SchemeKind::Fsct).then(|| fsct::fsct_load_catalog(&cat)),
        })
    })?;
    let mut out = Vec::with_capacity(rows.len() + grid.len());
    for (i, d) in grid.iter().enumerate() {
        let chunk = &rows[i * cfg.samples..(i + 1) * cfg.samples];
        out.extend_from_slice(chunk);
        if chunk.is_empty() {
            continue;
        }
        out.push(SweepRow {
            d: d.clone(),
            sample: None,
            seed: None,
            lower_bound: mean(chunk, |r| Some(r.lower_bound.clone())).unwrap(),
            uncoded: mean(chunk, |r| r.uncoded.clone()),
            osct: mean(chunk, |r| r.osct.clone()),
            fsct: mean(chunk, |r| r.fsct.clone()),
        });
    }
    Ok(out)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv())?;
    }
    Ok(())
}

pub fn mean_rows(rows: &[SweepRow]) -> Vec<&SweepRow> {
    rows.iter().filter(|r| r.sample.is_none()).collect()
}
