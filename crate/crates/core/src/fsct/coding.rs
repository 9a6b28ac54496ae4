use super::conditions::{Betas, ParameterUpdate};
use crate::algebra::rational::{lcm_denominators, Rational};
use crate::algebra::{FieldMatrix, GaloisField, SolveError};
use crate::analysis::ClusterRound;
use crate::error::DecodeError;
use crate::instance::IvKey;
use crate::payload::LocalStore;
use crate::sets::{self, Mask};
use crate::transcript::{Scheme, TranscriptRecord};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use std::collections::BTreeMap;

/// Segment bookkeeping for one cluster round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FsctRoundLayout {
    pub cluster: Mask,
    pub z: usize,
    pub nodes: Vec<usize>,
    /// Common denominator of n̄ and the decoding witnesses.
    pub scale: usize,
    /// Sub-symbols per segment.
    pub w: usize,
    /// Segments per IV, (|S|-1)·scale.
    pub segs_per_iv: usize,
    /// n̄_k·scale per node position.
    pub rows: Vec<usize>,
}

fn whole(x: &Rational, by: usize) -> usize {
    let v = x * Rational::from_integer(BigInt::from(by));
    assert!(v.is_integer(), "{v} is not a whole count");
    v.to_integer().to_usize().expect("count fits")
}

impl FsctRoundLayout {
    pub fn new(round: &ClusterRound, update: &ParameterUpdate, witnesses: &[Betas], w: usize) -> Self {
        assert!(w >= 1);
        let d = lcm_denominators(update.nbar.iter().chain(witnesses.iter().flat_map(|b| b.values())));
        let scale = d.to_usize().expect("denominator fits");
        FsctRoundLayout {
            cluster: round.cluster,
            z: round.z,
            nodes: round.nodes.clone(),
            scale,
            w,
            segs_per_iv: (round.size() - 1) * scale,
            rows: update.nbar.iter().map(|n| whole(n, scale)).collect(),
        }
    }

    pub fn iv_len(&self) -> usize {
        self.segs_per_iv * self.w
    }

    pub fn rows_of(&self, node: usize) -> usize {
        self.rows[self.nodes.iter().position(|&k| k == node).unwrap()]
    }

    /// Sent volume in IV units.
    pub fn units(&self) -> Rational {
        let rows: usize = self.rows.iter().sum();
        Rational::new(BigInt::from(rows), BigInt::from(self.segs_per_iv))
    }

    /// Segment ids (cell, γ) known to `node`, cells ascending then γ.
    pub fn known_segments(&self, round: &ClusterRound, node: usize) -> Vec<(usize, usize)> {
        self.segments_where(round, |m| sets::contains(m, node))
    }

    /// Segment ids `node` must recover.
    pub fn unknown_segments(&self, round: &ClusterRound, node: usize) -> Vec<(usize, usize)> {
        self.segments_where(round, |m| !sets::contains(m, node))
    }

    fn segments_where(&self, round: &ClusterRound, keep: impl Fn(Mask) -> bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (c, cell) in round.cells.iter().enumerate() {
            if keep(cell.mappers) {
                out.extend((0..cell.members.len() * self.segs_per_iv).map(|g| (c, g)));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FsctMessageBlock {
    pub sender: usize,
    pub cluster: Mask,
    pub z: usize,
    /// n̄_k·scale × |K_k| random coefficients over the sender's known segments.
    pub coefficients: FieldMatrix,
    /// n̄_k·scale × w coded sub-symbols.
    pub coded: FieldMatrix,
}

impl FsctMessageBlock {
    pub fn record(&self, layout: &FsctRoundLayout, bits: u32) -> TranscriptRecord {
        let mut r = TranscriptRecord::new(Scheme::Fsct, self.cluster, self.z, self.sender, layout.iv_len(), bits);
        r.n_symbols = self.coded.rows();
        r.symbol_len = layout.w;
        r.n_lcs = Some(self.coded.rows());
        r
    }
}

/// Segments of the listed ids from local knowledge, one matrix row each.
fn segment_rows(layout: &FsctRoundLayout, round: &ClusterRound, ids: &[(usize, usize)], store: &LocalStore) -> FieldMatrix {
    let mut cache: BTreeMap<IvKey, Vec<u32>> = BTreeMap::new();
    let mut m = FieldMatrix::zeros(ids.len(), layout.w);
    for (r, &(c, g)) in ids.iter().enumerate() {
        let key = round.cells[c].members[g / layout.segs_per_iv];
        let p = cache
            .entry(key)
            .or_insert_with(|| store.get(key, layout.iv_len()).expect("segment of a mapped IV"));
        let off = (g % layout.segs_per_iv) * layout.w;
        m.row_mut(r).copy_from_slice(&p[off..off + layout.w]);
    }
    m
}

pub fn fsct_encode<'a, R: Rng + ?Sized>(
    field: &GaloisField,
    round: &ClusterRound,
    layout: &FsctRoundLayout,
    store_of: impl Fn(usize) -> LocalStore<'a>,
    rng: &mut R,
) -> Vec<FsctMessageBlock> {
    let mut blocks = Vec::new();
    for &k in &round.nodes {
        let rows = layout.rows_of(k);
        if rows == 0 {
            continue;
        }
        let ids = layout.known_segments(round, k);
        let segs = segment_rows(layout, round, &ids, &store_of(k));
        let coefficients = FieldMatrix::random(field, rows, ids.len(), rng);
        let coded = coefficients.mul(field, &segs).expect("dimensions agree");
        blocks.push(FsctMessageBlock { sender: k, cluster: round.cluster, z: round.z, coefficients, coded });
    }
    blocks
}

#[derive(Debug)]
pub enum FsctDecodeFailure {
    /// Random draw left the system rank deficient; re-encode.
    RetryNeeded(SolveError),
    Fatal(DecodeError),
}

/// Joint decode at `store.node` from all blocks of the round.
pub fn fsct_decode(
    field: &GaloisField,
    round: &ClusterRound,
    layout: &FsctRoundLayout,
    blocks: &[FsctMessageBlock],
    store: &LocalStore,
) -> Result<BTreeMap<IvKey, Vec<u32>>, FsctDecodeFailure> {
    let me = store.node;
    let unknown = layout.unknown_segments(round, me);
    if unknown.is_empty() {
        return Ok(BTreeMap::new());
    }
    let col_of: BTreeMap<(usize, usize), usize> = unknown.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let incoming: Vec<&FsctMessageBlock> = blocks.iter().filter(|b| b.sender != me).collect();
    let total_rows: usize = incoming.iter().map(|b| b.coded.rows()).sum();
    let mut a = FieldMatrix::zeros(total_rows, unknown.len());
    let mut rhs = FieldMatrix::zeros(total_rows, layout.w);
    let mut r0 = 0;
    for b in incoming {
        let ids = layout.known_segments(round, b.sender);
        let (shared, fresh): (Vec<usize>, Vec<usize>) = (0..ids.len()).partition(|&i| sets::contains(round.cells[ids[i].0].mappers, me));
        let mut y = b.coded.clone();
        if !shared.is_empty() {
            let shared_ids: Vec<(usize, usize)> = shared.iter().map(|&i| ids[i]).collect();
            let known = segment_rows(layout, round, &shared_ids, store);
            let contrib = b.coefficients.select_columns(&shared).mul(field, &known).expect("dimensions agree");
            for r in 0..y.rows() {
                let row = contrib.row(r).to_vec();
                field.axpy(y.row_mut(r), 1, &row);
            }
        }
        for r in 0..b.coded.rows() {
            for &i in &fresh {
                a.row_mut(r0 + r)[col_of[&ids[i]]] = b.coefficients.row(r)[i];
            }
            rhs.row_mut(r0 + r).copy_from_slice(y.row(r));
        }
        r0 += b.coded.rows();
    }
    let x = a.solve_multi(field, &rhs).map_err(|e| match e {
        SolveError::Singular { .. } => FsctDecodeFailure::RetryNeeded(e),
        other => FsctDecodeFailure::Fatal(DecodeError::Solve { round: round.label(), receiver: me + 1, source: other }),
    })?;
    let mut out: BTreeMap<IvKey, Vec<u32>> = BTreeMap::new();
    for (i, &(c, g)) in unknown.iter().enumerate() {
        let key = round.cells[c].members[g / layout.segs_per_iv];
        out.entry(key).or_insert_with(|| Vec::with_capacity(layout.iv_len())).extend_from_slice(x.row(i));
    }
    Ok(out)
}
