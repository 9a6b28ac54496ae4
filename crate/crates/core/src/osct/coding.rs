use super::solver::AlphaSolution;
use crate::algebra::rational::{lcm_denominators, Rational};
use crate::algebra::{FieldElement, FieldMatrix, GaloisField};
use crate::analysis::ClusterRound;
use crate::error::DecodeError;
use crate::instance::IvKey;
use crate::payload::LocalStore;
use crate::sets::{self, binomial, Mask};
use crate::transcript::{Scheme, TranscriptRecord};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use std::collections::BTreeMap;

/// Sub-symbol bookkeeping for one cluster round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OsctRoundLayout {
    pub cluster: Mask,
    pub z: usize,
    pub nodes: Vec<usize>,
    /// Sub-symbols per IV.
    pub iv_len: usize,
    /// α_k·iv_len per node position.
    pub seg_len: Vec<usize>,
    /// τ⁺·iv_len per cell.
    pub residue_len: Vec<usize>,
    /// |V|·iv_len per cell.
    pub cell_len: Vec<usize>,
}

fn scaled(x: &Rational, by: usize) -> usize {
    let v = x * Rational::from_integer(BigInt::from(by));
    assert!(v.is_integer() && !v.is_negative(), "segment size {v} is not a whole count");
    v.to_integer().to_usize().expect("segment size fits")
}

impl OsctRoundLayout {
    /// `w` sub-symbols per 1/D of an IV, D the LCM of the α and τ denominators.
    pub fn new(round: &ClusterRound, sol: &AlphaSolution, w: usize) -> Self {
        assert!(w >= 1);
        let d = lcm_denominators(sol.alpha.iter().chain(&sol.tau));
        let iv_len = d.to_usize().expect("denominator fits") * w;
        let zero = Rational::from_integer(0.into());
        OsctRoundLayout {
            cluster: round.cluster,
            z: round.z,
            nodes: round.nodes.clone(),
            iv_len,
            seg_len: sol.alpha.iter().map(|a| scaled(a, iv_len)).collect(),
            residue_len: sol.tau.iter().map(|t| scaled(if t.is_positive() { t } else { &zero }, iv_len)).collect(),
            cell_len: round.cells.iter().map(|c| c.members.len() * iv_len).collect(),
        }
    }

    fn seg_of(&self, node: usize) -> usize {
        self.seg_len[self.nodes.iter().position(|&k| k == node).expect("node in cluster")]
    }

    /// Cells containing `node`, in cell order.
    pub fn owned_cells(&self, round: &ClusterRound, node: usize) -> Vec<usize> {
        (0..round.cells.len()).filter(|&i| sets::contains(round.cells[i].mappers, node)).collect()
    }

    pub fn coded_rows(&self) -> usize {
        binomial(self.nodes.len() - 2, self.z - 1) as usize
    }

    /// Zero-padded concatenation of a cell: one segment per mapper in ascending order, then the residue.
    fn buffer_len(&self, round: &ClusterRound, cell: usize) -> usize {
        let segs: usize = sets::members(round.cells[cell].mappers).iter().map(|&k| self.seg_of(k)).sum();
        let len = segs + self.residue_len[cell];
        assert!(len >= self.cell_len[cell], "segments do not cover the cell");
        len
    }

    /// Offset of `node`'s segment inside the cell buffer.
    fn seg_offset(&self, round: &ClusterRound, cell: usize, node: usize) -> usize {
        sets::members(round.cells[cell].mappers).iter().take_while(|&&k| k != node).map(|&k| self.seg_of(k)).sum()
    }

    /// Sub-symbols sent in the round, in IV units.
    pub fn units(&self) -> Rational {
        let coded: usize = self.seg_len.iter().map(|s| s * self.coded_rows()).sum();
        let residue: usize = self.residue_len.iter().sum();
        Rational::new(((coded + residue) as u64).into(), (self.iv_len as u64).into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OsctMessageBlock {
    pub sender: usize,
    pub cluster: Mask,
    pub z: usize,
    /// Cells the sender's segments come from, one Vandermonde column each.
    pub cells: Vec<usize>,
    /// C(|S|-2, z-1) rows of α_k·iv_len sub-symbols; empty when α_k = 0.
    pub coded: FieldMatrix,
    /// Unicast residues as (cell, sub-symbols).
    pub residues: Vec<(usize, Vec<u32>)>,
}

impl OsctMessageBlock {
    pub fn record(&self, layout: &OsctRoundLayout, bits: u32) -> TranscriptRecord {
        let mut r = TranscriptRecord::new(Scheme::Osct, self.cluster, self.z, self.sender, layout.iv_len, bits);
        if self.coded.cols() > 0 {
            r.n_symbols = self.coded.rows();
            r.symbol_len = self.coded.cols();
        }
        r.residue_len = self.residues.iter().map(|(_, v)| v.len()).sum();
        r
    }
}

fn points(field: &GaloisField, n: usize) -> Vec<FieldElement> {
    assert!((n as u64) < field.size() as u64, "field too small for {n} distinct points");
    (0..n as u64).map(|i| field.exp_of(i)).collect()
}

/// Cell buffer from local knowledge; `None` if the store lacks a member.
fn cell_buffer(layout: &OsctRoundLayout, round: &ClusterRound, cell: usize, store: &LocalStore) -> Option<Vec<u32>> {
    let mut buf = Vec::with_capacity(layout.buffer_len(round, cell));
    for &key in &round.cells[cell].members {
        buf.extend(store.get(key, layout.iv_len)?);
    }
    buf.resize(layout.buffer_len(round, cell), 0);
    Some(buf)
}

fn segment<'a>(layout: &OsctRoundLayout, round: &ClusterRound, cell: usize, node: usize, buf: &'a [u32]) -> &'a [u32] {
    let off = layout.seg_offset(round, cell, node);
    &buf[off..off + layout.seg_of(node)]
}

/// Blocks of every node in the round, each built only from that node's local store.
pub fn osct_encode<'a>(
    field: &GaloisField,
    round: &ClusterRound,
    layout: &OsctRoundLayout,
    store_of: impl Fn(usize) -> LocalStore<'a>,
) -> Vec<OsctMessageBlock> {
    if round.skippable() {
        return Vec::new();
    }
    let rows = layout.coded_rows();
    let mut blocks = Vec::new();
    for &k in &round.nodes {
        let store = store_of(k);
        let cells = layout.owned_cells(round, k);
        let seg = layout.seg_of(k);
        let mut coded = FieldMatrix::zeros(rows, 0);
        let mut buffers = BTreeMap::new();
        for &c in &cells {
            buffers.insert(c, cell_buffer(layout, round, c, &store).expect("sender maps its own cells"));
        }
        if seg > 0 {
            let mut segs = FieldMatrix::zeros(cells.len(), seg);
            for (i, &c) in cells.iter().enumerate() {
                segs.row_mut(i).copy_from_slice(segment(layout, round, c, k, &buffers[&c]));
            }
            let v = FieldMatrix::vandermonde(field, &points(field, cells.len()), rows).expect("distinct points");
            coded = v.mul(field, &segs).expect("dimensions agree");
        }
        let residues: Vec<(usize, Vec<u32>)> = cells
            .iter()
            .filter(|&&c| layout.residue_len[c] > 0 && sets::members(round.cells[c].mappers)[0] == k)
            .map(|&c| {
                let buf = &buffers[&c];
                (c, buf[buf.len() - layout.residue_len[c]..].to_vec())
            })
            .collect();
        if seg > 0 || !residues.is_empty() {
            blocks.push(OsctMessageBlock { sender: k, cluster: round.cluster, z: round.z, cells, coded, residues });
        }
    }
    blocks
}

/// Recovers every IV of the round that `store.node` requests. Each block is decoded on its own.
pub fn osct_decode(
    field: &GaloisField,
    round: &ClusterRound,
    layout: &OsctRoundLayout,
    blocks: &[OsctMessageBlock],
    store: &LocalStore,
) -> Result<BTreeMap<IvKey, Vec<u32>>, DecodeError> {
    let me = store.node;
    let mut segs: BTreeMap<(usize, usize), Vec<u32>> = BTreeMap::new();
    let mut residues: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    let fail = |source| DecodeError::Solve { round: round.label(), receiver: me + 1, source };
    for b in blocks.iter().filter(|b| b.sender != me) {
        for (c, r) in &b.residues {
            if !sets::contains(round.cells[*c].mappers, me) {
                residues.insert(*c, r.clone());
            }
        }
        if b.coded.cols() == 0 {
            continue;
        }
        let (known, unknown): (Vec<usize>, Vec<usize>) =
            (0..b.cells.len()).partition(|&i| sets::contains(round.cells[b.cells[i]].mappers, me));
        let v = FieldMatrix::vandermonde(field, &points(field, b.cells.len()), b.coded.rows()).map_err(fail)?;
        let mut rhs = b.coded.clone();
        if !known.is_empty() {
            let mut ks = FieldMatrix::zeros(known.len(), b.coded.cols());
            for (i, &col) in known.iter().enumerate() {
                let c = b.cells[col];
                let buf = cell_buffer(layout, round, c, store).expect("receiver maps the cell");
                ks.row_mut(i).copy_from_slice(segment(layout, round, c, b.sender, &buf));
            }
            let contrib = v.select_columns(&known).mul(field, &ks).map_err(fail)?;
            for r in 0..rhs.rows() {
                let row = contrib.row(r).to_vec();
                field.axpy(rhs.row_mut(r), 1, &row);
            }
        }
        let x = v.select_columns(&unknown).solve_multi(field, &rhs).map_err(fail)?;
        for (i, &col) in unknown.iter().enumerate() {
            segs.insert((b.cells[col], b.sender), x.row(i).to_vec());
        }
    }
    let mut out = BTreeMap::new();
    for (c, cell) in round.cells.iter().enumerate() {
        if sets::contains(cell.mappers, me) || cell.members.is_empty() {
            continue;
        }
        let mut buf = Vec::with_capacity(layout.buffer_len(round, c));
        for k in sets::members(cell.mappers) {
            if layout.seg_of(k) > 0 {
                buf.extend_from_slice(&segs[&(c, k)]);
            }
        }
        if layout.residue_len[c] > 0 {
            buf.extend_from_slice(&residues[&c]);
        }
        buf.truncate(layout.cell_len[c]);
        for (i, &key) in cell.members.iter().enumerate() {
            out.insert(key, buf[i * layout.iv_len..(i + 1) * layout.iv_len].to_vec());
        }
    }
    Ok(out)
}
