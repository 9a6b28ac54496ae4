//! Non-zero path through the receiver's decoding matrix: one distinct generated row per unknown column.

use super::coding::FsctRoundLayout;
use super::conditions::{cells_missing, Betas};
use crate::analysis::ClusterRound;
use crate::sets;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("witness is not a whole number of rows for node {sender} and cell {cell}")]
    Fractional { sender: usize, cell: usize },
    #[error("witness for node {sender} overruns its {rows} rows")]
    Overrun { sender: usize, rows: usize },
    #[error("column {column} of cell {cell} has no covering sender")]
    Uncovered { cell: usize, column: usize },
}

/// Row and column labels of the receiver's matrix after removing known segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingStructure {
    pub receiver: usize,
    /// Sender of each row.
    pub row_sender: Vec<usize>,
    /// Cell of each unknown column.
    pub col_cell: Vec<usize>,
}

pub fn decoding_structure(round: &ClusterRound, layout: &FsctRoundLayout, receiver: usize) -> DecodingStructure {
    let row_sender = round
        .nodes
        .iter()
        .filter(|&&k| k != receiver)
        .flat_map(|&k| std::iter::repeat_n(k, layout.rows_of(k)))
        .collect();
    let col_cell = layout.unknown_segments(round, receiver).into_iter().map(|(c, _)| c).collect();
    DecodingStructure { receiver, row_sender, col_cell }
}

impl DecodingStructure {
    /// Entry (row, col) carries a random coefficient iff the row's sender maps the column's cell.
    pub fn generated(&self, round: &ClusterRound, row: usize, col: usize) -> bool {
        sets::contains(round.cells[self.col_cell[col]].mappers, self.row_sender[row])
    }
}

/// Builds a row per unknown column: column bins are the cells missing at the receiver,
/// row bins are the senders, each split into sub-bins of β·scale rows per cell.
pub fn certify_nonzero_path(
    receiver: usize,
    round: &ClusterRound,
    layout: &FsctRoundLayout,
    betas: &Betas,
) -> Result<Vec<usize>, CertificateError> {
    let scale = BigInt::from(layout.scale);
    let width = |j: usize, c: usize| -> Result<usize, CertificateError> {
        let b = betas.get(&(j, round.cells[c].mappers)).cloned().unwrap_or_default();
        let v = b * num_rational::BigRational::from_integer(scale.clone());
        if !v.is_integer() {
            return Err(CertificateError::Fractional { sender: j + 1, cell: c });
        }
        Ok(v.to_integer().to_usize().unwrap())
    };
    let missing = cells_missing(round, receiver);
    // first row of each sender, then first row of each (sender, cell) sub-bin
    let mut row_start = std::collections::BTreeMap::new();
    let mut next = 0;
    for &k in round.nodes.iter().filter(|&&k| k != receiver) {
        row_start.insert(k, next);
        next += layout.rows_of(k);
    }
    let mut sub_start = std::collections::BTreeMap::new();
    for &k in round.nodes.iter().filter(|&&k| k != receiver) {
        let mut off = 0;
        for &c in missing.iter().filter(|&&c| sets::contains(round.cells[c].mappers, k)) {
            sub_start.insert((k, c), row_start[&k] + off);
            off += width(k, c)?;
        }
        if off > layout.rows_of(k) {
            return Err(CertificateError::Overrun { sender: k + 1, rows: layout.rows_of(k) });
        }
    }
    let mut path = Vec::new();
    for &c in &missing {
        let cols = round.cells[c].members.len() * layout.segs_per_iv;
        let senders = sets::members(round.cells[c].mappers);
        for col in 0..cols {
            let mut prefix = 0;
            let mut row = None;
            for &k in &senders {
                let wdt = width(k, c)?;
                if prefix <= col && col < prefix + wdt {
                    row = Some(sub_start[&(k, c)] + (col - prefix));
                    break;
                }
                prefix += wdt;
            }
            path.push(row.ok_or(CertificateError::Uncovered { cell: c, column: col })?);
        }
    }
    Ok(path)
}

/// Distinct rows, each landing on a generated entry.
pub fn path_is_valid(round: &ClusterRound, structure: &DecodingStructure, path: &[usize]) -> bool {
    if path.len() != structure.col_cell.len() {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    path.iter().enumerate().all(|(col, &row)| {
        row < structure.row_sender.len() && seen.insert(row) && structure.generated(round, row, col)
    })
}
