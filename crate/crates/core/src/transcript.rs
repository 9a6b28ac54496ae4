//! Per-block shuffle records and the load they imply.

use crate::algebra::rational::{from_u64, Rational};
use crate::sets::{self, Mask};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Osct,
    Fsct,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub scheme: Scheme,
    /// 1-based node list.
    pub cluster: Vec<usize>,
    pub round: usize,
    /// 1-based.
    pub sender: usize,
    /// Coded symbols in the block.
    pub n_symbols: usize,
    /// Sub-symbols per coded symbol.
    pub symbol_len: usize,
    /// Unicast residue sub-symbols carried alongside (OSCT only).
    pub residue_len: usize,
    /// Sub-symbols per IV in this round.
    pub iv_len: usize,
    pub sub_symbol_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_lcs: Option<usize>,
}

impl TranscriptRecord {
    pub fn new(scheme: Scheme, cluster: Mask, round: usize, sender: usize, iv_len: usize, bits: u32) -> Self {
        TranscriptRecord {
            scheme,
            cluster: sets::one_based(cluster),
            round,
            sender: sender + 1,
            n_symbols: 0,
            symbol_len: 0,
            residue_len: 0,
            iv_len,
            sub_symbol_bits: bits,
            n_lcs: None,
        }
    }

    pub fn sub_symbols(&self) -> u64 {
        (self.n_symbols * self.symbol_len + self.residue_len) as u64
    }

    /// Transmitted volume in IV units.
    pub fn iv_units(&self) -> Rational {
        Rational::new(self.sub_symbols().into(), (self.iv_len as u64).into())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub records: Vec<TranscriptRecord>,
}

impl Transcript {
    pub fn extend(&mut self, other: Transcript) {
        self.records.extend(other.records);
    }

    pub fn units(&self, scheme: Scheme) -> Rational {
        self.records
            .iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| r.iv_units())
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn load(&self, scheme: Scheme, q: usize, n: usize) -> Rational {
        self.units(scheme) / from_u64((q * n) as u64)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_and_json() {
        let mut r = TranscriptRecord::new(Scheme::Fsct, 0b111, 2, 0, 6, 16);
        r.n_symbols = 2;
        r.symbol_len = 3;
        r.n_lcs = Some(2);
        assert_eq!(r.iv_units(), from_u64(1));
        let t = Transcript { records: vec![r] };
        let mut buf = Vec::new();
        t.write_jsonl(&mut buf).unwrap();
        let line = String::from_utf8(buf).unwrap();
        assert!(line.contains("\"scheme\":\"fsct\""));
        assert!(line.contains("\"cluster\":[1,2,3]"));
        assert!(line.contains("\"n_lcs\":2"));
        assert_eq!(t.load(Scheme::Fsct, 1, 2), Rational::new(1.into(), 2.into()));
    }
}
