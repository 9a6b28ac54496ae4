use super::gf::{FieldElement, GaloisField};
use rand::Rng;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is rank deficient ({rank} < {cols})")]
    Singular { rank: usize, cols: usize },
    #[error("system is inconsistent")]
    Inconsistent,
    #[error("vandermonde points must be distinct")]
    DuplicatePoints,
}

/// Dense row-major matrix over GF(2^m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FieldElement>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|e| e.0));
        }
        FieldMatrix { rows: r, cols: c, data }
    }

    pub fn random<R: Rng + ?Sized>(field: &GaloisField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng).0).collect();
        FieldMatrix { rows, cols, data }
    }

    /// Entry (i, j) is `points[j]^i`.
    pub fn vandermonde(
        field: &GaloisField,
        points: &[FieldElement],
        rows: usize,
    ) -> Result<Self, SolveError> {
        let mut seen = std::collections::HashSet::new();
        if !points.iter().all(|p| seen.insert(p.0)) {
            return Err(SolveError::DuplicatePoints);
        }
        let cols = points.len();
        let mut m = Self::zeros(rows, cols);
        for (j, &p) in points.iter().enumerate() {
            let mut x = FieldElement::ONE;
            for i in 0..rows {
                m.data[i * cols + j] = x.0;
                x = field.mul(x, p);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        FieldElement(self.data[r * self.cols + c])
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v.0;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.data[r * cols.len() + j] = self.data[r * self.cols + c];
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        FieldMatrix { rows: rows.len(), cols: self.cols, data }
    }

    pub fn mul(&self, field: &GaloisField, other: &FieldMatrix) -> Result<FieldMatrix, SolveError> {
        if self.cols != other.rows {
            return Err(SolveError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != 0 {
                    let (lo, hi) = (k * other.cols, (k + 1) * other.cols);
                    field.axpy(out.row_mut(i), a, &other.data[lo..hi]);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, field: &GaloisField, x: &[FieldElement]) -> Result<Vec<FieldElement>, SolveError> {
        if x.len() != self.cols {
            return Err(SolveError::DimensionMismatch(format!(
                "{}x{} * vector of {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = 0u32;
                for (c, xe) in x.iter().enumerate() {
                    acc ^= field.mul_raw(self.data[r * self.cols + c], xe.0);
                }
                FieldElement(acc)
            })
            .collect())
    }

    /// Row rank by Gaussian elimination.
    pub fn rank(&self, field: &GaloisField) -> usize {
        let mut m = self.clone();
        let mut empty = FieldMatrix::zeros(self.rows, 0);
        eliminate(field, &mut m, &mut empty)
    }

    pub fn solve(&self, field: &GaloisField, b: &[FieldElement]) -> Result<Vec<FieldElement>, SolveError> {
        if b.len() != self.rows {
            return Err(SolveError::DimensionMismatch(format!(
                "{} rows vs rhs of {}",
                self.rows,
                b.len()
            )));
        }
        let rhs = FieldMatrix { rows: self.rows, cols: 1, data: b.iter().map(|e| e.0).collect() };
        let x = self.solve_multi(field, &rhs)?;
        Ok(x.data.into_iter().map(FieldElement).collect())
    }

    /// Solves `self * X = B` for a square or overdetermined consistent system.
    /// The returned solution is checked against the original system.
    pub fn solve_multi(&self, field: &GaloisField, b: &FieldMatrix) -> Result<FieldMatrix, SolveError> {
        if b.rows != self.rows {
            return Err(SolveError::DimensionMismatch(format!(
                "{} rows vs rhs with {} rows",
                self.rows, b.rows
            )));
        }
        if self.rows < self.cols {
            return Err(SolveError::Singular { rank: self.rows, cols: self.cols });
        }
        let mut a = self.clone();
        let mut rhs = b.clone();
        let rank = eliminate(field, &mut a, &mut rhs);
        if rank < self.cols {
            return Err(SolveError::Singular { rank, cols: self.cols });
        }
        if (rank..self.rows).any(|r| rhs.row(r).iter().any(|&v| v != 0)) {
            return Err(SolveError::Inconsistent);
        }
        let x = FieldMatrix { rows: self.cols, cols: b.cols, data: rhs.data[..self.cols * b.cols].to_vec() };
        if self.mul(field, &x)? != *b {
            return Err(SolveError::Inconsistent);
        }
        Ok(x)
    }
}

/// Reduced row echelon form of `a`, applying the same row operations to `rhs`.
/// Pivot rows end up at the top in column order; returns the rank.
fn eliminate(field: &GaloisField, a: &mut FieldMatrix, rhs: &mut FieldMatrix) -> usize {
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a.data[r * cols + col] != 0) else {
            continue;
        };
        if p != rank {
            swap_rows(a, p, rank);
            swap_rows(rhs, p, rank);
        }
        let inv = field.inv(FieldElement(a.data[rank * cols + col])).unwrap().0;
        field.scale(a.row_mut(rank), inv);
        field.scale(rhs.row_mut(rank), inv);
        let prow = a.row(rank).to_vec();
        let prhs = rhs.row(rank).to_vec();
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let f = a.data[r * cols + col];
            if f != 0 {
                field.axpy(a.row_mut(r), f, &prow);
                field.axpy(rhs.row_mut(r), f, &prhs);
            }
        }
        rank += 1;
    }
    rank
}

fn swap_rows(m: &mut FieldMatrix, a: usize, b: usize) {
    if a == b || m.cols == 0 {
        return;
    }
    let c = m.cols;
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let (head, tail) = m.data.split_at_mut(hi * c);
    head[lo * c..(lo + 1) * c].swap_with_slice(&mut tail[..c]);
}
