use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Square compressed-sparse-column matrix. Row indices are strictly
/// increasing within each column.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    dim: usize,
    colptr: Vec<usize>,
    rowval: Vec<usize>,
    nzval: Vec<C64>,
}

impl CscMatrix {
    pub fn new(dim: usize, colptr: Vec<usize>, rowval: Vec<usize>, nzval: Vec<C64>) -> Result<Self> {
        if colptr.len() != dim + 1 || colptr[0] != 0 {
            return Err(Error::shape("column pointer array must have dim+1 entries starting at 0"));
        }
        if rowval.len() != nzval.len() || *colptr.last().unwrap() != rowval.len() {
            return Err(Error::shape("row index and value arrays disagree with column pointers"));
        }
        for j in 0..dim {
            if colptr[j] > colptr[j + 1] {
                return Err(Error::validation("column pointers are not monotone"));
            }
            let rows = &rowval[colptr[j]..colptr[j + 1]];
            if rows.iter().any(|&r| r >= dim) {
                return Err(Error::validation("row index out of range"));
            }
            if rows.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::validation("row indices must increase within a column"));
            }
        }
        Ok(CscMatrix { dim, colptr, rowval, nzval })
    }

    pub(crate) fn from_parts_unchecked(
        dim: usize,
        colptr: Vec<usize>,
        rowval: Vec<usize>,
        nzval: Vec<C64>,
    ) -> Self {
        CscMatrix { dim, colptr, rowval, nzval }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut entries: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (c, r));
        let mut colptr = vec![0usize; dim + 1];
        let mut rowval = Vec::with_capacity(entries.len());
        let mut nzval: Vec<C64> = Vec::with_capacity(entries.len());
        let mut cols = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if let (Some(&lr), Some(&lc)) = (rowval.last(), cols.last()) {
                if lr == r && lc == c {
                    *nzval.last_mut().unwrap() += v;
                    continue;
                }
            }
            rowval.push(r);
            cols.push(c);
            nzval.push(v);
        }
        let mut keep_rows = Vec::with_capacity(rowval.len());
        let mut keep_vals = Vec::with_capacity(rowval.len());
        for ((r, c), v) in rowval.into_iter().zip(cols).zip(nzval) {
            if v != ZERO {
                colptr[c + 1] += 1;
                keep_rows.push(r);
                keep_vals.push(v);
            }
        }
        for j in 0..dim {
            colptr[j + 1] += colptr[j];
        }
        CscMatrix { dim, colptr, rowval: keep_rows, nzval: keep_vals }
    }

    pub fn identity(dim: usize) -> Self {
        CscMatrix {
            dim,
            colptr: (0..=dim).collect(),
            rowval: (0..dim).collect(),
            nzval: vec![C64::new(1.0, 0.0); dim],
        }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows();
        let mut colptr = Vec::with_capacity(dim + 1);
        let mut rowval = Vec::new();
        let mut nzval = Vec::new();
        colptr.push(0);
        for j in 0..dim {
            for i in 0..dim {
                let v = m[(i, j)];
                if v != ZERO {
                    rowval.push(i);
                    nzval.push(v);
                }
            }
            colptr.push(rowval.len());
        }
        CscMatrix { dim, colptr, rowval, nzval }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.nzval.len()
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowval(&self) -> &[usize] {
        &self.rowval
    }

    pub fn nzval(&self) -> &[C64] {
        &self.nzval
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.colptr[j]..self.colptr[j + 1];
        self.rowval[range.clone()]
            .iter()
            .copied()
            .zip(self.nzval[range].iter().copied())
    }

    /// All stored entries as (row, col, value), column-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |j| self.column(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.colptr[col]..self.colptr[col + 1];
        match self.rowval[range.clone()].binary_search(&row) {
            Ok(k) => self.nzval[range.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn map_values(&self, f: impl Fn(C64) -> C64) -> CscMatrix {
        CscMatrix {
            dim: self.dim,
            colptr: self.colptr.clone(),
            rowval: self.rowval.clone(),
            nzval: self.nzval.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Scales row `i` by `d[i]`.
    pub fn scale_rows(&self, d: &[C64]) -> CscMatrix {
        let nzval = self
            .rowval
            .iter()
            .zip(&self.nzval)
            .map(|(&r, &v)| d[r] * v)
            .collect();
        CscMatrix { nzval, ..self.clone() }
    }

    /// Scales column `j` by `d[j]`.
    pub fn scale_cols(&self, d: &[C64]) -> CscMatrix {
        let mut out = self.clone();
        for j in 0..self.dim {
            for v in &mut out.nzval[self.colptr[j]..self.colptr[j + 1]] {
                *v *= d[j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> CscMatrix {
        let n = self.dim;
        let mut counts = vec![0usize; n + 1];
        for &r in &self.rowval {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let colptr = counts.clone();
        let mut next = counts;
        let mut rowval = vec![0; self.nnz()];
        let mut nzval = vec![ZERO; self.nnz()];
        for j in 0..n {
            for k in self.colptr[j]..self.colptr[j + 1] {
                let r = self.rowval[k];
                let dst = next[r];
                next[r] += 1;
                rowval[dst] = j;
                nzval[dst] = self.nzval[k].conj();
            }
        }
        CscMatrix { dim: n, colptr, rowval, nzval }
    }

    /// Sum with another matrix of the same dimension; exact zeros are dropped.
    pub fn add(&self, other: &CscMatrix) -> CscMatrix {
        let n = self.dim;
        let mut colptr = Vec::with_capacity(n + 1);
        let mut rowval = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut nzval = Vec::with_capacity(self.nnz().max(other.nnz()));
        colptr.push(0);
        for j in 0..n {
            let (mut a, ae) = (self.colptr[j], self.colptr[j + 1]);
            let (mut b, be) = (other.colptr[j], other.colptr[j + 1]);
            let mut push = |r: usize, v: C64| {
                if v != ZERO {
                    rowval.push(r);
                    nzval.push(v);
                }
            };
            while a < ae || b < be {
                let ra = if a < ae { self.rowval[a] } else { usize::MAX };
                let rb = if b < be { other.rowval[b] } else { usize::MAX };
                if ra == rb {
                    push(ra, self.nzval[a] + other.nzval[b]);
                    a += 1;
                    b += 1;
                } else if ra < rb {
                    push(ra, self.nzval[a]);
                    a += 1;
                } else {
                    push(rb, other.nzval[b]);
                    b += 1;
                }
            }
            colptr.push(rowval.len());
        }
        CscMatrix { dim: n, colptr, rowval, nzval }
    }

    /// Product `self * other` with a dense accumulator per column.
    pub fn mul(&self, other: &CscMatrix) -> CscMatrix {
        let n = self.dim;
        let mut acc = vec![ZERO; n];
        let mut marker = vec![usize::MAX; n];
        let mut touched = Vec::new();
        let mut colptr = Vec::with_capacity(n + 1);
        let mut rowval = Vec::new();
        let mut nzval = Vec::new();
        colptr.push(0);
        for j in 0..n {
            touched.clear();
            for (k, bkj) in other.column(j) {
                for (i, aik) in self.column(k) {
                    if marker[i] != j {
                        marker[i] = j;
                        acc[i] = ZERO;
                        touched.push(i);
                    }
                    acc[i] += aik * bkj;
                }
            }
            touched.sort_unstable();
            for &i in &touched {
                if acc[i] != ZERO {
                    rowval.push(i);
                    nzval.push(acc[i]);
                }
            }
            colptr.push(rowval.len());
        }
        CscMatrix { dim: n, colptr, rowval, nzval }
    }

    /// Kronecker product, `self` indexing the slower-varying axis.
    pub fn kron(&self, other: &CscMatrix) -> CscMatrix {
        let db = other.dim;
        let n = self.dim * db;
        let mut colptr = Vec::with_capacity(n + 1);
        let mut rowval = Vec::with_capacity(self.nnz() * other.nnz());
        let mut nzval = Vec::with_capacity(self.nnz() * other.nnz());
        colptr.push(0);
        for ja in 0..self.dim {
            for jb in 0..db {
                for (ia, va) in self.column(ja) {
                    for (ib, vb) in other.column(jb) {
                        let v = va * vb;
                        if v != ZERO {
                            rowval.push(ia * db + ib);
                            nzval.push(v);
                        }
                    }
                }
                colptr.push(rowval.len());
            }
        }
        CscMatrix { dim: n, colptr, rowval, nzval }
    }

    /// Elementwise product; the result keeps only common stored entries.
    pub fn hadamard(&self, other: &CscMatrix) -> CscMatrix {
        self.filter_map(|i, j, v| v * other.get(i, j))
    }

    /// Rebuilds the matrix with values `f(row, col, value)`, dropping zeros.
    pub(crate) fn filter_map(&self, f: impl Fn(usize, usize, C64) -> C64) -> CscMatrix {
        let mut colptr = Vec::with_capacity(self.dim + 1);
        let mut rowval = Vec::with_capacity(self.nnz());
        let mut nzval = Vec::with_capacity(self.nnz());
        colptr.push(0);
        for j in 0..self.dim {
            for (i, v) in self.column(j) {
                let w = f(i, j, v);
                if w != ZERO {
                    rowval.push(i);
                    nzval.push(w);
                }
            }
            colptr.push(rowval.len());
        }
        CscMatrix { dim: self.dim, colptr, rowval, nzval }
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        y.fill(ZERO);
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for k in self.colptr[j]..self.colptr[j + 1] {
                y[self.rowval[k]] += self.nzval[k] * xj;
            }
        }
    }
}
