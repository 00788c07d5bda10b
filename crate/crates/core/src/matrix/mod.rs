//! Specialized complex matrix formats for gate matrices.
//!
//! Every [`MatrixRepr`] belongs to one format class. Binary operations pick
//! the result class from a fixed promotion table (see [`ops`]) so that, for
//! example, multiplying two permutation matrices stays a permutation and adding
//! two identities yields a diagonal.

mod csc;
pub mod io;
mod ops;
mod perm;

use std::fmt;

use nalgebra::DMatrix;

pub use csc::CscMatrix;
pub use ops::{promote, BinaryOp};
pub use perm::PermMatrix;

use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerance used when deciding operator properties.
pub const PROPS_TOL: f64 = 1e-10;

/// Format class of a [`MatrixRepr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Format {
    Identity,
    Diagonal,
    Permutation,
    Sparse,
    Dense,
    OuterProduct,
}

impl Format {
    /// The five classes covered by the promotion table.
    pub const TABLE: [Format; 5] = [
        Format::Identity,
        Format::Diagonal,
        Format::Permutation,
        Format::Sparse,
        Format::Dense,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Format::Identity => "I",
            Format::Diagonal => "D",
            Format::Permutation => "P",
            Format::Sparse => "S",
            Format::Dense => "M",
            Format::OuterProduct => "O",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Format> {
        Some(match tag {
            "I" => Format::Identity,
            "D" => Format::Diagonal,
            "P" => Format::Permutation,
            "S" => Format::Sparse,
            "M" => Format::Dense,
            "O" => Format::OuterProduct,
            _ => return None,
        })
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Low-rank matrix `left * right` kept in factored form.
///
/// `left` is `dim × k` and `right` is `k × dim`; a rank-one outer product
/// `u v` has `k = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterProduct {
    left: DMatrix<C64>,
    right: DMatrix<C64>,
}

impl OuterProduct {
    pub fn new(left: DMatrix<C64>, right: DMatrix<C64>) -> Result<Self> {
        if left.ncols() != right.nrows() || left.nrows() != right.ncols() {
            return Err(Error::shape(format!(
                "outer product factors {}x{} and {}x{} do not form a square matrix",
                left.nrows(),
                left.ncols(),
                right.nrows(),
                right.ncols()
            )));
        }
        Ok(OuterProduct { left, right })
    }

    /// Rank-one `u vᵀ` (no conjugation applied to `v`).
    pub fn from_vectors(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::shape("outer product vectors differ in length"));
        }
        OuterProduct::new(
            DMatrix::from_column_slice(u.len(), 1, u),
            DMatrix::from_row_slice(1, v.len(), v),
        )
    }

    pub fn dim(&self) -> usize {
        self.left.nrows()
    }

    pub fn rank(&self) -> usize {
        self.left.ncols()
    }

    pub fn left(&self) -> &DMatrix<C64> {
        &self.left
    }

    pub fn right(&self) -> &DMatrix<C64> {
        &self.right
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        &self.left * &self.right
    }

    /// `y = left * (right * x)`
    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        let k = self.rank();
        let mut tmp = vec![ZERO; k];
        for (r, t) in tmp.iter_mut().enumerate() {
            *t = self
                .right
                .row(r)
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..k).map(|r| self.left[(i, r)] * tmp[r]).sum();
        }
    }
}

/// Hermiticity, unitarity and reflexivity flags. `None` means unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpProps {
    pub hermitian: Option<bool>,
    pub unitary: Option<bool>,
    pub reflexive: Option<bool>,
}

impl OpProps {
    pub fn known(hermitian: bool, unitary: bool, reflexive: bool) -> Self {
        OpProps {
            hermitian: Some(hermitian),
            unitary: Some(unitary),
            reflexive: Some(reflexive),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian == Some(true)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary == Some(true)
    }

    pub fn is_reflexive(&self) -> bool {
        self.reflexive == Some(true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixRepr {
    Identity(usize),
    Diagonal(Vec<C64>),
    Permutation(PermMatrix),
    Sparse(CscMatrix),
    Dense(DMatrix<C64>),
    OuterProduct(OuterProduct),
}

impl MatrixRepr {
    pub fn dense(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::shape(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
        }
        Ok(MatrixRepr::Dense(m))
    }

    /// Dense matrix from row-major entries.
    pub fn dense_from_rows(dim: usize, rows: &[C64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::shape(format!("{} entries for a {dim}x{dim} matrix", rows.len())));
        }
        Ok(MatrixRepr::Dense(DMatrix::from_row_slice(dim, dim, rows)))
    }

    pub fn format(&self) -> Format {
        match self {
            MatrixRepr::Identity(_) => Format::Identity,
            MatrixRepr::Diagonal(_) => Format::Diagonal,
            MatrixRepr::Permutation(_) => Format::Permutation,
            MatrixRepr::Sparse(_) => Format::Sparse,
            MatrixRepr::Dense(_) => Format::Dense,
            MatrixRepr::OuterProduct(_) => Format::OuterProduct,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MatrixRepr::Identity(n) => *n,
            MatrixRepr::Diagonal(d) => d.len(),
            MatrixRepr::Permutation(p) => p.dim(),
            MatrixRepr::Sparse(s) => s.dim(),
            MatrixRepr::Dense(m) => m.nrows(),
            MatrixRepr::OuterProduct(o) => o.dim(),
        }
    }

    /// Number of qubits, if the dimension is a power of two.
    pub fn nqubits(&self) -> Option<usize> {
        let d = self.dim();
        (d.is_power_of_two()).then(|| d.trailing_zeros() as usize)
    }

    /// Number of explicitly stored entries.
    pub fn nnz(&self) -> usize {
        match self {
            MatrixRepr::Identity(n) => *n,
            MatrixRepr::Diagonal(d) => d.len(),
            MatrixRepr::Permutation(p) => p.dim(),
            MatrixRepr::Sparse(s) => s.nnz(),
            MatrixRepr::Dense(m) => m.iter().filter(|v| **v != ZERO).count(),
            MatrixRepr::OuterProduct(o) => o.dim() * o.dim(),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        match self {
            MatrixRepr::Identity(_) => {
                if row == col {
                    ONE
                } else {
                    ZERO
                }
            }
            MatrixRepr::Diagonal(d) => {
                if row == col {
                    d[row]
                } else {
                    ZERO
                }
            }
            MatrixRepr::Permutation(p) => p.get(row, col),
            MatrixRepr::Sparse(s) => s.get(row, col),
            MatrixRepr::Dense(m) => m[(row, col)],
            MatrixRepr::OuterProduct(o) => (0..o.rank())
                .map(|k| o.left[(row, k)] * o.right[(k, col)])
                .sum(),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        match self {
            MatrixRepr::Identity(n) => vec![ONE; *n],
            MatrixRepr::Diagonal(d) => d.clone(),
            MatrixRepr::Sparse(s) => s.diagonal(),
            _ => (0..self.dim()).map(|i| self.get(i, i)).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match self {
            MatrixRepr::Dense(m) => m.clone(),
            MatrixRepr::Sparse(s) => s.to_dense(),
            MatrixRepr::OuterProduct(o) => o.to_dense(),
            _ => {
                let n = self.dim();
                let mut m = DMatrix::zeros(n, n);
                self.for_each_entry(|i, j, v| m[(i, j)] = v);
                m
            }
        }
    }

    pub fn to_csc(&self) -> CscMatrix {
        match self {
            MatrixRepr::Identity(n) => CscMatrix::identity(*n),
            MatrixRepr::Diagonal(d) => CscMatrix::from_triplets(
                d.len(),
                d.iter().enumerate().map(|(i, &v)| (i, i, v)),
            ),
            MatrixRepr::Permutation(p) => {
                // one entry per row; invert to get column order
                let n = p.dim();
                let mut rows = vec![0usize; n];
                let mut vals = vec![ZERO; n];
                for (i, (&c, &v)) in p.perm().iter().zip(p.vals()).enumerate() {
                    rows[c] = i;
                    vals[c] = v;
                }
                let mut colptr = Vec::with_capacity(n + 1);
                let mut rowval = Vec::with_capacity(n);
                let mut nzval = Vec::with_capacity(n);
                colptr.push(0);
                for c in 0..n {
                    if vals[c] != ZERO {
                        rowval.push(rows[c]);
                        nzval.push(vals[c]);
                    }
                    colptr.push(rowval.len());
                }
                CscMatrix::from_parts_unchecked(n, colptr, rowval, nzval)
            }
            MatrixRepr::Sparse(s) => s.clone(),
            MatrixRepr::Dense(m) => CscMatrix::from_dense(m),
            MatrixRepr::OuterProduct(o) => CscMatrix::from_dense(&o.to_dense()),
        }
    }

    /// Visits every stored entry. Dense-like formats visit all entries.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, C64)) {
        match self {
            MatrixRepr::Identity(n) => (0..*n).for_each(|i| f(i, i, ONE)),
            MatrixRepr::Diagonal(d) => d.iter().enumerate().for_each(|(i, &v)| f(i, i, v)),
            MatrixRepr::Permutation(p) => p
                .perm()
                .iter()
                .zip(p.vals())
                .enumerate()
                .for_each(|(i, (&c, &v))| f(i, c, v)),
            MatrixRepr::Sparse(s) => s.iter().for_each(|(i, j, v)| f(i, j, v)),
            MatrixRepr::Dense(m) => {
                for j in 0..m.ncols() {
                    for i in 0..m.nrows() {
                        f(i, j, m[(i, j)])
                    }
                }
            }
            MatrixRepr::OuterProduct(o) => {
                let m = o.to_dense();
                MatrixRepr::Dense(m).for_each_entry(f)
            }
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let fold = |it: &mut dyn Iterator<Item = &C64>| it.map(|v| v.norm()).fold(0.0, f64::max);
        match self {
            MatrixRepr::Identity(n) => {
                if *n > 0 {
                    1.0
                } else {
                    0.0
                }
            }
            MatrixRepr::Diagonal(d) => fold(&mut d.iter()),
            MatrixRepr::Permutation(p) => fold(&mut p.vals().iter()),
            MatrixRepr::Sparse(s) => fold(&mut s.nzval().iter()),
            MatrixRepr::Dense(m) => fold(&mut m.iter()),
            MatrixRepr::OuterProduct(o) => fold(&mut o.to_dense().iter()),
        }
    }

    pub fn scale(&self, c: C64) -> MatrixRepr {
        match self {
            MatrixRepr::Identity(n) => MatrixRepr::Diagonal(vec![c; *n]),
            MatrixRepr::Diagonal(d) => MatrixRepr::Diagonal(d.iter().map(|v| v * c).collect()),
            MatrixRepr::Permutation(p) => MatrixRepr::Permutation(p.scale(c)),
            MatrixRepr::Sparse(s) => MatrixRepr::Sparse(s.map_values(|v| v * c)),
            MatrixRepr::Dense(m) => MatrixRepr::Dense(m * c),
            MatrixRepr::OuterProduct(o) => MatrixRepr::OuterProduct(OuterProduct {
                left: &o.left * c,
                right: o.right.clone(),
            }),
        }
    }

    /// Conjugate transpose, preserving the format class.
    pub fn adjoint(&self) -> MatrixRepr {
        match self {
            MatrixRepr::Identity(n) => MatrixRepr::Identity(*n),
            MatrixRepr::Diagonal(d) => MatrixRepr::Diagonal(d.iter().map(|v| v.conj()).collect()),
            MatrixRepr::Permutation(p) => MatrixRepr::Permutation(p.adjoint()),
            MatrixRepr::Sparse(s) => MatrixRepr::Sparse(s.adjoint()),
            MatrixRepr::Dense(m) => MatrixRepr::Dense(m.adjoint()),
            MatrixRepr::OuterProduct(o) => MatrixRepr::OuterProduct(OuterProduct {
                left: o.right.adjoint(),
                right: o.left.adjoint(),
            }),
        }
    }

    pub fn mul(&self, rhs: &MatrixRepr) -> Result<MatrixRepr> {
        ops::mul(self, rhs)
    }

    pub fn kron(&self, rhs: &MatrixRepr) -> MatrixRepr {
        ops::kron(self, rhs)
    }

    pub fn add(&self, rhs: &MatrixRepr) -> Result<MatrixRepr> {
        ops::add(self, rhs)
    }

    pub fn sub(&self, rhs: &MatrixRepr) -> Result<MatrixRepr> {
        ops::add(self, &rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn hadamard(&self, rhs: &MatrixRepr) -> Result<MatrixRepr> {
        ops::hadamard(self, rhs)
    }

    /// `y = A x` for a single vector.
    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        match self {
            MatrixRepr::Identity(_) => y.copy_from_slice(x),
            MatrixRepr::Diagonal(d) => {
                for ((yi, xi), di) in y.iter_mut().zip(x).zip(d) {
                    *yi = di * xi;
                }
            }
            MatrixRepr::Permutation(p) => p.matvec(x, y),
            MatrixRepr::Sparse(s) => s.matvec(x, y),
            MatrixRepr::Dense(m) => {
                let n = m.nrows();
                y.fill(ZERO);
                for (j, &xj) in x.iter().enumerate() {
                    if xj == ZERO {
                        continue;
                    }
                    let col = m.column(j);
                    for i in 0..n {
                        y[i] += col[i] * xj;
                    }
                }
            }
            MatrixRepr::OuterProduct(o) => o.matvec(x, y),
        }
    }

    /// Replaces every `dim`-long column of `buffer` (column-major) by `A·column`.
    pub fn matvec_cols(&self, buffer: &mut [C64]) -> Result<()> {
        let n = self.dim();
        if n == 0 || !buffer.len().is_multiple_of(n) {
            return Err(Error::shape(format!(
                "buffer of {} entries is not a whole number of {n}-row columns",
                buffer.len()
            )));
        }
        match self {
            MatrixRepr::Identity(_) => {}
            MatrixRepr::Diagonal(d) => {
                for col in buffer.chunks_mut(n) {
                    for (v, di) in col.iter_mut().zip(d) {
                        *v *= di;
                    }
                }
            }
            _ => {
                let mut scratch = vec![ZERO; n];
                for col in buffer.chunks_mut(n) {
                    self.matvec(col, &mut scratch);
                    col.copy_from_slice(&scratch);
                }
            }
        }
        Ok(())
    }

    /// Operator properties at tolerance [`PROPS_TOL`].
    pub fn props(&self) -> OpProps {
        let n = self.dim();
        let id = MatrixRepr::Identity(n);
        let adj = self.adjoint();
        let within = |m: Result<MatrixRepr>| m.map(|m| m.max_abs() <= PROPS_TOL).unwrap_or(false);
        OpProps {
            hermitian: Some(within(self.sub(&adj))),
            unitary: Some(within(adj.mul(self).and_then(|p| p.sub(&id)))),
            reflexive: Some(within(self.mul(self).and_then(|p| p.sub(&id)))),
        }
    }

    /// Max entrywise distance to another matrix, via dense forms.
    pub fn max_abs_diff(&self, other: &MatrixRepr) -> f64 {
        (self.to_dense() - other.to_dense())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests;
