//! Binary operations with format promotion.
//!
//! The result class of `A op B` for the five table classes (I, D, P, S, M):
//!
//! ```text
//!        I        D        P        S        M
//!   I  I/I/D/I  D/D/D/D  P/P/S/D  S/S/S/D  M/S/M/D
//!   D  D/D/D/D  D/D/D/D  P/P/S/D  S/S/S/D  M/S/M/D
//!   P  P/P/S/D  P/P/S/D  P/P/S/P  S/S/S/P  M/S/M/P
//!   S  S/S/S/D  S/S/S/D  S/S/S/P  S/S/S/S  M/S/M/S
//!   M  M/S/M/D  M/S/M/D  M/S/M/P  M/S/M/S  M/S/M/M
//! ```
//!
//! Slots are `*` / `kron` / `+` / `.*`. The table is kept as written,
//! including `M ⊗ M → S`. Low-rank outer products behave like `M`.

use nalgebra::DMatrix;

use super::{CscMatrix, Format, MatrixRepr, PermMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Mul,
    Kron,
    Add,
    Hadamard,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 4] = [BinaryOp::Mul, BinaryOp::Kron, BinaryOp::Add, BinaryOp::Hadamard];
}

fn table_class(f: Format) -> Format {
    if f == Format::OuterProduct {
        Format::Dense
    } else {
        f
    }
}

/// Result format of `op` applied to operands of classes `a` and `b`.
pub fn promote(op: BinaryOp, a: Format, b: Format) -> Format {
    use Format::*;
    let (a, b) = (table_class(a), table_class(b));
    let has = |f: Format| a == f || b == f;
    match op {
        BinaryOp::Mul => {
            if a == Identity {
                b
            } else if b == Identity {
                a
            } else if has(Dense) {
                Dense
            } else if has(Sparse) {
                Sparse
            } else if has(Permutation) {
                Permutation
            } else {
                Diagonal
            }
        }
        BinaryOp::Kron => {
            if has(Dense) || has(Sparse) {
                Sparse
            } else if has(Permutation) {
                Permutation
            } else if has(Diagonal) {
                Diagonal
            } else {
                Identity
            }
        }
        BinaryOp::Add => {
            if has(Dense) {
                Dense
            } else if has(Sparse) || has(Permutation) {
                Sparse
            } else {
                Diagonal
            }
        }
        BinaryOp::Hadamard => {
            if a == Identity && b == Identity {
                Identity
            } else if has(Identity) || has(Diagonal) {
                Diagonal
            } else if has(Permutation) {
                Permutation
            } else if has(Sparse) {
                Sparse
            } else {
                Dense
            }
        }
    }
}

fn check_dims(a: &MatrixRepr, b: &MatrixRepr, what: &str) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::shape(format!(
            "{what} of {}x{0} and {}x{1} matrices",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

fn as_perm(m: &MatrixRepr) -> Option<PermMatrix> {
    match m {
        MatrixRepr::Identity(n) => Some(PermMatrix::identity(*n)),
        MatrixRepr::Diagonal(d) => Some(PermMatrix::new_unchecked((0..d.len()).collect(), d.clone())),
        MatrixRepr::Permutation(p) => Some(p.clone()),
        _ => None,
    }
}

fn dense_of(m: &MatrixRepr) -> DMatrix<crate::C64> {
    m.to_dense()
}

pub(super) fn mul(a: &MatrixRepr, b: &MatrixRepr) -> Result<MatrixRepr> {
    use MatrixRepr::*;
    check_dims(a, b, "product")?;
    Ok(match (a, b) {
        (Identity(_), x) | (x, Identity(_)) => x.clone(),
        (Diagonal(x), Diagonal(y)) => Diagonal(x.iter().zip(y).map(|(p, q)| p * q).collect()),
        (Diagonal(d), Permutation(p)) => Permutation(PermMatrix::new_unchecked(
            p.perm().to_vec(),
            p.vals().iter().zip(d).map(|(v, di)| di * v).collect(),
        )),
        (Permutation(p), Diagonal(d)) => Permutation(PermMatrix::new_unchecked(
            p.perm().to_vec(),
            p.perm().iter().zip(p.vals()).map(|(&c, v)| v * d[c]).collect(),
        )),
        (Permutation(p), Permutation(q)) => Permutation(p.compose(q)),
        (Diagonal(d), Sparse(s)) => Sparse(s.scale_rows(d)),
        (Sparse(s), Diagonal(d)) => Sparse(s.scale_cols(d)),
        (Sparse(_) | Permutation(_), Sparse(_) | Permutation(_)) => Sparse(a.to_csc().mul(&b.to_csc())),
        _ => Dense(dense_of(a) * dense_of(b)),
    })
}

pub(super) fn kron(a: &MatrixRepr, b: &MatrixRepr) -> MatrixRepr {
    use MatrixRepr::*;
    match promote(BinaryOp::Kron, a.format(), b.format()) {
        Format::Identity => Identity(a.dim() * b.dim()),
        Format::Diagonal => {
            let (da, db) = (a.diagonal(), b.diagonal());
            Diagonal(da.iter().flat_map(|x| db.iter().map(move |y| x * y)).collect())
        }
        Format::Permutation => {
            let (pa, pb) = (as_perm(a).expect("perm-class"), as_perm(b).expect("perm-class"));
            Permutation(pa.kron(&pb))
        }
        _ => Sparse(a.to_csc().kron(&b.to_csc())),
    }
}

pub(super) fn add(a: &MatrixRepr, b: &MatrixRepr) -> Result<MatrixRepr> {
    use MatrixRepr::*;
    check_dims(a, b, "sum")?;
    Ok(match promote(BinaryOp::Add, a.format(), b.format()) {
        Format::Diagonal => Diagonal(a.diagonal().iter().zip(b.diagonal()).map(|(x, y)| x + y).collect()),
        Format::Sparse => match (a, b) {
            (Sparse(s), Diagonal(_) | Identity(_)) | (Diagonal(_) | Identity(_), Sparse(s)) => {
                let d = if let Sparse(_) = a { b.diagonal() } else { a.diagonal() };
                Sparse(s.add(&CscMatrix::from_triplets(
                    d.len(),
                    d.iter().enumerate().map(|(i, &v)| (i, i, v)),
                )))
            }
            _ => Sparse(a.to_csc().add(&b.to_csc())),
        },
        _ => {
            let mut m = dense_of(a);
            b.for_each_entry(|i, j, v| m[(i, j)] += v);
            Dense(m)
        }
    })
}

pub(super) fn hadamard(a: &MatrixRepr, b: &MatrixRepr) -> Result<MatrixRepr> {
    use MatrixRepr::*;
    check_dims(a, b, "elementwise product")?;
    Ok(match promote(BinaryOp::Hadamard, a.format(), b.format()) {
        Format::Identity => Identity(a.dim()),
        Format::Diagonal => Diagonal(a.diagonal().iter().zip(b.diagonal()).map(|(x, y)| x * y).collect()),
        Format::Permutation => {
            let (p, other) = match (a, b) {
                (Permutation(p), o) => (p, o),
                (o, Permutation(p)) => (p, o),
                _ => unreachable!("permutation class requires a permutation operand"),
            };
            Permutation(PermMatrix::new_unchecked(
                p.perm().to_vec(),
                p.perm()
                    .iter()
                    .zip(p.vals())
                    .enumerate()
                    .map(|(i, (&c, &v))| v * other.get(i, c))
                    .collect(),
            ))
        }
        Format::Sparse => {
            let (s, other) = match (a, b) {
                (Sparse(s), o) => (s, o),
                (o, Sparse(s)) => (s, o),
                _ => unreachable!("sparse class requires a sparse operand"),
            };
            Sparse(s.filter_map(|i, j, v| v * other.get(i, j)))
        }
        _ => Dense(dense_of(a).component_mul(&dense_of(b))),
    })
}
