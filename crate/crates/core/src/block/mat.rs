use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Block, Kind};
use crate::bitstr::{ctrl_masks, deposit_bits, extract_bits};
use crate::error::{Error, Result};
use crate::matrix::{CscMatrix, MatrixRepr, PermMatrix};
use crate::C64;

const ONE: C64 = C64::new(1.0, 0.0);

/// Embeds a `2^k` matrix acting on 1-based `locs` into an `n`-qubit
/// operator, active only where the controls match. Identity, diagonal and
/// permutation classes are preserved; other classes become sparse unless
/// the matrix already covers all qubits in order.
pub fn embed(m: &MatrixRepr, n: usize, locs: &[usize], ctrl_locs: &[usize], ctrl_config: &[u8]) -> Result<MatrixRepr> {
    if m.dim() != 1 << locs.len() {
        return Err(Error::shape(format!("{}x{0} matrix on {} qubits", m.dim(), locs.len())));
    }
    let (cmask, cwant) = ctrl_masks(ctrl_locs, ctrl_config)?;
    let (cmask, cwant) = (cmask as usize, cwant as usize);
    let pos: Vec<usize> = locs.iter().map(|l| l - 1).collect();
    let lmask = deposit_bits((1 << locs.len()) - 1, &pos);
    let dim = 1usize << n;
    if ctrl_locs.is_empty() && locs.len() == n && pos.iter().enumerate().all(|(k, &p)| k == p) {
        return Ok(m.clone());
    }
    let active = |i: usize| i & cmask == cwant;
    Ok(match m {
        MatrixRepr::Identity(_) => MatrixRepr::Identity(dim),
        MatrixRepr::Diagonal(d) => MatrixRepr::Diagonal(
            (0..dim)
                .map(|i| if active(i) { d[extract_bits(i, &pos)] } else { ONE })
                .collect(),
        ),
        MatrixRepr::Permutation(p) => {
            let mut perm = Vec::with_capacity(dim);
            let mut vals = Vec::with_capacity(dim);
            for i in 0..dim {
                if active(i) {
                    let r = extract_bits(i, &pos);
                    perm.push((i & !lmask) | deposit_bits(p.perm()[r], &pos));
                    vals.push(p.vals()[r]);
                } else {
                    perm.push(i);
                    vals.push(ONE);
                }
            }
            MatrixRepr::Permutation(PermMatrix::new_unchecked(perm, vals))
        }
        _ => {
            let local = m.to_csc();
            let nfree = n - locs.len();
            let mut trip = Vec::with_capacity(local.nnz() << nfree);
            let free: Vec<usize> = (0..n).filter(|q| !pos.contains(q)).collect();
            for e in 0..1usize << nfree {
                let base = deposit_bits(e, &free);
                if !active(base) {
                    for r in 0..m.dim() {
                        let i = base | deposit_bits(r, &pos);
                        trip.push((i, i, ONE));
                    }
                    continue;
                }
                for (r, c, v) in local.iter() {
                    trip.push((base | deposit_bits(r, &pos), base | deposit_bits(c, &pos), v));
                }
            }
            MatrixRepr::Sparse(CscMatrix::from_triplets(dim, trip))
        }
    })
}

/// `exp(-i H t)` of a hermitian matrix through its eigendecomposition.
pub(crate) fn expm_hermitian(h: &MatrixRepr, t: C64) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(h.to_dense());
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (-C64::i() * t * l).exp()));
    v * phases * v.adjoint()
}

/// `cos(θ/2) I - i sin(θ/2) G`
pub(crate) fn rotation_matrix(g: &MatrixRepr, theta: f64) -> MatrixRepr {
    let (s, c) = (theta / 2.0).sin_cos();
    let dim = g.dim();
    match g {
        MatrixRepr::Identity(_) | MatrixRepr::Diagonal(_) => MatrixRepr::Diagonal(
            g.diagonal()
                .iter()
                .map(|d| C64::new(c, 0.0) - C64::new(0.0, s) * d)
                .collect(),
        ),
        _ => {
            let mut m = DMatrix::identity(dim, dim) * C64::new(c, 0.0);
            g.for_each_entry(|i, j, v| m[(i, j)] += C64::new(0.0, -s) * v);
            MatrixRepr::Dense(m)
        }
    }
}

impl Block {
    /// Matrix of the operator on all `nqubits` qubits.
    pub fn mat(&self) -> Result<MatrixRepr> {
        let n = self.nqubits();
        Ok(match self.kind() {
            Kind::Const(g) => (*g.matrix).clone(),
            Kind::Rotation { generator, theta } => rotation_matrix(&generator.mat()?, theta.get()),
            Kind::Shift { theta } => crate::gates::shift(theta.get()),
            Kind::Phase { theta } => crate::gates::phase(theta.get()),
            Kind::TimeEvolution { hamiltonian, t, t_im } => {
                MatrixRepr::Dense(expm_hermitian(&hamiltonian.mat()?, C64::new(t.get(), *t_im)))
            }
            Kind::GeneralMatrix { matrix, .. } => (**matrix).clone(),
            Kind::Measure { .. } => return Err(Error::unsupported("measurement has no matrix")),
            Kind::Identity => MatrixRepr::Identity(1 << n),
            Kind::Chain(children) => {
                let mut acc = MatrixRepr::Identity(1 << n);
                for c in children {
                    acc = c.mat()?.mul(&acc)?;
                }
                acc
            }
            Kind::Put { locs, child } | Kind::Subroutine { locs, child } => embed(&child.mat()?, n, locs, &[], &[])?,
            Kind::Control { ctrl_locs, ctrl_config, locs, child } => {
                embed(&child.mat()?, n, locs, ctrl_locs, ctrl_config)?
            }
            Kind::Kron(items) => {
                let mut acc = MatrixRepr::Identity(1 << n);
                for (locs, child) in items {
                    acc = embed(&child.mat()?, n, locs, &[], &[])?.mul(&acc)?;
                }
                acc
            }
            Kind::Repeat { locs, child } => {
                let m = child.mat()?;
                let k = child.nqubits();
                let mut acc = MatrixRepr::Identity(1 << n);
                for &l in locs {
                    let span: Vec<usize> = (l..l + k).collect();
                    acc = embed(&m, n, &span, &[], &[])?.mul(&acc)?;
                }
                acc
            }
            Kind::Add(children) => {
                let mut it = children.iter();
                let first = it.next().ok_or_else(|| Error::validation("empty sum"))?;
                let mut acc = first.mat()?;
                for c in it {
                    acc = acc.add(&c.mat()?)?;
                }
                acc
            }
            Kind::Scale { factor, child } => child.mat()?.scale(*factor),
            Kind::Daggered(child) => child.mat()?.adjoint(),
            Kind::Cached { .. } => (*self.cached_mat()?).clone(),
            Kind::NoParams(child) => child.mat()?,
        })
    }

    /// Matrix of a `Cached` node, rebuilt when any parameter below changed.
    pub(crate) fn cached_mat(&self) -> Result<Arc<MatrixRepr>> {
        let Kind::Cached { child, slot } = self.kind() else {
            return Ok(Arc::new(self.mat()?));
        };
        let snapshot = child.parameters();
        let mut guard = slot.lock().expect("cache lock");
        if let Some((snap, m)) = guard.as_ref() {
            if *snap == snapshot {
                return Ok(m.clone());
            }
        }
        let m = Arc::new(child.mat()?);
        *guard = Some((snapshot, m.clone()));
        Ok(m)
    }
}
