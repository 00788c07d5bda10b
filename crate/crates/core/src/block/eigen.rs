use nalgebra::SymmetricEigen;

use super::{Block, Kind};
use crate::error::{Error, Result};
use crate::matrix::MatrixRepr;
use crate::C64;

fn is_diagonal_class(b: &Block) -> bool {
    match b.kind() {
        Kind::Identity => true,
        Kind::Const(g) => matches!(&*g.matrix, MatrixRepr::Identity(_) | MatrixRepr::Diagonal(_)),
        Kind::GeneralMatrix { matrix, .. } => matches!(&**matrix, MatrixRepr::Identity(_) | MatrixRepr::Diagonal(_)),
        _ => false,
    }
}

impl Block {
    /// Decomposes a hermitian block as `U E U†` with `E` diagonal, returning
    /// `(E, U)`. Structure is kept where possible; small blocks without a
    /// structural rule fall back to a numeric eigendecomposition.
    pub fn eigenbasis(&self) -> Result<(Block, Block)> {
        match self.structural_eigenbasis()? {
            Some(r) => Ok(r),
            None => self.numeric_eigenbasis(),
        }
    }

    fn structural_eigenbasis(&self) -> Result<Option<(Block, Block)>> {
        let n = self.nqubits();
        let id = || super::identity(n);
        Ok(Some(match self.kind() {
            Kind::Const(g) if g.name == "X" => (super::z(), super::h()),
            Kind::Const(g) if g.name == "Y" => (super::z(), super::chain(1, vec![super::h(), super::s()])?),
            _ if is_diagonal_class(self) => (self.clone(), id()?),
            Kind::Put { locs, child } => {
                let Some((e, u)) = child.structural_eigenbasis()? else { return Ok(None) };
                (super::put(n, locs, e)?, super::put(n, locs, u)?)
            }
            Kind::Kron(items) => {
                let mut es = Vec::new();
                let mut us = Vec::new();
                for (l, c) in items {
                    let Some((e, u)) = c.structural_eigenbasis()? else { return Ok(None) };
                    es.push((l.clone(), e));
                    us.push((l.clone(), u));
                }
                (super::kron(n, es)?, super::kron(n, us)?)
            }
            Kind::Repeat { locs, child } => {
                let Some((e, u)) = child.structural_eigenbasis()? else { return Ok(None) };
                (super::repeat(n, e, locs)?, super::repeat(n, u, locs)?)
            }
            Kind::Chain(children) if super::props::pairwise_disjoint(children) => {
                let mut es = Vec::new();
                let mut us = Vec::new();
                for c in children {
                    let Some((e, u)) = c.structural_eigenbasis()? else { return Ok(None) };
                    es.push(e);
                    us.push(u);
                }
                (super::chain(n, es)?, super::chain(n, us)?)
            }
            Kind::Scale { factor, child } if factor.im == 0.0 => {
                let Some((e, u)) = child.structural_eigenbasis()? else { return Ok(None) };
                (super::scale(*factor, e)?, u)
            }
            Kind::Add(children) if !children.is_empty() => {
                let mut es = Vec::new();
                let mut basis: Option<Block> = None;
                for c in children {
                    let Some((e, u)) = c.structural_eigenbasis()? else { return Ok(None) };
                    match &basis {
                        Some(b) if !b.structurally_eq(&u) => return Ok(None),
                        Some(_) => {}
                        None => basis = Some(u),
                    }
                    es.push(e);
                }
                (super::add(n, es)?, basis.expect("non-empty sum"))
            }
            Kind::NoParams(child) | Kind::Cached { child, .. } | Kind::Daggered(child) => {
                return child.structural_eigenbasis()
            }
            _ => return Ok(None),
        }))
    }

    fn numeric_eigenbasis(&self) -> Result<(Block, Block)> {
        if self.nqubits() > super::props::PROPS_MAT_MAX_QUBITS {
            return Err(Error::Undecidable(format!(
                "no structural eigenbasis for a {}-qubit block",
                self.nqubits()
            )));
        }
        if !self.is_hermitian()? {
            return Err(Error::validation("eigenbasis of a non-hermitian block"));
        }
        let eig = SymmetricEigen::new(self.mat()?.to_dense());
        let e = MatrixRepr::Diagonal(eig.eigenvalues.iter().map(|&l| C64::new(l, 0.0)).collect());
        Ok((super::matblock(e)?, super::matblock(MatrixRepr::Dense(eig.eigenvectors))?))
    }
}
