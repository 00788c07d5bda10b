use super::{Block, Kind};
use crate::error::{Error, Result};
use crate::matrix::OpProps;

/// Largest block whose properties are decided through its matrix.
pub const PROPS_MAT_MAX_QUBITS: usize = 12;

const UNKNOWN: OpProps = OpProps {
    hermitian: None,
    unitary: None,
    reflexive: None,
};

fn all_true(it: impl IntoIterator<Item = Option<bool>>) -> Option<bool> {
    let mut all = true;
    for v in it {
        all &= v == Some(true);
    }
    all.then_some(true)
}

pub(super) fn pairwise_disjoint(children: &[Block]) -> bool {
    let mut used = std::collections::BTreeSet::new();
    for c in children {
        for q in c.support() {
            if !used.insert(q) {
                return false;
            }
        }
    }
    true
}

impl Block {
    /// Structural properties, refined through the matrix for blocks of at
    /// most [`PROPS_MAT_MAX_QUBITS`] qubits. Fields that stay `None` could
    /// not be decided.
    pub fn props(&self) -> Result<OpProps> {
        let p = self.structural_props()?;
        if (p.hermitian.is_none() || p.unitary.is_none() || p.reflexive.is_none())
            && self.nqubits() <= PROPS_MAT_MAX_QUBITS
        {
            let m = self.mat()?.props();
            return Ok(OpProps {
                hermitian: p.hermitian.or(m.hermitian),
                unitary: p.unitary.or(m.unitary),
                reflexive: p.reflexive.or(m.reflexive),
            });
        }
        Ok(p)
    }

    fn structural_props(&self) -> Result<OpProps> {
        Ok(match self.kind() {
            Kind::Const(g) => g.props,
            Kind::GeneralMatrix { props, .. } => *props,
            Kind::Identity => OpProps::known(true, true, true),
            Kind::Measure { .. } => return Err(Error::unsupported("measurement is not an operator")),
            Kind::Rotation { .. } | Kind::Shift { .. } | Kind::Phase { .. } => OpProps {
                unitary: Some(true),
                ..UNKNOWN
            },
            Kind::TimeEvolution { t_im, .. } => OpProps {
                unitary: (*t_im == 0.0).then_some(true),
                ..UNKNOWN
            },
            Kind::Put { child, .. }
            | Kind::Subroutine { child, .. }
            | Kind::Control { child, .. }
            | Kind::Daggered(child)
            | Kind::Cached { child, .. }
            | Kind::NoParams(child) => child.props()?,
            Kind::Repeat { child, .. } => {
                let p = child.props()?;
                OpProps {
                    hermitian: p.hermitian.filter(|&h| h),
                    unitary: p.unitary.filter(|&u| u),
                    reflexive: p.reflexive.filter(|&r| r),
                }
            }
            Kind::Kron(items) => {
                let ps = items.iter().map(|(_, b)| b.props()).collect::<Result<Vec<_>>>()?;
                OpProps {
                    hermitian: all_true(ps.iter().map(|p| p.hermitian)),
                    unitary: all_true(ps.iter().map(|p| p.unitary)),
                    reflexive: all_true(ps.iter().map(|p| p.reflexive)),
                }
            }
            Kind::Chain(children) => {
                if children.is_empty() {
                    return Ok(OpProps::known(true, true, true));
                }
                if children.len() == 1 {
                    return children[0].props();
                }
                let ps = children.iter().map(|b| b.props()).collect::<Result<Vec<_>>>()?;
                let unitary = all_true(ps.iter().map(|p| p.unitary));
                if pairwise_disjoint(children) {
                    OpProps {
                        hermitian: all_true(ps.iter().map(|p| p.hermitian)),
                        unitary,
                        reflexive: all_true(ps.iter().map(|p| p.reflexive)),
                    }
                } else {
                    OpProps { unitary, ..UNKNOWN }
                }
            }
            Kind::Add(children) => {
                let ps = children.iter().map(|b| b.props()).collect::<Result<Vec<_>>>()?;
                OpProps {
                    hermitian: all_true(ps.iter().map(|p| p.hermitian)),
                    ..UNKNOWN
                }
            }
            Kind::Scale { factor, child } => {
                let p = child.props()?;
                let real = factor.im == 0.0;
                let unit = (factor.norm() - 1.0).abs() == 0.0;
                OpProps {
                    hermitian: p.hermitian.filter(|&h| h && real),
                    unitary: p.unitary.filter(|&u| u && unit),
                    reflexive: p.reflexive.filter(|&r| r && real && unit),
                }
            }
        })
    }

    fn decided(v: Option<bool>, what: &str) -> Result<bool> {
        v.ok_or_else(|| Error::Undecidable(format!("cannot decide whether the block is {what}")))
    }

    pub fn is_hermitian(&self) -> Result<bool> {
        Self::decided(self.props()?.hermitian, "hermitian")
    }

    pub fn is_unitary(&self) -> Result<bool> {
        Self::decided(self.props()?.unitary, "unitary")
    }

    pub fn is_reflexive(&self) -> Result<bool> {
        Self::decided(self.props()?.reflexive, "reflexive")
    }
}

/// Whether `a` and `b` commute. Blocks on disjoint qubits always do;
/// otherwise the commutator is checked through the matrices.
pub fn iscommute(a: &Block, b: &Block) -> Result<bool> {
    if a.nqubits() != b.nqubits() {
        return Err(Error::shape("commutator of blocks of different size"));
    }
    if a.support().is_disjoint(&b.support()) {
        return Ok(true);
    }
    if a.nqubits() > PROPS_MAT_MAX_QUBITS {
        return Err(Error::Undecidable(format!(
            "commutator of {}-qubit blocks",
            a.nqubits()
        )));
    }
    let (ma, mb) = (a.mat()?, b.mat()?);
    let c = ma.mul(&mb)?.sub(&mb.mul(&ma)?)?;
    Ok(c.max_abs() <= 1e-10)
}
