use super::{Block, Kind};
use crate::gates;

impl Block {
    /// Adjoint block. Chains reverse their children, rotations and shifts
    /// negate their angle, hermitian gates are returned unchanged and
    /// `S`/`T`-style pairs swap; anything else is wrapped in a dagger node.
    pub fn adjoint(&self) -> Block {
        let n = self.nqubits();
        let wrap = || Block::new(n, Kind::Daggered(self.clone()));
        match self.kind() {
            Kind::Const(g) => {
                if g.props.is_hermitian() {
                    self.clone()
                } else if let Some(pair) = gates::dagger_pair(&g.name) {
                    super::gate(pair).expect("builtin dagger pair")
                } else {
                    wrap()
                }
            }
            Kind::Rotation { generator, theta } => super::Block::new(
                n,
                Kind::Rotation {
                    generator: generator.clone(),
                    theta: super::Param::new(-theta.get()),
                },
            ),
            Kind::Shift { theta } => super::shift(-theta.get()),
            Kind::Phase { theta } => super::phase(-theta.get()),
            Kind::TimeEvolution { hamiltonian, t, t_im } => Block::new(
                n,
                Kind::TimeEvolution {
                    hamiltonian: hamiltonian.clone(),
                    t: super::Param::new(-t.get()),
                    t_im: *t_im,
                },
            ),
            Kind::GeneralMatrix { props, .. } if props.is_hermitian() => self.clone(),
            Kind::Identity => self.clone(),
            Kind::GeneralMatrix { .. } | Kind::Measure { .. } | Kind::Cached { .. } => wrap(),
            Kind::Daggered(child) => child.clone(),
            Kind::Chain(children) => Block::new(n, Kind::Chain(children.iter().rev().map(Block::adjoint).collect())),
            Kind::Add(children) => Block::new(n, Kind::Add(children.iter().map(Block::adjoint).collect())),
            Kind::Put { locs, child } => Block::new(
                n,
                Kind::Put {
                    locs: locs.clone(),
                    child: child.adjoint(),
                },
            ),
            Kind::Control { ctrl_locs, ctrl_config, locs, child } => Block::new(
                n,
                Kind::Control {
                    ctrl_locs: ctrl_locs.clone(),
                    ctrl_config: ctrl_config.clone(),
                    locs: locs.clone(),
                    child: child.adjoint(),
                },
            ),
            Kind::Kron(items) => Block::new(
                n,
                Kind::Kron(items.iter().map(|(l, c)| (l.clone(), c.adjoint())).collect()),
            ),
            Kind::Repeat { locs, child } => Block::new(
                n,
                Kind::Repeat {
                    locs: locs.clone(),
                    child: child.adjoint(),
                },
            ),
            Kind::Subroutine { locs, child } => Block::new(
                n,
                Kind::Subroutine {
                    locs: locs.clone(),
                    child: child.adjoint(),
                },
            ),
            Kind::Scale { factor, child } => Block::new(
                n,
                Kind::Scale {
                    factor: factor.conj(),
                    child: child.adjoint(),
                },
            ),
            Kind::NoParams(child) => Block::new(n, Kind::NoParams(child.adjoint())),
        }
    }
}
