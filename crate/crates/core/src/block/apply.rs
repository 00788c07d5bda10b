use super::{Block, Kind};
use crate::error::{Error, Result};
use crate::register::Register;
use crate::C64;

/// Composite children up to this size are applied through their matrix.
const MAT_APPLY_MAX_QUBITS: usize = 4;

impl Block {
    /// Applies the block to the active qubits of `reg` in place.
    pub fn apply(&self, reg: &mut Register) -> Result<()> {
        if self.nqubits() != reg.nactive() {
            return Err(Error::shape(format!(
                "{}-qubit block applied to {} active qubits",
                self.nqubits(),
                reg.nactive()
            )));
        }
        self.apply_unchecked(reg)
    }

    fn all_locs(&self) -> Vec<usize> {
        (1..=self.nqubits()).collect()
    }

    pub(crate) fn apply_unchecked(&self, reg: &mut Register) -> Result<()> {
        match self.kind() {
            Kind::Identity => Ok(()),
            Kind::Const(g) => reg.instruct(&g.matrix, &self.all_locs(), &[], &[]),
            Kind::Rotation { .. } | Kind::Shift { .. } | Kind::Phase { .. } | Kind::GeneralMatrix { .. } => {
                reg.instruct(&self.mat()?, &self.all_locs(), &[], &[])
            }
            Kind::TimeEvolution { hamiltonian, t, t_im } => {
                evolve(hamiltonian, C64::new(t.get(), *t_im), reg)
            }
            Kind::Measure { rng, last } => {
                let out = reg.measure_collapse(&mut *rng.lock().expect("measure rng lock"))?;
                *last.lock().expect("measure result lock") = Some(out);
                Ok(())
            }
            Kind::Chain(children) => children.iter().try_for_each(|c| c.apply_unchecked(reg)),
            Kind::Put { locs, child } => apply_local(reg, child, locs, &[], &[]),
            Kind::Control { ctrl_locs, ctrl_config, locs, child } => {
                reg.instruct(&child.mat()?, locs, ctrl_locs, ctrl_config)
            }
            Kind::Kron(items) => items.iter().try_for_each(|(locs, c)| apply_local(reg, c, locs, &[], &[])),
            Kind::Repeat { locs, child } => {
                let k = child.nqubits();
                if child.is_primitive() || k <= MAT_APPLY_MAX_QUBITS {
                    let m = child.mat()?;
                    for &l in locs {
                        reg.instruct(&m, &(l..l + k).collect::<Vec<_>>(), &[], &[])?;
                    }
                    Ok(())
                } else {
                    locs.iter()
                        .try_for_each(|&l| apply_local(reg, child, &(l..l + k).collect::<Vec<_>>(), &[], &[]))
                }
            }
            Kind::Subroutine { locs, child } => apply_scoped(reg, child, locs),
            Kind::Add(children) => {
                let (last, rest) = children
                    .split_last()
                    .ok_or_else(|| Error::validation("cannot apply an empty sum"))?;
                let mut acc: Option<Register> = None;
                for c in rest {
                    let mut tmp = reg.clone();
                    c.apply_unchecked(&mut tmp)?;
                    match acc.as_mut() {
                        Some(a) => a.axpy(C64::new(1.0, 0.0), &tmp)?,
                        None => acc = Some(tmp),
                    }
                }
                last.apply_unchecked(reg)?;
                if let Some(a) = acc {
                    reg.axpy(C64::new(1.0, 0.0), &a)?;
                }
                Ok(())
            }
            Kind::Scale { factor, child } => {
                child.apply_unchecked(reg)?;
                reg.scale(*factor);
                Ok(())
            }
            Kind::Daggered(child) => {
                if child.is_primitive() || matches!(child.kind(), Kind::Cached { .. }) {
                    if matches!(child.kind(), Kind::Measure { .. }) {
                        return Err(Error::unsupported("measurement has no adjoint"));
                    }
                    let m = match child.kind() {
                        Kind::Cached { .. } => child.cached_mat()?.adjoint(),
                        _ => child.mat()?.adjoint(),
                    };
                    reg.instruct(&m, &self.all_locs(), &[], &[])
                } else {
                    child.adjoint().apply_unchecked(reg)
                }
            }
            Kind::Cached { .. } => {
                let m = self.cached_mat()?;
                m.matvec_cols(reg.state_mut())
            }
            Kind::NoParams(child) => child.apply_unchecked(reg),
        }
    }
}

/// Applies `child` on `locs` of `reg`, through its matrix when small.
pub(crate) fn apply_local(reg: &mut Register, child: &Block, locs: &[usize], ctrl_locs: &[usize], cfg: &[u8]) -> Result<()> {
    match child.kind() {
        Kind::Identity => Ok(()),
        Kind::Const(g) => reg.instruct(&g.matrix, locs, ctrl_locs, cfg),
        _ if !ctrl_locs.is_empty()
            || (child.is_primitive() && !matches!(child.kind(), Kind::Measure { .. } | Kind::TimeEvolution { .. }))
            || (child.nqubits() <= MAT_APPLY_MAX_QUBITS && !child.contains_measure()) =>
        {
            reg.instruct(&child.mat()?, locs, ctrl_locs, cfg)
        }
        _ => apply_scoped(reg, child, locs),
    }
}

/// focus → apply → relax.
pub(crate) fn apply_scoped(reg: &mut Register, child: &Block, locs: &[usize]) -> Result<()> {
    let prev = reg.nactive();
    reg.focus(locs)?;
    let res = child.apply_unchecked(reg);
    reg.relax(locs, prev)?;
    res
}

/// `reg ← exp(-i H t) reg` via Krylov iterations.
pub(crate) fn evolve(h: &Block, t: C64, reg: &mut Register) -> Result<()> {
    let cached = match h.kind() {
        Kind::Cached { .. } => Some(h.cached_mat()?),
        _ => None,
    };
    crate::krylov::expmv(
        |src, dst| {
            dst.copy_from(src)?;
            match &cached {
                Some(m) => m.matvec_cols(dst.state_mut()),
                None => h.apply_unchecked(dst),
            }
        },
        t,
        reg,
    )
}
