use std::collections::HashMap;

use nalgebra::DMatrix;

use super::matback::mat_back_dense;
use super::{AdjointPair, GradResult};
use crate::bitstr::{ctrl_masks, deposit_bits};
use crate::block::{Block, Kind};
use crate::error::{Error, Result};
use crate::register::Register;
use crate::C64;

/// Primitives on more qubits than this get their gradient from one
/// generator application instead of a local `Ū`.
const LOCAL_UBAR_MAX_QUBITS: usize = 6;

struct Ctx {
    index: HashMap<usize, usize>,
    has_params: HashMap<usize, bool>,
    grads: Vec<f64>,
}

impl Ctx {
    fn new(circuit: &Block) -> Self {
        let index = circuit
            .parameter_nodes()
            .iter()
            .enumerate()
            .map(|(k, b)| (b.id(), k))
            .collect();
        let mut ctx = Ctx {
            index,
            has_params: HashMap::new(),
            grads: vec![0.0; circuit.nparameters()],
        };
        ctx.mark(circuit);
        ctx
    }

    fn mark(&mut self, b: &Block) -> bool {
        if let Some(&v) = self.has_params.get(&b.id()) {
            return v;
        }
        let v = match b.kind() {
            Kind::NoParams(_) => false,
            _ if b.is_primitive() => self.index.contains_key(&b.id()),
            _ => {
                let mut any = false;
                for c in b.subblocks() {
                    any |= self.mark(&c);
                }
                any
            }
        };
        self.has_params.insert(b.id(), v);
        v
    }

    fn has(&self, b: &Block) -> bool {
        self.has_params.get(&b.id()).copied().unwrap_or(false)
    }
}

/// Propagates `ap` backwards through `circuit`: the state is uncomputed to
/// the circuit input, the adjoint becomes the input adjoint, and parameter
/// gradients are accumulated over every column of the register.
pub fn apply_back(mut ap: AdjointPair, circuit: &Block) -> Result<GradResult> {
    if circuit.nqubits() != ap.state.nactive() {
        return Err(Error::shape(format!(
            "{}-qubit circuit on {} active qubits",
            circuit.nqubits(),
            ap.state.nactive()
        )));
    }
    let mut ctx = Ctx::new(circuit);
    back(&mut ap, circuit, false, &mut ctx)?;
    Ok(GradResult {
        state_grad: ap.adjoint,
        param_grads: ctx.grads,
    })
}

fn both(ap: &mut AdjointPair, mut f: impl FnMut(&mut Register) -> Result<()>) -> Result<()> {
    f(&mut ap.state)?;
    f(&mut ap.adjoint)
}

fn focus_both(ap: &mut AdjointPair, locs: &[usize]) -> Result<usize> {
    let prev = ap.state.nactive();
    ap.state.focus(locs)?;
    ap.adjoint.focus(locs)?;
    Ok(prev)
}

fn relax_both(ap: &mut AdjointPair, locs: &[usize], prev: usize) -> Result<()> {
    ap.state.relax(locs, prev)?;
    ap.adjoint.relax(locs, prev)
}

fn scoped(ap: &mut AdjointPair, locs: &[usize], f: impl FnOnce(&mut AdjointPair) -> Result<()>) -> Result<()> {
    let prev = focus_both(ap, locs)?;
    let res = f(ap);
    relax_both(ap, locs, prev)?;
    res
}

fn check_invertible(b: &Block) -> Result<()> {
    match b.kind() {
        Kind::Measure { .. } => Err(Error::unsupported("cannot differentiate through a measurement")),
        Kind::Add(_) => Err(Error::unsupported("cannot differentiate through a sum of operators")),
        Kind::Scale { factor, child } => {
            if (factor.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::unsupported("cannot uncompute a non-unitary scale"));
            }
            check_invertible(child)
        }
        Kind::TimeEvolution { t_im, .. } if *t_im != 0.0 => {
            Err(Error::unsupported("cannot uncompute imaginary-time evolution"))
        }
        Kind::Const(g) if !g.props.is_unitary() => Err(Error::unsupported("cannot uncompute a non-unitary gate")),
        Kind::GeneralMatrix { props, .. } if !props.is_unitary() => {
            Err(Error::unsupported("cannot uncompute a non-unitary matrix"))
        }
        _ => b.subblocks().iter().try_for_each(check_invertible),
    }
}

/// Undoes `b` (or `b†` when `dag`) on both registers.
fn uncompute(ap: &mut AdjointPair, b: &Block, dag: bool) -> Result<()> {
    check_invertible(b)?;
    if dag {
        both(ap, |r| b.apply_unchecked(r))
    } else {
        let inv = b.adjoint();
        both(ap, |r| inv.apply_unchecked(r))
    }
}

fn back(ap: &mut AdjointPair, b: &Block, dag: bool, ctx: &mut Ctx) -> Result<()> {
    if !ctx.has(b) {
        return uncompute(ap, b, dag);
    }
    let all: Vec<usize> = (1..=b.nqubits()).collect();
    match b.kind() {
        _ if b.is_primitive() => local(ap, b, &all, &[], &[], dag, ctx),
        Kind::Chain(children) => {
            if dag {
                children.iter().try_for_each(|c| back(ap, c, dag, ctx))
            } else {
                children.iter().rev().try_for_each(|c| back(ap, c, dag, ctx))
            }
        }
        Kind::Put { locs, child } => placed(ap, child, locs, dag, ctx),
        Kind::Subroutine { locs, child } => scoped(ap, locs, |ap| back(ap, child, dag, ctx)),
        Kind::Kron(items) => items.iter().rev().try_for_each(|(locs, c)| placed(ap, c, locs, dag, ctx)),
        Kind::Repeat { locs, child } => {
            let k = child.nqubits();
            locs.iter()
                .rev()
                .try_for_each(|&l| placed(ap, child, &(l..l + k).collect::<Vec<_>>(), dag, ctx))
        }
        Kind::Control { ctrl_locs, ctrl_config, locs, child } => {
            controlled(ap, child, ctrl_locs, ctrl_config, locs, dag, ctx)
        }
        Kind::Daggered(child) => back(ap, child, !dag, ctx),
        Kind::Cached { child, .. } | Kind::NoParams(child) => back(ap, child, dag, ctx),
        Kind::Scale { factor, child } => {
            check_invertible(b)?;
            let f = if dag { factor.conj() } else { *factor };
            both(ap, |r| {
                r.scale(f.conj());
                Ok(())
            })?;
            back(ap, child, dag, ctx)
        }
        _ => {
            check_invertible(b)?;
            Err(Error::unsupported(format!("cannot differentiate through `{}`", b.head())))
        }
    }
}

fn placed(ap: &mut AdjointPair, child: &Block, locs: &[usize], dag: bool, ctx: &mut Ctx) -> Result<()> {
    if child.is_primitive() && ctx.has(child) {
        local(ap, child, locs, &[], &[], dag, ctx)
    } else {
        scoped(ap, locs, |ap| back(ap, child, dag, ctx))
    }
}

fn controlled(
    ap: &mut AdjointPair,
    child: &Block,
    ctrl_locs: &[usize],
    cfg: &[u8],
    locs: &[usize],
    dag: bool,
    ctx: &mut Ctx,
) -> Result<()> {
    let map = |l: &[usize]| -> Vec<usize> { l.iter().map(|&q| locs[q - 1]).collect() };
    if !ctx.has(child) || child.is_primitive() {
        return local(ap, child, locs, ctrl_locs, cfg, dag, ctx);
    }
    match child.kind() {
        Kind::Chain(children) => {
            let mut go = |c: &Block| controlled(ap, c, ctrl_locs, cfg, locs, dag, ctx);
            if dag {
                children.iter().try_for_each(&mut go)
            } else {
                children.iter().rev().try_for_each(&mut go)
            }
        }
        Kind::Put { locs: l2, child: c2 } | Kind::Subroutine { locs: l2, child: c2 } => {
            controlled(ap, c2, ctrl_locs, cfg, &map(l2), dag, ctx)
        }
        Kind::Kron(items) => items
            .iter()
            .rev()
            .try_for_each(|(l2, c2)| controlled(ap, c2, ctrl_locs, cfg, &map(l2), dag, ctx)),
        Kind::Repeat { locs: starts, child: c2 } => {
            let k = c2.nqubits();
            starts.iter().rev().try_for_each(|&s| {
                let span: Vec<usize> = (s..s + k).collect();
                controlled(ap, c2, ctrl_locs, cfg, &map(&span), dag, ctx)
            })
        }
        Kind::Control { ctrl_locs: c2l, ctrl_config: c2c, locs: l2, child: c2 } => {
            let mut cl = ctrl_locs.to_vec();
            cl.extend(map(c2l));
            let mut cc = cfg.to_vec();
            cc.extend_from_slice(c2c);
            controlled(ap, c2, &cl, &cc, &map(l2), dag, ctx)
        }
        Kind::Daggered(c2) => controlled(ap, c2, ctrl_locs, cfg, locs, !dag, ctx),
        Kind::Cached { child: c2, .. } | Kind::NoParams(c2) => controlled(ap, c2, ctrl_locs, cfg, locs, dag, ctx),
        _ => Err(Error::unsupported(format!(
            "cannot differentiate through a controlled `{}`",
            child.head()
        ))),
    }
}

/// Backward step through a block whose matrix acts on `locs` under controls.
fn local(
    ap: &mut AdjointPair,
    b: &Block,
    locs: &[usize],
    ctrl_locs: &[usize],
    cfg: &[u8],
    dag: bool,
    ctx: &mut Ctx,
) -> Result<()> {
    check_invertible(b)?;
    let idx = ctx.index.get(&b.id()).copied();
    let large = ctrl_locs.is_empty() && locs.len() > LOCAL_UBAR_MAX_QUBITS;
    if large && (idx.is_some() || matches!(b.kind(), Kind::TimeEvolution { .. })) {
        return scoped(ap, locs, |ap| large_primitive(ap, b, dag, idx, ctx));
    }
    let m = b.mat()?;
    let inv = if dag { m } else { m.adjoint() };
    ap.state.instruct(&inv, locs, ctrl_locs, cfg)?;
    if let Some(k) = idx {
        let ubar = local_ubar(&ap.state, &ap.adjoint, locs, ctrl_locs, cfg)?;
        let ubar = if dag { ubar.adjoint() } else { ubar };
        ctx.grads[k] += mat_back_dense(b, &ubar)?;
    }
    ap.adjoint.instruct(&inv, locs, ctrl_locs, cfg)
}

/// Gradient from `∂U ψ_k = s·A ψ_{k+1}`, where `A` is `-iG/2` for rotations
/// and `-iH` for time evolution, and `s = -1` under a dagger.
fn large_primitive(ap: &mut AdjointPair, b: &Block, dag: bool, idx: Option<usize>, ctx: &mut Ctx) -> Result<()> {
    if let Some(k) = idx {
        let (gen, factor) = match b.kind() {
            Kind::Rotation { generator, .. } => (generator, C64::new(0.0, -0.5)),
            Kind::TimeEvolution { hamiltonian, .. } => (hamiltonian, C64::new(0.0, -1.0)),
            _ => return Err(Error::unsupported(format!("no large-block gradient for `{}`", b.head()))),
        };
        let mut tmp = ap.state.clone();
        gen.apply_unchecked(&mut tmp)?;
        let s = if dag { -1.0 } else { 1.0 };
        let g: C64 = ap.adjoint.inner(&tmp)?.into_iter().sum();
        ctx.grads[k] += 2.0 * s * (factor * g).re;
    }
    uncompute(ap, b, dag)
}

/// `Ū_loc[r, c] = Σ adjoint[e | r] conj(state[e | c])` over the columns and
/// over the free index bits `e` that satisfy the controls.
fn local_ubar(
    state: &Register,
    adjoint: &Register,
    locs: &[usize],
    ctrl_locs: &[usize],
    cfg: &[u8],
) -> Result<DMatrix<C64>> {
    let n = state.nactive();
    let rows = 1usize << n;
    let k = locs.len();
    let dim = 1usize << k;
    let pos: Vec<usize> = locs.iter().map(|l| l - 1).collect();
    let free: Vec<usize> = (0..n).filter(|q| !pos.contains(q)).collect();
    let (cmask, cwant) = ctrl_masks(ctrl_locs, cfg)?;
    let (cmask, cwant) = (cmask as usize, cwant as usize);
    let offs: Vec<usize> = (0..dim).map(|r| deposit_bits(r, &pos)).collect();
    let mut u = DMatrix::<C64>::zeros(dim, dim);
    let mut a = vec![C64::new(0.0, 0.0); dim];
    let mut s = vec![C64::new(0.0, 0.0); dim];
    for (col_s, col_a) in state.state().chunks(rows).zip(adjoint.state().chunks(rows)) {
        for e in 0..1usize << free.len() {
            let base = deposit_bits(e, &free);
            if base & cmask != cwant {
                continue;
            }
            for r in 0..dim {
                a[r] = col_a[base | offs[r]];
                s[r] = col_s[base | offs[r]].conj();
            }
            for c in 0..dim {
                let sc = s[c];
                if sc == C64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..dim {
                    u[(r, c)] += a[r] * sc;
                }
            }
        }
    }
    Ok(u)
}
