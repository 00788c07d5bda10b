//! The block intermediate representation.
//!
//! A [`Block`] is a cheaply clonable handle to an immutable node. Cloning a
//! handle shares the node, so the same gate instance can appear at several
//! places of a circuit; such shared nodes own a single set of parameters.
//! Parameters live in atomic cells and are updated through
//! [`Block::dispatch`] without rebuilding the tree.

mod apply;
mod count;
mod dagger;
mod display;
mod eigen;
mod mat;
mod params;
mod props;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates::{self, GateDef};
use crate::matrix::{MatrixRepr, OpProps};
use crate::register::MeasureOutcome;
use crate::C64;

pub use mat::embed;
pub use props::{iscommute, PROPS_MAT_MAX_QUBITS};

/// A real parameter cell.
#[derive(Debug)]
pub struct Param(AtomicU64);

impl Param {
    fn new(v: f64) -> Self {
        Param(AtomicU64::new(v.to_bits()))
    }

    pub fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    pub(crate) fn set(&self, v: f64) {
        self.0.store(v.to_bits(), Ordering::Relaxed)
    }
}

pub(crate) type CacheSlot = Mutex<Option<(Vec<f64>, Arc<MatrixRepr>)>>;

#[derive(Debug)]
pub enum Kind {
    Const(Arc<GateDef>),
    /// `exp(-i G θ / 2)` for a hermitian, reflexive generator `G`.
    Rotation { generator: Block, theta: Param },
    /// `diag(1, exp(iθ))`
    Shift { theta: Param },
    /// `exp(iθ) I`
    Phase { theta: Param },
    /// `exp(-i H t)`; the real part of `t` is the parameter.
    TimeEvolution { hamiltonian: Block, t: Param, t_im: f64 },
    GeneralMatrix { matrix: Arc<MatrixRepr>, props: OpProps },
    Measure { rng: Mutex<ChaCha8Rng>, last: Mutex<Option<MeasureOutcome>> },
    Identity,
    Chain(Vec<Block>),
    Put { locs: Vec<usize>, child: Block },
    Control { ctrl_locs: Vec<usize>, ctrl_config: Vec<u8>, locs: Vec<usize>, child: Block },
    Kron(Vec<(Vec<usize>, Block)>),
    /// `child` placed at each start location.
    Repeat { locs: Vec<usize>, child: Block },
    Subroutine { locs: Vec<usize>, child: Block },
    Add(Vec<Block>),
    Scale { factor: C64, child: Block },
    Daggered(Block),
    Cached { child: Block, slot: CacheSlot },
    NoParams(Block),
}

#[derive(Debug)]
pub struct BlockNode {
    nqubits: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
pub struct Block(Arc<BlockNode>);

fn check_locs(n: usize, locs: &[usize], used: &mut u64) -> Result<()> {
    for &l in locs {
        if l == 0 || l > n {
            return Err(Error::Range {
                what: "qubit",
                index: l,
                max: n,
            });
        }
        let bit = 1u64 << (l - 1);
        if *used & bit != 0 {
            return Err(Error::validation(format!("qubit {l} used more than once")));
        }
        *used |= bit;
    }
    Ok(())
}

fn check_child(locs: &[usize], child: &Block) -> Result<()> {
    if locs.len() != child.nqubits() {
        return Err(Error::shape(format!(
            "{}-qubit block placed on {} locations",
            child.nqubits(),
            locs.len()
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > crate::bitstr::MAX_BITS {
        return Err(Error::validation(format!("block size {n} outside 1..={}", crate::bitstr::MAX_BITS)));
    }
    Ok(())
}

impl Block {
    fn new(nqubits: usize, kind: Kind) -> Block {
        Block(Arc::new(BlockNode { nqubits, kind }))
    }

    pub fn nqubits(&self) -> usize {
        self.0.nqubits
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// True when both handles refer to the same node.
    pub fn ptr_eq(&self, other: &Block) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn is_primitive(&self) -> bool {
        matches!(
            self.kind(),
            Kind::Const(_)
                | Kind::Rotation { .. }
                | Kind::Shift { .. }
                | Kind::Phase { .. }
                | Kind::TimeEvolution { .. }
                | Kind::GeneralMatrix { .. }
                | Kind::Measure { .. }
                | Kind::Identity
        )
    }

    /// Direct children; empty for primitive blocks.
    pub fn subblocks(&self) -> Vec<Block> {
        match self.kind() {
            Kind::Chain(c) | Kind::Add(c) => c.clone(),
            Kind::Kron(items) => items.iter().map(|(_, b)| b.clone()).collect(),
            Kind::Put { child, .. }
            | Kind::Control { child, .. }
            | Kind::Repeat { child, .. }
            | Kind::Subroutine { child, .. }
            | Kind::Scale { child, .. }
            | Kind::Cached { child, .. }
            | Kind::Daggered(child)
            | Kind::NoParams(child) => vec![child.clone()],
            _ => Vec::new(),
        }
    }

    /// Same node kind and attributes with the children replaced.
    pub fn chsubblocks(&self, children: Vec<Block>) -> Result<Block> {
        let n = self.nqubits();
        let one = |mut c: Vec<Block>| -> Result<Block> {
            if c.len() != 1 {
                return Err(Error::validation(format!("expected one child, got {}", c.len())));
            }
            Ok(c.pop().unwrap())
        };
        match self.kind() {
            Kind::Chain(_) => chain(n, children),
            Kind::Add(_) => add(n, children),
            Kind::Kron(items) => {
                if children.len() != items.len() {
                    return Err(Error::validation("kron child count changed"));
                }
                kron(n, items.iter().map(|(l, _)| l.clone()).zip(children).collect())
            }
            Kind::Put { locs, .. } => put(n, locs, one(children)?),
            Kind::Control { ctrl_locs, ctrl_config, locs, .. } => {
                control_with(n, ctrl_locs, ctrl_config, locs, one(children)?)
            }
            Kind::Repeat { locs, .. } => repeat(n, one(children)?, locs),
            Kind::Subroutine { locs, .. } => subroutine(n, one(children)?, locs),
            Kind::Scale { factor, .. } => scale(*factor, one(children)?),
            Kind::Daggered(_) => {
                let c = one(children)?;
                if c.nqubits() != n {
                    return Err(Error::shape("daggered child changed size"));
                }
                Ok(Block::new(n, Kind::Daggered(c)))
            }
            Kind::Cached { .. } => Ok(cache(one(children)?)),
            Kind::NoParams(_) => Ok(no_params(one(children)?)),
            _ => {
                if children.is_empty() {
                    Ok(self.clone())
                } else {
                    Err(Error::validation("primitive blocks have no children"))
                }
            }
        }
    }

    /// Qubits (1-based) the block can act non-trivially on.
    pub fn support(&self) -> BTreeSet<usize> {
        let map = |locs: &[usize], child: &Block| -> BTreeSet<usize> {
            child.support().into_iter().map(|q| locs[q - 1]).collect()
        };
        match self.kind() {
            Kind::Identity => BTreeSet::new(),
            Kind::Const(g) if g.name == "I2" => BTreeSet::new(),
            Kind::Put { locs, child } | Kind::Subroutine { locs, child } => map(locs, child),
            Kind::Control { ctrl_locs, locs, child, .. } => {
                let mut s = map(locs, child);
                s.extend(ctrl_locs.iter().copied());
                s
            }
            Kind::Kron(items) => items.iter().flat_map(|(l, b)| map(l, b)).collect(),
            Kind::Repeat { locs, child } => {
                let k = child.nqubits();
                locs.iter()
                    .flat_map(|&l| map(&(l..l + k).collect::<Vec<_>>(), child))
                    .collect()
            }
            Kind::Chain(c) | Kind::Add(c) => c.iter().flat_map(|b| b.support()).collect(),
            Kind::Scale { child, .. } | Kind::Cached { child, .. } | Kind::Daggered(child) | Kind::NoParams(child) => {
                child.support()
            }
            _ => (1..=self.nqubits()).collect(),
        }
    }

    /// Tree equality: same kinds, attributes, parameter values and gates.
    pub fn structurally_eq(&self, other: &Block) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.nqubits() != other.nqubits() {
            return false;
        }
        let children_eq = |a: &[Block], b: &[Block]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.structurally_eq(y))
        };
        match (self.kind(), other.kind()) {
            (Kind::Const(a), Kind::Const(b)) => a.name == b.name,
            (Kind::Rotation { generator: g1, theta: t1 }, Kind::Rotation { generator: g2, theta: t2 }) => {
                t1.get() == t2.get() && g1.structurally_eq(g2)
            }
            (Kind::Shift { theta: a }, Kind::Shift { theta: b }) | (Kind::Phase { theta: a }, Kind::Phase { theta: b }) => {
                a.get() == b.get()
            }
            (
                Kind::TimeEvolution { hamiltonian: h1, t: t1, t_im: i1 },
                Kind::TimeEvolution { hamiltonian: h2, t: t2, t_im: i2 },
            ) => t1.get() == t2.get() && i1 == i2 && h1.structurally_eq(h2),
            (Kind::GeneralMatrix { matrix: a, .. }, Kind::GeneralMatrix { matrix: b, .. }) => a == b,
            (Kind::Measure { .. }, Kind::Measure { .. }) | (Kind::Identity, Kind::Identity) => true,
            (Kind::Chain(a), Kind::Chain(b)) | (Kind::Add(a), Kind::Add(b)) => children_eq(a, b),
            (Kind::Put { locs: l1, child: c1 }, Kind::Put { locs: l2, child: c2 })
            | (Kind::Repeat { locs: l1, child: c1 }, Kind::Repeat { locs: l2, child: c2 })
            | (Kind::Subroutine { locs: l1, child: c1 }, Kind::Subroutine { locs: l2, child: c2 }) => {
                l1 == l2 && c1.structurally_eq(c2)
            }
            (
                Kind::Control { ctrl_locs: a1, ctrl_config: b1, locs: l1, child: c1 },
                Kind::Control { ctrl_locs: a2, ctrl_config: b2, locs: l2, child: c2 },
            ) => a1 == a2 && b1 == b2 && l1 == l2 && c1.structurally_eq(c2),
            (Kind::Kron(a), Kind::Kron(b)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|((l1, c1), (l2, c2))| l1 == l2 && c1.structurally_eq(c2))
            }
            (Kind::Scale { factor: f1, child: c1 }, Kind::Scale { factor: f2, child: c2 }) => {
                f1 == f2 && c1.structurally_eq(c2)
            }
            (Kind::Daggered(a), Kind::Daggered(b))
            | (Kind::Cached { child: a, .. }, Kind::Cached { child: b, .. })
            | (Kind::NoParams(a), Kind::NoParams(b)) => a.structurally_eq(b),
            _ => false,
        }
    }

    /// Whether any node below (or at) this one is a measurement.
    pub fn contains_measure(&self) -> bool {
        matches!(self.kind(), Kind::Measure { .. }) || self.subblocks().iter().any(|b| b.contains_measure())
    }

    /// Results of the last collapse performed by a measurement node.
    pub fn measure_result(&self) -> Option<MeasureOutcome> {
        match self.kind() {
            Kind::Measure { last, .. } => last.lock().expect("measure result lock").clone(),
            _ => None,
        }
    }
}

/// Builtin or registered constant gate by name.
pub fn gate(name: &str) -> Result<Block> {
    let def = gates::constant(name)?;
    Ok(Block::new(def.nqubits, Kind::Const(def)))
}

fn builtin(name: &str) -> Block {
    gate(name).expect("builtin gate")
}

pub fn x() -> Block {
    builtin("X")
}
pub fn y() -> Block {
    builtin("Y")
}
pub fn z() -> Block {
    builtin("Z")
}
pub fn h() -> Block {
    builtin("H")
}
pub fn i2() -> Block {
    builtin("I2")
}
pub fn s() -> Block {
    builtin("S")
}
pub fn t() -> Block {
    builtin("T")
}
pub fn swap() -> Block {
    builtin("SWAP")
}
pub fn cnot() -> Block {
    builtin("CNOT")
}

/// Rotation `exp(-i G θ/2)`. The generator must be hermitian and reflexive.
pub fn rot(generator: Block, theta: f64) -> Result<Block> {
    let p = generator.props()?;
    if !(p.is_hermitian() && p.is_reflexive()) {
        return Err(Error::validation("rotation generator must be hermitian and reflexive"));
    }
    Ok(Block::new(
        generator.nqubits(),
        Kind::Rotation {
            generator,
            theta: Param::new(theta),
        },
    ))
}

pub fn rx(theta: f64) -> Block {
    rot(x(), theta).expect("X is a valid generator")
}
pub fn ry(theta: f64) -> Block {
    rot(y(), theta).expect("Y is a valid generator")
}
pub fn rz(theta: f64) -> Block {
    rot(z(), theta).expect("Z is a valid generator")
}

pub fn shift(theta: f64) -> Block {
    Block::new(1, Kind::Shift { theta: Param::new(theta) })
}

pub fn phase(theta: f64) -> Block {
    Block::new(1, Kind::Phase { theta: Param::new(theta) })
}

/// `exp(-i H t)` for a hermitian `H`; `t` may be complex.
pub fn time_evolve(hamiltonian: Block, t: C64) -> Result<Block> {
    if !hamiltonian.is_hermitian()? {
        return Err(Error::validation("time evolution needs a hermitian Hamiltonian"));
    }
    Ok(Block::new(
        hamiltonian.nqubits(),
        Kind::TimeEvolution {
            hamiltonian,
            t: Param::new(t.re),
            t_im: t.im,
        },
    ))
}

/// Block with a fixed matrix.
pub fn matblock(matrix: MatrixRepr) -> Result<Block> {
    let n = matrix
        .nqubits()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::validation(format!("matrix dimension {} is not a power of two", matrix.dim())))?;
    let props = matrix.props();
    Ok(Block::new(
        n,
        Kind::GeneralMatrix {
            matrix: Arc::new(matrix),
            props,
        },
    ))
}

/// Node that collapses the register when applied.
pub fn measure_node(n: usize, seed: u64) -> Result<Block> {
    check_n(n)?;
    Ok(Block::new(
        n,
        Kind::Measure {
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
            last: Mutex::new(None),
        },
    ))
}

pub fn identity(n: usize) -> Result<Block> {
    check_n(n)?;
    Ok(Block::new(n, Kind::Identity))
}

pub fn chain(n: usize, children: Vec<Block>) -> Result<Block> {
    check_n(n)?;
    if let Some(b) = children.iter().find(|b| b.nqubits() != n) {
        return Err(Error::shape(format!("{}-qubit block in a {n}-qubit chain", b.nqubits())));
    }
    Ok(Block::new(n, Kind::Chain(children)))
}

pub fn put(n: usize, locs: &[usize], child: Block) -> Result<Block> {
    check_n(n)?;
    check_locs(n, locs, &mut 0)?;
    check_child(locs, &child)?;
    Ok(Block::new(n, Kind::Put { locs: locs.to_vec(), child }))
}

/// Control on `ctrl_locs` (all active-high).
pub fn control(n: usize, ctrl_locs: &[usize], locs: &[usize], child: Block) -> Result<Block> {
    control_with(n, ctrl_locs, &vec![1; ctrl_locs.len()], locs, child)
}

/// Control with explicit configuration: 1 control, 0 inverse control.
pub fn control_with(n: usize, ctrl_locs: &[usize], ctrl_config: &[u8], locs: &[usize], child: Block) -> Result<Block> {
    check_n(n)?;
    if ctrl_locs.len() != ctrl_config.len() {
        return Err(Error::validation("control locations and config differ in length"));
    }
    if ctrl_config.iter().any(|&c| c > 1) {
        return Err(Error::validation("control config entries must be 0 or 1"));
    }
    let mut used = 0;
    check_locs(n, ctrl_locs, &mut used)?;
    check_locs(n, locs, &mut used)?;
    check_child(locs, &child)?;
    Ok(Block::new(
        n,
        Kind::Control {
            ctrl_locs: ctrl_locs.to_vec(),
            ctrl_config: ctrl_config.to_vec(),
            locs: locs.to_vec(),
            child,
        },
    ))
}

/// Tensor product of blocks on disjoint locations.
pub fn kron(n: usize, items: Vec<(Vec<usize>, Block)>) -> Result<Block> {
    check_n(n)?;
    let mut used = 0;
    for (locs, b) in &items {
        check_locs(n, locs, &mut used)?;
        check_child(locs, b)?;
    }
    Ok(Block::new(n, Kind::Kron(items)))
}

/// `child` at each start location `l`, covering `l..l + child.nqubits()`.
pub fn repeat(n: usize, child: Block, locs: &[usize]) -> Result<Block> {
    check_n(n)?;
    let k = child.nqubits();
    let mut used = 0;
    for &l in locs {
        let span: Vec<usize> = (l..l + k).collect();
        check_locs(n, &span, &mut used)?;
    }
    Ok(Block::new(n, Kind::Repeat { locs: locs.to_vec(), child }))
}

/// Runs `child` on `locs` through focus/relax.
pub fn subroutine(n: usize, child: Block, locs: &[usize]) -> Result<Block> {
    check_n(n)?;
    check_locs(n, locs, &mut 0)?;
    check_child(locs, &child)?;
    Ok(Block::new(n, Kind::Subroutine { locs: locs.to_vec(), child }))
}

/// Sum of operators. An empty sum is representable but cannot be applied.
pub fn add(n: usize, children: Vec<Block>) -> Result<Block> {
    check_n(n)?;
    if let Some(b) = children.iter().find(|b| b.nqubits() != n) {
        return Err(Error::shape(format!("{}-qubit term in a {n}-qubit sum", b.nqubits())));
    }
    Ok(Block::new(n, Kind::Add(children)))
}

pub fn scale(factor: C64, child: Block) -> Result<Block> {
    Ok(Block::new(child.nqubits(), Kind::Scale { factor, child }))
}

/// Adjoint of a block, rewritten structurally where possible.
pub fn dagger(b: &Block) -> Block {
    b.adjoint()
}

pub fn cache(child: Block) -> Block {
    Block::new(
        child.nqubits(),
        Kind::Cached {
            child,
            slot: Mutex::new(None),
        },
    )
}

/// Hides the parameters of `child` from parameter collection and dispatch.
pub fn no_params(child: Block) -> Block {
    Block::new(child.nqubits(), Kind::NoParams(child))
}

/// Placeholder for the unitary-channel node, which is not implemented.
pub fn unitary_channel(_ops: Vec<Block>, _probs: Vec<f64>) -> Result<Block> {
    Err(Error::unsupported("unitary channels are not implemented"))
}
