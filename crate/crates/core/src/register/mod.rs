//! Quantum registers and the instruction set acting on them.
//!
//! A [`Register`] stores `nbatch` states of `nqubits` qubits in one
//! column-major buffer with `2^nactive` rows and `2^(nqubits - nactive) * nbatch`
//! columns. Rows enumerate the active qubits, the remaining (environment)
//! qubits and then the batch index enumerate columns, the batch slowest.
//! Every batch state is therefore a contiguous slice of `2^nqubits`
//! amplitudes whose row index is the low `nactive` bits.

pub mod io;
pub(crate) mod kernel;

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bitstr::{ctrl_masks, BitStr};
use crate::error::{Error, Result};
use crate::matrix::MatrixRepr;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Default upper bound on register width.
pub const DEFAULT_QUBIT_CAP: usize = 30;

static QUBIT_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_QUBIT_CAP);

/// Current limit on the number of qubits a register may hold.
pub fn qubit_cap() -> usize {
    QUBIT_CAP.load(Ordering::Relaxed)
}

/// Changes the qubit limit for the whole process.
pub fn set_qubit_cap(cap: usize) {
    QUBIT_CAP.store(cap.min(crate::bitstr::MAX_BITS), Ordering::Relaxed);
}

fn check_size(n: usize, nbatch: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::validation("a register needs at least one qubit"));
    }
    if nbatch == 0 {
        return Err(Error::validation("batch size must be positive"));
    }
    if n > qubit_cap() {
        return Err(Error::Resource(format!(
            "{n} qubits exceed the cap of {}",
            qubit_cap()
        )));
    }
    Ok(())
}

/// Samples drawn from a register, grouped by batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureOutcome {
    pub samples: Vec<BitStr>,
    pub nbatch: usize,
}

impl MeasureOutcome {
    pub fn shots_per_batch(&self) -> usize {
        self.samples.len() / self.nbatch.max(1)
    }

    /// Samples of batch `b`.
    pub fn batch(&self, b: usize) -> &[BitStr] {
        let k = self.shots_per_batch();
        &self.samples[b * k..(b + 1) * k]
    }
}

#[derive(Debug, Clone, PartialEq)]
struct FocusFrame {
    order: Vec<usize>,
    prev_nactive: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    buf: Vec<C64>,
    nqubits: usize,
    nactive: usize,
    nbatch: usize,
    focus_stack: Vec<FocusFrame>,
}

impl Register {
    /// Wraps raw amplitudes; `data` holds `nbatch` consecutive states.
    pub fn from_vec(nqubits: usize, nbatch: usize, data: Vec<C64>) -> Result<Self> {
        check_size(nqubits, nbatch)?;
        if data.len() != nbatch << nqubits {
            return Err(Error::shape(format!(
                "{} amplitudes for {nbatch} states of {nqubits} qubits",
                data.len()
            )));
        }
        Ok(Register {
            buf: data,
            nqubits,
            nactive: nqubits,
            nbatch,
            focus_stack: Vec::new(),
        })
    }

    pub fn zero_state(n: usize, nbatch: usize) -> Result<Self> {
        check_size(n, nbatch)?;
        let mut buf = vec![ZERO; nbatch << n];
        for b in 0..nbatch {
            buf[b << n] = C64::new(1.0, 0.0);
        }
        Register::from_vec(n, nbatch, buf)
    }

    /// Normalized i.i.d. complex Gaussian amplitudes.
    pub fn rand_state(n: usize, nbatch: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Register::rand_state_with(n, nbatch, &mut rng)
    }

    pub fn rand_state_with<R: Rng + ?Sized>(n: usize, nbatch: usize, rng: &mut R) -> Result<Self> {
        check_size(n, nbatch)?;
        let buf = (0..nbatch << n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut reg = Register::from_vec(n, nbatch, buf)?;
        reg.normalize();
        Ok(reg)
    }

    pub fn product_state(bits: BitStr, nbatch: usize) -> Result<Self> {
        let n = bits.nbits();
        check_size(n, nbatch)?;
        let mut buf = vec![ZERO; nbatch << n];
        for b in 0..nbatch {
            buf[(b << n) + bits.value() as usize] = C64::new(1.0, 0.0);
        }
        Register::from_vec(n, nbatch, buf)
    }

    /// Register of the same shape holding zeros. Not a valid state; used for adjoints.
    pub fn zeros_like(&self) -> Register {
        Register {
            buf: vec![ZERO; self.buf.len()],
            ..self.clone_shape()
        }
    }

    fn clone_shape(&self) -> Register {
        Register {
            buf: Vec::new(),
            nqubits: self.nqubits,
            nactive: self.nactive,
            nbatch: self.nbatch,
            focus_stack: self.focus_stack.clone(),
        }
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn nactive(&self) -> usize {
        self.nactive
    }

    pub fn nremain(&self) -> usize {
        self.nqubits - self.nactive
    }

    pub fn nbatch(&self) -> usize {
        self.nbatch
    }

    /// Rows of the buffer viewed as a matrix.
    pub fn nrows(&self) -> usize {
        1 << self.nactive
    }

    pub fn ncols(&self) -> usize {
        self.buf.len() >> self.nactive
    }

    /// Whole buffer, column-major.
    pub fn state(&self) -> &[C64] {
        &self.buf
    }

    pub fn state_mut(&mut self) -> &mut [C64] {
        &mut self.buf
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.buf
    }

    /// Amplitudes of batch `b`.
    pub fn batch_state(&self, b: usize) -> &[C64] {
        let len = 1 << self.nqubits;
        &self.buf[b * len..(b + 1) * len]
    }

    pub fn batch_state_mut(&mut self, b: usize) -> &mut [C64] {
        let len = 1 << self.nqubits;
        &mut self.buf[b * len..(b + 1) * len]
    }

    /// Copies one batch into a fresh single-batch register.
    pub fn extract_batch(&self, b: usize) -> Result<Register> {
        if b >= self.nbatch {
            return Err(Error::Range {
                what: "batch",
                index: b,
                max: self.nbatch.saturating_sub(1),
            });
        }
        let mut r = Register::from_vec(self.nqubits, 1, self.batch_state(b).to_vec())?;
        r.nactive = self.nactive;
        Ok(r)
    }

    /// Stacks single-batch registers of equal shape into one batched register.
    pub fn stack(regs: &[Register]) -> Result<Register> {
        let first = regs.first().ok_or_else(|| Error::validation("nothing to stack"))?;
        let mut buf = Vec::with_capacity(first.buf.len() * regs.len());
        let mut nbatch = 0;
        for r in regs {
            if r.nqubits != first.nqubits || r.nactive != first.nactive {
                return Err(Error::shape("stacked registers differ in shape"));
            }
            buf.extend_from_slice(&r.buf);
            nbatch += r.nbatch;
        }
        let mut out = Register::from_vec(first.nqubits, nbatch, buf)?;
        out.nactive = first.nactive;
        Ok(out)
    }

    /// 2-norm of each batch state.
    pub fn norms(&self) -> Vec<f64> {
        self.buf
            .chunks(1 << self.nqubits)
            .map(|s| s.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    pub fn normalize(&mut self) {
        let norms = self.norms();
        for (s, n) in self.buf.chunks_mut(1 << self.nqubits).zip(norms) {
            if n > 0.0 {
                s.iter_mut().for_each(|a| *a /= n);
            }
        }
    }

    fn same_shape(&self, other: &Register) -> Result<()> {
        if self.nqubits != other.nqubits || self.nbatch != other.nbatch || self.nactive != other.nactive {
            return Err(Error::shape("registers differ in shape"));
        }
        Ok(())
    }

    /// `⟨self|other⟩` per batch.
    pub fn inner(&self, other: &Register) -> Result<Vec<C64>> {
        self.same_shape(other)?;
        let len = 1 << self.nqubits;
        Ok(self
            .buf
            .chunks(len)
            .zip(other.buf.chunks(len))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
            .collect())
    }

    /// `|⟨self|other⟩|` per batch.
    pub fn fidelity(&self, other: &Register) -> Result<Vec<f64>> {
        Ok(self.inner(other)?.into_iter().map(|z| z.norm()).collect())
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: C64, other: &Register) -> Result<()> {
        self.same_shape(other)?;
        for (a, b) in self.buf.iter_mut().zip(&other.buf) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: C64) {
        self.buf.iter_mut().for_each(|a| *a *= c);
    }

    /// Overwrites the amplitudes with those of `other` (same shape).
    pub fn copy_from(&mut self, other: &Register) -> Result<()> {
        self.same_shape(other)?;
        self.buf.copy_from_slice(&other.buf);
        Ok(())
    }

    /// Largest amplitude difference to `other`.
    pub fn max_abs_diff(&self, other: &Register) -> f64 {
        self.buf
            .iter()
            .zip(&other.buf)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_locs(&self, locs: &[usize], what: &'static str, used: &mut u64) -> Result<Vec<usize>> {
        locs.iter()
            .map(|&l| {
                if l == 0 || l > self.nactive {
                    return Err(Error::Range {
                        what,
                        index: l,
                        max: self.nactive,
                    });
                }
                let bit = 1u64 << (l - 1);
                if *used & bit != 0 {
                    return Err(Error::validation(format!("qubit {l} used twice in one instruction")));
                }
                *used |= bit;
                Ok(l - 1)
            })
            .collect()
    }

    /// Applies a gate matrix to 1-based `locs`, conditioned on the control
    /// qubits `ctrl_locs` having the values in `ctrl_config` (1 control,
    /// 0 inverse control). Every column is treated alike.
    pub fn instruct(
        &mut self,
        gate: &MatrixRepr,
        locs: &[usize],
        ctrl_locs: &[usize],
        ctrl_config: &[u8],
    ) -> Result<()> {
        if gate.dim() != 1 << locs.len() {
            return Err(Error::shape(format!(
                "{}x{0} gate on {} qubits",
                gate.dim(),
                locs.len()
            )));
        }
        if ctrl_locs.len() != ctrl_config.len() {
            return Err(Error::validation("control locations and config differ in length"));
        }
        let mut used = 0u64;
        let targets = self.check_locs(locs, "qubit", &mut used)?;
        let ctrls = self.check_locs(ctrl_locs, "control", &mut used)?;
        let (_, want) = ctrl_masks(ctrl_locs, ctrl_config)?;
        kernel::apply_matrix(&mut self.buf, self.nactive, gate, &targets, &ctrls, want as usize);
        Ok(())
    }

    /// Like [`Register::instruct`] with the gate looked up by name, e.g.
    /// `"X"`, `"CNOT"`, or `"Rx"` with one parameter.
    pub fn instruct_named(
        &mut self,
        name: &str,
        params: &[f64],
        locs: &[usize],
        ctrl_locs: &[usize],
        ctrl_config: &[u8],
    ) -> Result<()> {
        let m = crate::gates::gate_matrix(name, params)?;
        self.instruct(&m, locs, ctrl_locs, ctrl_config)
    }

    /// Probability of each active-qubit outcome in batch `b`, summed over
    /// environment columns.
    pub fn probs(&self, b: usize) -> Vec<f64> {
        let rows = self.nrows();
        let mut p = vec![0.0; rows];
        for col in self.batch_state(b).chunks(rows) {
            for (pi, a) in p.iter_mut().zip(col) {
                *pi += a.norm_sqr();
            }
        }
        p
    }

    fn sampler(&self, b: usize) -> Result<WeightedIndex<f64>> {
        let p = self.probs(b);
        let total: f64 = p.iter().sum();
        if !(total > 1e-300) {
            return Err(Error::Renormalization(total));
        }
        WeightedIndex::new(&p).map_err(|e| Error::validation(format!("invalid probabilities: {e}")))
    }

    /// Draws `nshots` samples per batch without touching the state.
    pub fn measure<R: Rng + ?Sized>(&self, nshots: usize, rng: &mut R) -> Result<MeasureOutcome> {
        if nshots == 0 {
            return Err(Error::validation("nshots must be positive"));
        }
        let mut samples = Vec::with_capacity(nshots * self.nbatch);
        for b in 0..self.nbatch {
            let dist = self.sampler(b)?;
            for _ in 0..nshots {
                samples.push(BitStr::new(dist.sample(rng) as u64, self.nactive)?);
            }
        }
        Ok(MeasureOutcome {
            samples,
            nbatch: self.nbatch,
        })
    }

    /// Samples one outcome per batch and projects each batch onto it.
    pub fn measure_collapse<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<MeasureOutcome> {
        let rows = self.nrows();
        let mut samples = Vec::with_capacity(self.nbatch);
        for b in 0..self.nbatch {
            let x = self.sampler(b)?.sample(rng);
            let p = self.probs(b)[x];
            if !(p > 1e-300) {
                return Err(Error::Renormalization(p));
            }
            let s = 1.0 / p.sqrt();
            for col in self.batch_state_mut(b).chunks_mut(rows) {
                for (i, a) in col.iter_mut().enumerate() {
                    *a = if i == x { *a * s } else { ZERO };
                }
            }
            samples.push(BitStr::new(x as u64, self.nactive)?);
        }
        Ok(MeasureOutcome {
            samples,
            nbatch: self.nbatch,
        })
    }

    /// Reorders qubits so that the current positions `from` (0-based) become
    /// `0..from.len()` in that order, the rest keeping their relative order.
    fn permute_qubits(&mut self, order: &[usize]) {
        let n = self.nqubits;
        let mut cur: Vec<usize> = (0..n).collect();
        for (k, &want) in order.iter().enumerate() {
            let p = cur.iter().position(|&q| q == want).expect("valid order");
            if p != k {
                kernel::swap_bits(&mut self.buf, n, k, p);
                cur.swap(k, p);
            }
        }
    }

    fn full_order(&self, locs0: &[usize]) -> Vec<usize> {
        let mut order = locs0.to_vec();
        order.extend((0..self.nqubits).filter(|q| !locs0.contains(q)));
        order
    }

    /// Activates `locs` (1-based, among the currently active qubits) in the
    /// given order; active qubit `k` becomes former qubit `locs[k]`.
    pub fn focus(&mut self, locs: &[usize]) -> Result<()> {
        let mut used = 0u64;
        let locs0 = self.check_locs(locs, "qubit", &mut used)?;
        if locs.is_empty() {
            return Err(Error::validation("focus needs at least one qubit"));
        }
        let order = self.full_order(&locs0);
        self.permute_qubits(&order);
        self.focus_stack.push(FocusFrame {
            order: locs0,
            prev_nactive: self.nactive,
        });
        self.nactive = locs.len();
        Ok(())
    }

    /// Undoes the matching [`Register::focus`] and sets `to_nactive` active qubits.
    pub fn relax(&mut self, locs: &[usize], to_nactive: usize) -> Result<()> {
        let frame = self
            .focus_stack
            .last()
            .ok_or_else(|| Error::validation("relax without a matching focus"))?;
        let locs0: Vec<usize> = locs.iter().map(|l| l.wrapping_sub(1)).collect();
        if locs0 != frame.order {
            return Err(Error::validation(format!(
                "relax locations {locs:?} do not match the focused {:?}",
                frame.order.iter().map(|l| l + 1).collect::<Vec<_>>()
            )));
        }
        if to_nactive != frame.prev_nactive {
            return Err(Error::validation(format!(
                "relax to {to_nactive} active qubits, but focus started from {}",
                frame.prev_nactive
            )));
        }
        let order = self.full_order(&frame.order);
        let mut inverse = vec![0; order.len()];
        for (k, &q) in order.iter().enumerate() {
            inverse[q] = k;
        }
        self.permute_qubits(&inverse);
        self.focus_stack.pop();
        self.nactive = to_nactive;
        Ok(())
    }
}

#[cfg(test)]
mod tests;
