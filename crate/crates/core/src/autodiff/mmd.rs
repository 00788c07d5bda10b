use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use super::shift::shiftable_params;
use super::{apply_back, AdjointPair};
use crate::block::Block;
use crate::error::{Error, Result};
use crate::register::Register;
use crate::C64;

/// Symmetric kernel on basis indices.
#[derive(Clone)]
pub enum Kernel {
    /// `Σ_σ exp(-(x-y)² / 2σ²)`
    RbfMixture(Vec<f64>),
    Custom(Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>),
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::RbfMixture(vec![2.0])
    }
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::RbfMixture(s) => f.debug_tuple("RbfMixture").field(s).finish(),
            Kernel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Kernel {
    pub fn eval(&self, x: usize, y: usize) -> f64 {
        match self {
            Kernel::RbfMixture(sigmas) => {
                let d = x.abs_diff(y) as f64;
                sigmas.iter().map(|s| (-d * d / (2.0 * s * s)).exp()).sum()
            }
            Kernel::Custom(k) => k(x, y),
        }
    }

    /// `K v`
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        match self {
            Kernel::RbfMixture(_) => {
                let table: Vec<f64> = (0..n).map(|d| self.eval(0, d)).collect();
                (0..n)
                    .map(|x| v.iter().enumerate().map(|(y, vy)| table[x.abs_diff(y)] * vy).sum())
                    .collect()
            }
            Kernel::Custom(_) => (0..n)
                .map(|x| v.iter().enumerate().map(|(y, vy)| self.eval(x, y) * vy).sum())
                .collect(),
        }
    }
}

/// Squared maximum mean discrepancy between the circuit's output
/// distribution and a fixed target.
#[derive(Debug, Clone)]
pub struct MmdLoss {
    pub kernel: Kernel,
    pub target: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmdMode {
    Reverse,
    Shift,
}

impl MmdLoss {
    pub fn new(kernel: Kernel, target: Vec<f64>) -> Result<Self> {
        let total: f64 = target.iter().sum();
        if (total - 1.0).abs() > 1e-12 || target.iter().any(|&p| p < 0.0) {
            return Err(Error::validation("target must be a probability vector"));
        }
        if !target.len().is_power_of_two() {
            return Err(Error::shape("target length is not a power of two"));
        }
        Ok(MmdLoss { kernel, target })
    }

    fn check(&self, reg: &Register) -> Result<()> {
        if reg.nactive() != reg.nqubits() || 1usize << reg.nqubits() != self.target.len() {
            return Err(Error::shape(format!(
                "distribution over {} qubits against a target of length {}",
                reg.nactive(),
                self.target.len()
            )));
        }
        Ok(())
    }

    /// `(p - q)ᵀ K (p - q)`
    pub fn value(&self, p: &[f64]) -> f64 {
        let d: Vec<f64> = p.iter().zip(&self.target).map(|(a, b)| a - b).collect();
        self.kernel.apply(&d).iter().zip(&d).map(|(a, b)| a * b).sum()
    }
}

fn output(input: &Register, circuit: &Block) -> Result<Register> {
    let mut reg = input.clone();
    circuit.apply(&mut reg)?;
    Ok(reg)
}

/// MMD loss per batch.
pub fn mmd_expect(loss: &MmdLoss, input: &Register, circuit: &Block) -> Result<Vec<f64>> {
    let reg = output(input, circuit)?;
    loss.check(&reg)?;
    Ok((0..reg.nbatch()).map(|b| loss.value(&reg.probs(b))).collect())
}

/// Gradient of the batch-summed MMD loss.
pub fn mmd_grad(loss: &MmdLoss, input: &Register, circuit: &Block, mode: MmdMode) -> Result<Vec<f64>> {
    let reg = output(input, circuit)?;
    loss.check(&reg)?;
    match mode {
        MmdMode::Reverse => {
            let mut adj = Vec::with_capacity(reg.state().len());
            for b in 0..reg.nbatch() {
                let p = reg.probs(b);
                let d: Vec<f64> = p.iter().zip(&loss.target).map(|(a, t)| a - t).collect();
                let kd = loss.kernel.apply(&d);
                adj.extend(reg.batch_state(b).iter().zip(&kd).map(|(psi, k)| psi * C64::new(2.0 * k, 0.0)));
            }
            let adjoint = Register::from_vec(reg.nqubits(), reg.nbatch(), adj)?;
            Ok(apply_back(AdjointPair::new(reg, adjoint)?, circuit)?.param_grads)
        }
        MmdMode::Shift => {
            let nodes = shiftable_params(circuit)?;
            let kd: Vec<Vec<f64>> = (0..reg.nbatch())
                .map(|b| {
                    let d: Vec<f64> = reg.probs(b).iter().zip(&loss.target).map(|(a, t)| a - t).collect();
                    loss.kernel.apply(&d)
                })
                .collect();
            let mut grads = Vec::with_capacity(nodes.len());
            for node in &nodes {
                let theta = node.param_value().expect("rotation has a parameter");
                node.set_param_value(theta + FRAC_PI_2)?;
                let plus = output(input, circuit);
                node.set_param_value(theta - FRAC_PI_2)?;
                let minus = output(input, circuit);
                node.set_param_value(theta)?;
                let (plus, minus) = (plus?, minus?);
                let mut g = 0.0;
                for (b, kdb) in kd.iter().enumerate() {
                    let (pp, pm) = (plus.probs(b), minus.probs(b));
                    g += pp.iter().zip(&pm).zip(kdb).map(|((a, m), k)| (a - m) * k).sum::<f64>();
                }
                grads.push(g);
            }
            Ok(grads)
        }
    }
}
