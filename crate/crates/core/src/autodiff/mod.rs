//! Expectation values and their gradients.
//!
//! Reverse mode walks the circuit backwards, uncomputing the state as it
//! goes, so only the output state and its adjoint are kept alive whatever
//! the circuit depth. Adjoints follow the Wirtinger convention
//! `x̄ = ∂L/∂x*`, and parameter gradients are real.

mod backward;
mod matback;
mod mmd;
mod shift;

use crate::block::Block;
use crate::error::{Error, Result};
use crate::register::Register;

pub use backward::apply_back;
pub use matback::mat_back;
pub use mmd::{mmd_expect, mmd_grad, Kernel, MmdLoss, MmdMode};
pub use shift::{faithful_grad, sampled_expect, Shots};

/// A state together with the adjoint of the loss with respect to it.
#[derive(Debug, Clone)]
pub struct AdjointPair {
    pub state: Register,
    pub adjoint: Register,
}

impl AdjointPair {
    pub fn new(state: Register, adjoint: Register) -> Result<Self> {
        if state.nqubits() != adjoint.nqubits()
            || state.nbatch() != adjoint.nbatch()
            || state.nactive() != adjoint.nactive()
        {
            return Err(Error::shape("state and adjoint registers differ in shape"));
        }
        Ok(AdjointPair { state, adjoint })
    }
}

#[derive(Debug, Clone)]
pub struct GradResult {
    /// Adjoint of the input state.
    pub state_grad: Register,
    /// Gradient per circuit parameter, in `parameters()` order, summed over batches.
    pub param_grads: Vec<f64>,
}

fn check_observable(obs: &Block, reg: &Register) -> Result<()> {
    if obs.nqubits() != reg.nactive() {
        return Err(Error::shape(format!(
            "{}-qubit observable on {} active qubits",
            obs.nqubits(),
            reg.nactive()
        )));
    }
    if !obs.is_hermitian()? {
        return Err(Error::validation("observable is not hermitian"));
    }
    Ok(())
}

/// `O|ψ⟩` into a fresh register.
fn apply_observable(obs: &Block, reg: &Register) -> Result<Register> {
    let mut out = reg.clone();
    obs.apply_unchecked(&mut out)?;
    Ok(out)
}

/// `⟨ψ|O|ψ⟩` per batch.
pub fn expect(obs: &Block, reg: &Register) -> Result<Vec<f64>> {
    check_observable(obs, reg)?;
    let o = apply_observable(obs, reg)?;
    Ok(reg.inner(&o)?.into_iter().map(|z| z.re).collect())
}

/// Expectation on the output of `circuit` applied to `input`.
pub fn expect_circuit(obs: &Block, input: &Register, circuit: &Block) -> Result<Vec<f64>> {
    let mut reg = input.clone();
    circuit.apply(&mut reg)?;
    expect(obs, &reg)
}

/// Gradient of `Σ_b ⟨ψ_b|O|ψ_b⟩` with `|ψ⟩ = circuit(input)`.
pub fn expect_grad(obs: &Block, input: &Register, circuit: &Block) -> Result<GradResult> {
    let mut state = input.clone();
    circuit.apply(&mut state)?;
    check_observable(obs, &state)?;
    let adjoint = apply_observable(obs, &state)?;
    apply_back(AdjointPair { state, adjoint }, circuit)
}

#[cfg(test)]
mod tests;
