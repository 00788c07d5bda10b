use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_observable, expect};
use crate::block::{Block, Kind};
use crate::error::{Error, Result};
use crate::register::Register;

/// How expectation values are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    /// Sampled with this many shots per batch.
    Count(usize),
}

/// Uses of every parameter node, counting shared nodes and repeats once per
/// gate, and the nodes that sit under a control.
fn occurrences(b: &Block, times: usize, controlled: bool, out: &mut HashMap<usize, (usize, bool)>) {
    match b.kind() {
        Kind::NoParams(_) => {}
        Kind::Rotation { .. } | Kind::Shift { .. } | Kind::Phase { .. } | Kind::TimeEvolution { .. } => {
            let e = out.entry(b.id()).or_default();
            e.0 += times;
            e.1 |= controlled;
        }
        Kind::Repeat { locs, child } => occurrences(child, times * locs.len(), controlled, out),
        Kind::Control { child, .. } => occurrences(child, times, true, out),
        _ => b.subblocks().iter().for_each(|c| occurrences(c, times, controlled, out)),
    }
}

/// Parameter nodes of `circuit`, checked for the shift rule.
pub(crate) fn shiftable_params(circuit: &Block) -> Result<Vec<Block>> {
    let nodes = circuit.parameter_nodes();
    let mut occ = HashMap::new();
    occurrences(circuit, 1, false, &mut occ);
    for b in &nodes {
        if !matches!(b.kind(), Kind::Rotation { .. }) {
            return Err(Error::UnsupportedForShift(format!("`{}` is not a rotation", b.head())));
        }
        let (uses, controlled) = occ.get(&b.id()).copied().unwrap_or_default();
        if uses > 1 {
            return Err(Error::UnsupportedForShift(format!(
                "parameter of `{}` is shared by several gates",
                b.head()
            )));
        }
        if controlled {
            return Err(Error::UnsupportedForShift(format!(
                "controlled `{}` has a non-reflexive generator",
                b.head()
            )));
        }
    }
    Ok(nodes)
}

/// Parameter-shift gradient `½(⟨O⟩_{θ+π/2} - ⟨O⟩_{θ-π/2})` per parameter,
/// summed over batches. Only rotations about hermitian, reflexive
/// generators qualify; each must be used once and not under a control.
pub fn faithful_grad(obs: &Block, input: &Register, circuit: &Block, shots: Shots, seed: u64) -> Result<Vec<f64>> {
    let nodes = shiftable_params(circuit)?;
    check_observable(obs, input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eval = |rng: &mut ChaCha8Rng| -> Result<f64> {
        let mut reg = input.clone();
        circuit.apply(&mut reg)?;
        Ok(match shots {
            Shots::Exact => expect(obs, &reg)?.iter().sum(),
            Shots::Count(n) => sampled_expect(obs, &reg, n, rng)?.iter().sum(),
        })
    };
    let mut grads = Vec::with_capacity(nodes.len());
    for b in &nodes {
        let theta = b.param_value().expect("rotation has a parameter");
        b.set_param_value(theta + FRAC_PI_2)?;
        let plus = eval(&mut rng);
        b.set_param_value(theta - FRAC_PI_2)?;
        let minus = eval(&mut rng);
        b.set_param_value(theta)?;
        grads.push(0.5 * (plus? - minus?));
    }
    Ok(grads)
}

/// Estimate of `⟨ψ|O|ψ⟩` per batch from `nshots` samples in the eigenbasis
/// of `O`. Sums without a shared eigenbasis are sampled term by term.
pub fn sampled_expect(obs: &Block, reg: &Register, nshots: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    check_observable(obs, reg)?;
    sampled_inner(obs, reg, nshots, rng)
}

fn sampled_inner(obs: &Block, reg: &Register, nshots: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let basis = match obs.kind() {
        Kind::Add(_) | Kind::Scale { .. } => obs.eigenbasis().ok(),
        _ => Some(obs.eigenbasis()?),
    };
    let Some((e, u)) = basis else {
        return match obs.kind() {
            Kind::Add(terms) => {
                let mut acc = vec![0.0; reg.nbatch()];
                for t in terms {
                    for (a, v) in acc.iter_mut().zip(sampled_inner(t, reg, nshots, rng)?) {
                        *a += v;
                    }
                }
                Ok(acc)
            }
            Kind::Scale { factor, child } => Ok(sampled_inner(child, reg, nshots, rng)?
                .into_iter()
                .map(|v| factor.re * v)
                .collect()),
            _ => unreachable!("only sums and scales fall through"),
        };
    };
    let mut rotated = reg.clone();
    u.adjoint().apply_unchecked(&mut rotated)?;
    let diag = e.mat()?.diagonal();
    let out = rotated.measure(nshots, rng)?;
    Ok((0..reg.nbatch())
        .map(|b| {
            let s = out.batch(b);
            s.iter().map(|x| diag[x.value() as usize].re).sum::<f64>() / s.len().max(1) as f64
        })
        .collect())
}
