//! Standard circuits and Hamiltonians, and small drivers built on them.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::autodiff::{apply_back, expect_grad, AdjointPair};
use crate::block::{self, Block};
use crate::error::{Error, Result};
use crate::matrix::MatrixRepr;
use crate::register::Register;
use crate::C64;

fn cphase(n: usize, i: usize, j: usize) -> Block {
    block::control(n, &[i], &[j], block::shift(2.0 * PI / (1u64 << (i - j + 1)) as f64)).expect("valid cphase")
}

fn hcphases(n: usize, i: usize) -> Block {
    let mut c = vec![block::put(n, &[i], block::h()).expect("valid put")];
    c.extend((i + 1..=n).map(|j| cphase(n, j, i)));
    block::chain(n, c).expect("valid chain")
}

/// Quantum Fourier transform as a chain of Hadamard/controlled-phase
/// layers. The output comes out in bit-reversed order.
pub fn qft(n: usize) -> Result<Block> {
    if n == 0 {
        return Err(Error::validation("qft needs at least one qubit"));
    }
    block::chain(n, (1..=n).map(|i| hcphases(n, i)).collect())
}

/// What [`qft`] does, computed with an FFT: the amplitudes of each column
/// are put in bit-reversed order and inverse-transformed with a `1/√N`
/// normalization.
pub fn qft_fft_apply(reg: &mut Register) -> Result<()> {
    let n = reg.nactive();
    let dim = 1usize << n;
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(dim);
    let norm = 1.0 / (dim as f64).sqrt();
    let mut tmp = vec![C64::new(0.0, 0.0); dim];
    for col in reg.state_mut().chunks_mut(dim) {
        for (i, a) in col.iter().enumerate() {
            tmp[reverse_bits(i, n)] = *a;
        }
        fft.process(&mut tmp);
        for (c, t) in col.iter_mut().zip(&tmp) {
            *c = t * norm;
        }
    }
    Ok(())
}

fn reverse_bits(i: usize, n: usize) -> usize {
    if n == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS as usize - n)
    }
}

/// Open-chain Heisenberg model `Σ_i X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}`.
pub fn heisenberg(n: usize) -> Result<Block> {
    if n < 2 {
        return Err(Error::validation("heisenberg needs at least two sites"));
    }
    let bond = |i: usize| -> Result<Block> {
        let terms = [block::x(), block::y(), block::z()]
            .into_iter()
            .map(|g| block::chain(n, vec![block::put(n, &[i], g.clone())?, block::put(n, &[i + 1], g)?]))
            .collect::<Result<Vec<_>>>()?;
        block::add(n, terms)
    };
    block::add(n, (1..n).map(bond).collect::<Result<Vec<_>>>()?)
}

/// `Rz Rx Rz` on one qubit, all angles zero.
fn rotor() -> Block {
    block::chain(1, vec![block::rz(0.0), block::rx(0.0), block::rz(0.0)]).expect("valid rotor")
}

/// Hardware-efficient ansatz: an `Rx` layer, then `depth` times a CNOT
/// ring (control `i`, target `i mod n + 1`) followed by `Rz Rx Rz` on every
/// qubit. All angles start at zero.
pub fn variational_circuit(n: usize, depth: usize) -> Result<Block> {
    if n < 2 || depth == 0 {
        return Err(Error::validation("variational circuit needs n ≥ 2 and depth ≥ 1"));
    }
    let mut layers = Vec::with_capacity(2 * depth + 1);
    layers.push(block::chain(n, (1..=n).map(|i| block::put(n, &[i], block::rx(0.0))).collect::<Result<_>>()?)?);
    for _ in 0..depth {
        let ring = (1..=n)
            .map(|i| block::control(n, &[i], &[i % n + 1], block::x()))
            .collect::<Result<_>>()?;
        layers.push(block::chain(n, ring)?);
        layers.push(block::chain(n, (1..=n).map(|i| block::put(n, &[i], rotor())).collect::<Result<_>>()?)?);
    }
    block::chain(n, layers)
}

/// Plain gradient descent on `⟨heisenberg(n)⟩` over a randomly initialized
/// [`variational_circuit`]. Entry `k` of the trace is the energy after
/// step `k + 1`; with zero iterations the trace holds the initial energy.
pub fn vqe_run(n: usize, depth: usize, iters: usize, lr: f64, seed: u64) -> Result<Vec<f64>> {
    let h = heisenberg(n)?;
    let circuit = variational_circuit(n, depth)?;
    circuit.dispatch_random(&mut ChaCha8Rng::seed_from_u64(seed));
    let input = Register::zero_state(n, 1)?;
    let energy = || -> Result<f64> { Ok(crate::autodiff::expect_circuit(&h, &input, &circuit)?[0]) };
    if iters == 0 {
        return Ok(vec![energy()?]);
    }
    let mut trace = Vec::with_capacity(iters);
    for k in 0..iters {
        let g = expect_grad(&h, &input, &circuit)?.param_grads;
        circuit.dispatch_with(|theta, gk| theta - lr * gk, &g)?;
        let e = energy()?;
        log::debug!("vqe step {k}: energy {e}");
        trace.push(e);
    }
    Ok(trace)
}

fn matrix_power_of_two(u: &MatrixRepr, k: usize) -> Result<MatrixRepr> {
    let mut m = u.clone();
    for _ in 0..k {
        m = m.mul(&m)?;
    }
    Ok(m)
}

/// Phase estimation of an `m`-qubit unitary with an `n`-qubit readout
/// register on qubits `1..=n`.
pub fn phase_estimation(n: usize, m: usize, u: &MatrixRepr) -> Result<Block> {
    if u.dim() != 1 << m {
        return Err(Error::shape(format!("{0}x{0} matrix for {m} qubits", u.dim())));
    }
    if !u.props().is_unitary() {
        return Err(Error::validation("phase estimation needs a unitary"));
    }
    let total = n + m;
    let targets: Vec<usize> = (n + 1..=total).collect();
    let controlled = (1..=n)
        .map(|k| block::control(total, &[k], &targets, block::matblock(matrix_power_of_two(u, k - 1)?)?))
        .collect::<Result<Vec<_>>>()?;
    let readout: Vec<usize> = (1..=n).collect();
    block::chain(
        total,
        vec![
            block::repeat(total, block::h(), &readout)?,
            block::chain(total, controlled)?,
            block::subroutine(total, qft(n)?.adjoint(), &readout)?,
        ],
    )
}

/// Phase in `[0, 1)` encoded by the readout value of [`phase_estimation`]
/// (the low `n` bits of a measured basis index).
pub fn phase_from_readout(value: u64, n: usize) -> f64 {
    reverse_bits((value & ((1u64 << n) - 1)) as usize, n) as f64 / (1u64 << n) as f64
}

fn cnot9(ctrls: &[usize], target: usize) -> Block {
    block::control(9, ctrls, &[target], block::x()).expect("valid cnot")
}

/// Shor's nine-qubit code: encode, apply `error`, decode.
pub fn shor9(error: Block) -> Result<Block> {
    if error.nqubits() != 9 {
        return Err(Error::shape("the error must act on 9 qubits"));
    }
    let hs = || [1, 4, 7].map(|q| block::put(9, &[q], block::h()).expect("valid put"));
    let mut c = vec![cnot9(&[1], 4), cnot9(&[1], 7)];
    c.extend(hs());
    for (a, b, d) in [(1, 2, 3), (4, 5, 6), (7, 8, 9)] {
        c.push(cnot9(&[a], b));
        c.push(cnot9(&[a], d));
    }
    c.push(error);
    for (a, b, d) in [(1, 2, 3), (4, 5, 6), (7, 8, 9)] {
        c.push(cnot9(&[a], b));
        c.push(cnot9(&[a], d));
        c.push(cnot9(&[b, d], a));
    }
    c.extend(hs());
    c.extend([cnot9(&[1], 4), cnot9(&[1], 7), cnot9(&[4, 7], 1)]);
    block::chain(9, c)
}

/// Runs [`shor9`] on `α|0⟩ + β|1⟩` (qubit 1, eight zero ancillas) and
/// returns the fidelity `⟨ψ|ρ|ψ⟩` of qubit 1's reduced state.
pub fn shor9_check(alpha: C64, beta: C64, error: Block) -> Result<f64> {
    if ((alpha.norm_sqr() + beta.norm_sqr()) - 1.0).abs() > 1e-10 {
        return Err(Error::validation("input qubit state is not normalized"));
    }
    let mut data = vec![C64::new(0.0, 0.0); 1 << 9];
    data[0] = alpha;
    data[1] = beta;
    let mut reg = Register::from_vec(9, 1, data)?;
    shor9(error)?.apply(&mut reg)?;
    let s = reg.state();
    // ρ[a][b] = Σ_env s[env | a] conj(s[env | b])
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for env in 0..1usize << 8 {
        let amp = [s[env << 1], s[(env << 1) | 1]];
        for a in 0..2 {
            for b in 0..2 {
                rho[a][b] += amp[a] * amp[b].conj();
            }
        }
    }
    let psi = [alpha, beta];
    let mut f = C64::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            f += psi[a].conj() * rho[a][b] * psi[b];
        }
    }
    Ok(f.re)
}

fn u2() -> Block {
    block::chain(1, vec![block::rz(0.0), block::ry(0.0), block::rz(0.0)]).expect("valid U2")
}

/// Two-qubit ansatz with 15 rotation angles and 3 CNOTs, enough for any
/// gate in U(4) up to a global phase.
pub fn general_u4() -> Block {
    let p = |q: usize, b: Block| block::put(2, &[q], b).expect("valid put");
    let cx = |c: usize, t: usize| block::control(2, &[c], &[t], block::x()).expect("valid cnot");
    block::chain(
        2,
        vec![
            p(1, u2()),
            p(2, u2()),
            cx(2, 1),
            p(1, block::rz(0.0)),
            p(2, block::ry(0.0)),
            cx(1, 2),
            p(2, block::ry(0.0)),
            cx(2, 1),
            p(1, u2()),
            p(2, u2()),
        ],
    )
    .expect("valid ansatz")
}

/// `|Tr(A† B)| / d`
pub fn operator_fidelity(a: &MatrixRepr, b: &MatrixRepr) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::shape("operators differ in size"));
    }
    let mut tr = C64::new(0.0, 0.0);
    a.for_each_entry(|i, j, v| tr += v.conj() * b.get(i, j));
    Ok(tr.norm() / a.dim() as f64)
}

/// Haar-random `dim × dim` unitary: QR of a complex Gaussian matrix with
/// the phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut impl rand::Rng) -> MatrixRepr {
    let g = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
        C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() == 0.0 { C64::new(1.0, 0.0) } else { d / d.norm() };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    MatrixRepr::Dense(q)
}

/// Step size of plain gradient ascent in [`learn_gate`].
pub const DEFAULT_LEARN_LR: f64 = 0.05;

/// Step size of [`Ascent::Adam`].
pub const DEFAULT_ADAM_LR: f64 = 0.1;

/// Update rule for [`learn_gate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ascent {
    /// `θ ← θ + lr ∇F`
    Plain { lr: f64 },
    /// Adam with β₁ = 0.9, β₂ = 0.999, ε = 1e-8.
    Adam { lr: f64 },
}

#[derive(Debug, Clone)]
pub struct LearnReport {
    pub initial_fidelity: f64,
    pub final_fidelity: f64,
    pub iterations: usize,
    pub learned: Block,
    /// Fidelity after each step.
    pub history: Vec<f64>,
}

/// Fidelity of `target` with `circuit` and its parameter gradient. The
/// circuit runs on the batch of all basis states, so the output columns
/// are `V|j⟩` and `Tr(U†V) = Σ_j ⟨U j|V j⟩`.
pub fn fidelity_grad(target: &MatrixRepr, circuit: &Block) -> Result<(f64, Vec<f64>)> {
    let n = circuit.nqubits();
    let dim = 1usize << n;
    if target.dim() != dim {
        return Err(Error::shape("target and circuit differ in size"));
    }
    let mut basis = vec![C64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        basis[j * dim + j] = C64::new(1.0, 0.0);
    }
    let mut state = Register::from_vec(n, dim, basis)?;
    circuit.apply(&mut state)?;
    let dense = target.to_dense();
    let mut tr = C64::new(0.0, 0.0);
    for j in 0..dim {
        let col = state.batch_state(j);
        for i in 0..dim {
            tr += dense[(i, j)].conj() * col[i];
        }
    }
    let abs = tr.norm();
    let f = abs / dim as f64;
    if abs == 0.0 {
        return Ok((0.0, vec![0.0; circuit.nparameters()]));
    }
    // ψ̄_j = T U|j⟩ / (2 |T| d)
    let c = tr / (2.0 * abs * dim as f64);
    let mut adj = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        adj.extend((0..dim).map(|i| dense[(i, j)] * c));
    }
    let adjoint = Register::from_vec(n, dim, adj)?;
    let g = apply_back(AdjointPair::new(state, adjoint)?, circuit)?.param_grads;
    Ok((f, g))
}

/// Plain gradient ascent of [`operator_fidelity`] between `target` and
/// [`general_u4`]; see [`learn_gate_with`].
pub fn learn_gate(target: &MatrixRepr, iters: usize, lr: f64, seed: u64) -> Result<LearnReport> {
    learn_gate_with(target, iters, Ascent::Plain { lr }, seed)
}

/// Maximizes [`operator_fidelity`] between `target` and [`general_u4`],
/// starting from angles drawn uniformly with `seed`. Stops early once the
/// fidelity is within 1e-12 of one.
pub fn learn_gate_with(target: &MatrixRepr, iters: usize, ascent: Ascent, seed: u64) -> Result<LearnReport> {
    if target.dim() != 4 {
        return Err(Error::shape("learn_gate expects a 4x4 target"));
    }
    if !target.props().is_unitary() {
        return Err(Error::validation("learn_gate needs a unitary target"));
    }
    let ansatz = general_u4();
    ansatz.dispatch_random(&mut ChaCha8Rng::seed_from_u64(seed));
    let np = ansatz.nparameters();
    let (mut m, mut v) = (vec![0.0; np], vec![0.0; np]);
    let (initial, mut grad) = fidelity_grad(target, &ansatz)?;
    let mut f = initial;
    let mut history = Vec::with_capacity(iters);
    let mut done = 0;
    while done < iters && f < 1.0 - 1e-12 {
        done += 1;
        match ascent {
            Ascent::Plain { lr } => ansatz.dispatch_with(|theta, g| theta + lr * g, &grad)?,
            Ascent::Adam { lr } => {
                let (b1, b2) = (0.9f64, 0.999f64);
                let (c1, c2) = (1.0 - b1.powi(done as i32), 1.0 - b2.powi(done as i32));
                let step: Vec<f64> = (0..np)
                    .map(|i| {
                        m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
                        v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
                        (m[i] / c1) / ((v[i] / c2).sqrt() + 1e-8)
                    })
                    .collect();
                ansatz.dispatch_with(|theta, s| theta + lr * s, &step)?
            }
        }
        (f, grad) = fidelity_grad(target, &ansatz)?;
        history.push(f);
    }
    Ok(LearnReport {
        initial_fidelity: initial,
        final_fidelity: f,
        iterations: done,
        learned: ansatz,
        history,
    })
}
