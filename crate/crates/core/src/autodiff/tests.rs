use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::block::*;
use crate::matrix::MatrixRepr;
use crate::C64;

fn zero(n: usize) -> Register {
    Register::zero_state(n, 1).unwrap()
}

fn pauli_sum(n: usize, terms: &[&[(usize, Block)]]) -> Block {
    add(
        n,
        terms
            .iter()
            .map(|t| chain(n, t.iter().map(|(q, g)| put(n, &[*q], g.clone()).unwrap()).collect()).unwrap())
            .collect(),
    )
    .unwrap()
}

fn obs3() -> Block {
    pauli_sum(3, &[&[(1, z()), (2, z())], &[(2, x()), (3, x())], &[(3, y())], &[(1, x())]])
}

/// Rotations under put, control, kron, repeat, subroutine and dagger.
fn mixed_circuit(seed: u64) -> Block {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = || rng.random_range(0.0..2.0 * PI);
    let inner = chain(2, vec![put(2, &[1], ry(a())).unwrap(), cnot(), put(2, &[2], rz(a())).unwrap()]).unwrap();
    chain(
        3,
        vec![
            repeat(3, rx(a()), &[1, 2, 3]).unwrap(),
            control(3, &[1], &[2], ry(a())).unwrap(),
            control_with(3, &[3], &[0], &[1, 2], inner.clone()).unwrap(),
            kron(3, vec![(vec![1], rz(a())), (vec![3], rx(a()))]).unwrap(),
            subroutine(3, chain(2, vec![put(2, &[2], rx(a())).unwrap(), cnot()]).unwrap(), &[3, 1]).unwrap(),
            put(3, &[2, 3], inner).unwrap().adjoint(),
            put(3, &[2], rot(x(), a()).unwrap()).unwrap(),
            dagger(&put(3, &[1], rot(y(), a()).unwrap()).unwrap()),
        ],
    )
    .unwrap()
}

/// Every rotation used once and never under a control.
fn shiftable_circuit(seed: u64) -> Block {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = || rng.random_range(0.0..2.0 * PI);
    chain(
        3,
        vec![
            kron(3, vec![(vec![1], rx(a())), (vec![2], ry(a())), (vec![3], rx(a()))]).unwrap(),
            control(3, &[1], &[2], x()).unwrap(),
            subroutine(3, chain(2, vec![put(2, &[2], rx(a())).unwrap(), cnot()]).unwrap(), &[3, 1]).unwrap(),
            put(3, &[2, 3], chain(2, vec![put(2, &[1], rz(a())).unwrap(), cnot(), put(2, &[2], ry(a())).unwrap()]).unwrap())
                .unwrap()
                .adjoint(),
            dagger(&put(3, &[1], rot(y(), a()).unwrap()).unwrap()),
            control(3, &[3], &[1], z()).unwrap(),
            put(3, &[2], rot(x(), a()).unwrap()).unwrap(),
        ],
    )
    .unwrap()
}

fn finite_diff(obs: &Block, input: &Register, circuit: &Block, eps: f64) -> Vec<f64> {
    let p0 = circuit.parameters();
    let mut g = Vec::new();
    for k in 0..p0.len() {
        let mut p = p0.clone();
        p[k] += eps;
        circuit.dispatch(&p).unwrap();
        let plus: f64 = expect_circuit(obs, input, circuit).unwrap().iter().sum();
        p[k] -= 2.0 * eps;
        circuit.dispatch(&p).unwrap();
        let minus: f64 = expect_circuit(obs, input, circuit).unwrap().iter().sum();
        g.push((plus - minus) / (2.0 * eps));
    }
    circuit.dispatch(&p0).unwrap();
    g
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn expectation_examples() {
    assert!((expect(&z(), &zero(1)).unwrap()[0] - 1.0).abs() < 1e-14);
    let e = expect_circuit(&z(), &zero(1), &rx(0.4)).unwrap()[0];
    assert!((e - 0.4f64.cos()).abs() < 1e-14);
    assert!((e - 0.921061).abs() < 1e-6);
    let h2 = pauli_sum(2, &[&[(1, x()), (2, x())], &[(1, y()), (2, y())], &[(1, z()), (2, z())]]);
    assert!((expect(&h2, &zero(2)).unwrap()[0] - 1.0).abs() < 1e-14);
    let bad = matblock(MatrixRepr::Diagonal(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)])).unwrap();
    assert!(matches!(expect(&bad, &zero(1)), Err(crate::Error::Validation(_))));
}

#[test]
fn single_rotation_gradient() {
    let g = expect_grad(&z(), &zero(1), &rx(0.4)).unwrap();
    assert!((g.param_grads[0] + 0.4f64.sin()).abs() < 1e-14);
    assert!((g.param_grads[0] + 0.389418).abs() < 1e-6);
    let f = faithful_grad(&z(), &zero(1), &rx(PI / 2.0), Shots::Exact, 0).unwrap();
    assert!((f[0] + 1.0).abs() < 1e-14);
    let f = faithful_grad(&z(), &zero(1), &rx(0.0), Shots::Exact, 0).unwrap();
    assert!(f[0].abs() < 1e-14);
}

#[test]
fn backward_uncomputes_and_is_linear() {
    let c = mixed_circuit(1);
    let input = Register::rand_state(3, 2, 4).unwrap();
    let mut out = input.clone();
    c.apply(&mut out).unwrap();
    let zero_adj = out.zeros_like();
    let ap = AdjointPair::new(out.clone(), zero_adj).unwrap();
    let r = apply_back(ap, &c).unwrap();
    assert!(r.param_grads.iter().all(|&g| g == 0.0));
    assert!(r.state_grad.state().iter().all(|a| a.norm() == 0.0));

    // the uncomputed state is observable through the input adjoint: with
    // adjoint = output, backward returns the input state
    let r = apply_back(AdjointPair::new(out.clone(), out).unwrap(), &c).unwrap();
    assert!(r.state_grad.max_abs_diff(&input) < 1e-12);
}

#[test]
fn reverse_matches_shift_and_finite_difference() {
    let obs = obs3();
    for seed in 0..5 {
        let c = mixed_circuit(seed);
        let input = Register::rand_state(3, 1, 100 + seed).unwrap();
        let rev = expect_grad(&obs, &input, &c).unwrap().param_grads;
        assert!(max_diff(&rev, &finite_diff(&obs, &input, &c, 1e-5)) < 1e-7, "seed {seed}");
        assert!(matches!(
            faithful_grad(&obs, &input, &c, Shots::Exact, 0),
            Err(crate::Error::UnsupportedForShift(_))
        ));

        let c = shiftable_circuit(seed);
        let rev = expect_grad(&obs, &input, &c).unwrap().param_grads;
        let shift = faithful_grad(&obs, &input, &c, Shots::Exact, 0).unwrap();
        assert!(max_diff(&rev, &shift) < 1e-10, "seed {seed}");
        assert!(max_diff(&rev, &finite_diff(&obs, &input, &c, 1e-5)) < 1e-7, "seed {seed}");
    }
}

#[test]
fn shift_and_phase_gradients_in_reverse_mode() {
    let c = chain(
        2,
        vec![
            repeat(2, h(), &[1, 2]).unwrap(),
            control(2, &[1], &[2], shift(0.7)).unwrap(),
            put(2, &[1], phase(0.3)).unwrap(),
            put(2, &[2], shift(-1.1)).unwrap().adjoint(),
            repeat(2, h(), &[1, 2]).unwrap(),
        ],
    )
    .unwrap();
    let obs = pauli_sum(2, &[&[(1, z())], &[(1, x()), (2, y())]]);
    let input = Register::rand_state(2, 1, 3).unwrap();
    let rev = expect_grad(&obs, &input, &c).unwrap().param_grads;
    assert!(max_diff(&rev, &finite_diff(&obs, &input, &c, 1e-5)) < 1e-7);
    assert!(matches!(
        faithful_grad(&obs, &input, &c, Shots::Exact, 0),
        Err(crate::Error::UnsupportedForShift(_))
    ));
}

#[test]
fn time_evolution_gradient() {
    let h = pauli_sum(3, &[&[(1, x()), (2, x())], &[(2, z()), (3, z())], &[(3, y())]]);
    let c = chain(3, vec![repeat(3, ry(0.3), &[1, 2, 3]).unwrap(), time_evolve(h, C64::new(0.8, 0.0)).unwrap()]).unwrap();
    let obs = obs3();
    let rev = expect_grad(&obs, &zero(3), &c).unwrap().param_grads;
    assert_eq!(rev.len(), 2);
    assert!(max_diff(&rev, &finite_diff(&obs, &zero(3), &c, 1e-5)) < 1e-7);
}

#[test]
fn large_generator_gradient() {
    let n = 8;
    let g = kron(n, (1..=n).map(|q| (vec![q], if q % 2 == 0 { x() } else { z() })).collect()).unwrap();
    let c = chain(n, vec![repeat(n, h(), &(1..=n).collect::<Vec<_>>()).unwrap(), rot(g, 0.9).unwrap()]).unwrap();
    let obs = pauli_sum(n, &[&[(1, y())], &[(2, x()), (5, y())]]);
    let input = Register::rand_state(n, 1, 8).unwrap();
    let rev = expect_grad(&obs, &input, &c).unwrap().param_grads;
    assert!(max_diff(&rev, &finite_diff(&obs, &input, &c, 1e-5)) < 1e-7);
}

#[test]
fn shared_parameters_accumulate() {
    let r = rx(0.5);
    let c = chain(2, vec![put(2, &[1], r.clone()).unwrap(), cnot(), put(2, &[2], r.clone()).unwrap()]).unwrap();
    let obs = pauli_sum(2, &[&[(1, z()), (2, z())], &[(2, y())]]);
    let rev = expect_grad(&obs, &zero(2), &c).unwrap().param_grads;
    assert_eq!(rev.len(), 1);
    assert!(max_diff(&rev, &finite_diff(&obs, &zero(2), &c, 1e-5)) < 1e-7);
    assert!(matches!(
        faithful_grad(&obs, &zero(2), &c, Shots::Exact, 0),
        Err(crate::Error::UnsupportedForShift(_))
    ));
}

#[test]
fn batched_gradients_sum() {
    let c = mixed_circuit(9);
    let obs = obs3();
    let input = Register::rand_state(3, 4, 2).unwrap();
    let total = expect_grad(&obs, &input, &c).unwrap().param_grads;
    let mut acc = vec![0.0; total.len()];
    for b in 0..4 {
        let g = expect_grad(&obs, &input.extract_batch(b).unwrap(), &c).unwrap().param_grads;
        acc.iter_mut().zip(g).for_each(|(a, x)| *a += x);
    }
    assert!(max_diff(&total, &acc) < 1e-12);
}

#[test]
fn non_invertible_nodes_are_rejected() {
    let c = chain(1, vec![rx(0.1), measure_node(1, 0).unwrap()]).unwrap();
    assert!(matches!(expect_grad(&z(), &zero(1), &c), Err(crate::Error::Unsupported(_))));
}

#[test]
fn mat_back_examples() {
    let d = MatrixRepr::Diagonal(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    assert!(mat_back(&shift(0.0), &d).unwrap()[0].abs() < 1e-15);
    assert!(mat_back(&x(), &d).unwrap().is_empty());
    let zero_u = MatrixRepr::Diagonal(vec![C64::new(0.0, 0.0); 2]);
    assert_eq!(mat_back(&rz(0.3), &zero_u).unwrap(), vec![0.0]);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let theta = rng.random_range(-PI..PI);
        let u: Vec<C64> = (0..4).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let ubar = MatrixRepr::dense_from_rows(2, &u).unwrap();
        let g = mat_back(&rz(theta), &ubar).unwrap()[0];
        let f = |t: f64| {
            let m = rz(t).mat().unwrap().to_dense();
            2.0 * ubar.to_dense().iter().zip(m.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
        };
        let eps = 1e-5;
        assert!((g - (f(theta + eps) - f(theta - eps)) / (2.0 * eps)).abs() < 1e-7);
    }
}

#[test]
fn sampled_shift_gradient_is_within_three_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut a = || rng.random_range(0.0..2.0 * PI);
    let c = chain(
        3,
        vec![
            kron(3, (1..=3).map(|q| (vec![q], ry(a()))).collect()).unwrap(),
            control(3, &[1], &[2], x()).unwrap(),
            control(3, &[2], &[3], x()).unwrap(),
            kron(3, (1..=3).map(|q| (vec![q], rx(a()))).collect()).unwrap(),
        ],
    )
    .unwrap();
    let obs = pauli_sum(3, &[&[(1, z()), (2, z())], &[(3, x())]]);
    let exact = faithful_grad(&obs, &zero(3), &c, Shots::Exact, 0).unwrap();
    let nshots = 100_000;
    let est = faithful_grad(&obs, &zero(3), &c, Shots::Count(nshots), 11).unwrap();
    // each term has |eigenvalues| = 1: var ≤ 1 per term and shifted circuit
    let sigma = (2.0 * 2.0 / nshots as f64).sqrt() * 0.5 * 2f64.sqrt();
    for (e, s) in exact.iter().zip(&est) {
        assert!((e - s).abs() < 3.0 * sigma, "{e} vs {s}");
    }
}

#[test]
fn mmd_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut a = || rng.random_range(0.0..2.0 * PI);
    let layer = |a: &mut dyn FnMut() -> f64| kron(3, (1..=3).map(|q| (vec![q], ry(a()))).collect()).unwrap();
    let c = chain(
        3,
        vec![
            layer(&mut a),
            control(3, &[1], &[3], x()).unwrap(),
            layer(&mut a),
            control(3, &[3], &[2], x()).unwrap(),
        ],
    )
    .unwrap();
    let mut target: Vec<f64> = (0..8).map(|k| 1.0 + k as f64).collect();
    let s: f64 = target.iter().sum();
    target.iter_mut().for_each(|p| *p /= s);
    let loss = MmdLoss::new(Kernel::default(), target).unwrap();
    let rev = mmd_grad(&loss, &zero(3), &c, MmdMode::Reverse).unwrap();
    let sh = mmd_grad(&loss, &zero(3), &c, MmdMode::Shift).unwrap();
    assert!(max_diff(&rev, &sh) < 1e-10);
    let p0 = c.parameters();
    let eps = 1e-5;
    for k in 0..p0.len() {
        let mut p = p0.clone();
        p[k] += eps;
        c.dispatch(&p).unwrap();
        let plus = mmd_expect(&loss, &zero(3), &c).unwrap()[0];
        p[k] -= 2.0 * eps;
        c.dispatch(&p).unwrap();
        let minus = mmd_expect(&loss, &zero(3), &c).unwrap()[0];
        assert!((rev[k] - (plus - minus) / (2.0 * eps)).abs() < 1e-7);
    }
    c.dispatch(&p0).unwrap();

    let mut out = zero(3);
    c.apply(&mut out).unwrap();
    let same = MmdLoss::new(Kernel::default(), out.probs(0)).unwrap();
    assert!(mmd_expect(&same, &zero(3), &c).unwrap()[0].abs() < 1e-15);
    assert!(MmdLoss::new(Kernel::default(), vec![0.5, 0.5, 0.0]).is_err());
    let wrong = MmdLoss::new(Kernel::default(), vec![0.5, 0.5]).unwrap();
    assert!(matches!(mmd_expect(&wrong, &zero(3), &c), Err(crate::Error::Shape(_))));
}
