use super::*;
use crate::gates;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn zero_and_product_states() {
    let r = Register::zero_state(4, 1).unwrap();
    assert_eq!(r.state()[0], c(1.0, 0.0));
    assert!(r.state()[1..].iter().all(|a| *a == ZERO));
    let r = Register::zero_state(2, 3).unwrap();
    assert_eq!((r.nrows(), r.ncols()), (4, 3));
    for b in 0..3 {
        assert_eq!(r.batch_state(b)[0], c(1.0, 0.0));
    }
    let p = Register::product_state(BitStr::parse("1010").unwrap(), 1).unwrap();
    assert_eq!(p.state()[10], c(1.0, 0.0));
    assert_eq!(
        Register::product_state(BitStr::parse("0").unwrap(), 1).unwrap(),
        Register::zero_state(1, 1).unwrap()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let out = p.measure(5, &mut rng).unwrap();
    assert!(out.samples.iter().all(|s| s.to_binary_string() == "1010"));
}

#[test]
fn qubit_cap_is_enforced() {
    assert!(matches!(Register::zero_state(qubit_cap() + 1, 1), Err(Error::Resource(_))));
    assert!(Register::zero_state(0, 1).is_err());
}

#[test]
fn rand_state_properties() {
    let a = Register::rand_state(5, 3, 7).unwrap();
    for n in a.norms() {
        assert!((n - 1.0).abs() < 1e-12);
    }
    assert_eq!(a, Register::rand_state(5, 3, 7).unwrap());
    let mut close = 0;
    for s in 0..100u64 {
        let x = Register::rand_state(4, 1, 1000 + 2 * s).unwrap();
        let y = Register::rand_state(4, 1, 1001 + 2 * s).unwrap();
        if x.fidelity(&y).unwrap()[0] >= 0.99 {
            close += 1;
        }
    }
    assert_eq!(close, 0);
}

#[test]
fn x_on_qubit_two_reads_0010() {
    let mut r = Register::zero_state(4, 1).unwrap();
    r.instruct_named("X", &[], &[2], &[], &[]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let out = r.measure(3, &mut rng).unwrap();
    assert_eq!(out.samples.len(), 3);
    for s in &out.samples {
        assert_eq!(s.to_binary_string(), "0010");
        assert_eq!(s.to_bits(), vec![0, 1, 0, 0]);
    }
}

#[test]
fn controlled_x_matches_cnot_oracle() {
    // control 2 -> target 1 on a random 2-qubit state
    let mut r = Register::rand_state(2, 1, 3).unwrap();
    let before = r.state().to_vec();
    r.instruct_named("X", &[], &[1], &[2], &[1]).unwrap();
    // indices with bit 2 set (2, 3) swap
    let want = [before[0], before[1], before[3], before[2]];
    for (g, w) in r.state().iter().zip(want) {
        assert!((g - w).norm() < 1e-15);
    }
}

#[test]
fn instruct_errors() {
    let mut r = Register::zero_state(3, 1).unwrap();
    let before = r.clone();
    r.instruct_named("I2", &[], &[1], &[], &[]).unwrap();
    assert_eq!(r, before);
    assert!(matches!(r.instruct_named("Foo", &[], &[1], &[], &[]), Err(Error::Dispatch(_))));
    assert!(r.instruct_named("X", &[], &[1], &[1], &[1]).is_err());
    assert!(r.instruct_named("CNOT", &[], &[1, 1], &[], &[]).is_err());
    assert!(matches!(r.instruct_named("X", &[], &[4], &[], &[]), Err(Error::Range { .. })));
    assert!(r.instruct_named("X", &[], &[1, 2], &[], &[]).is_err());
    assert!(r.instruct_named("Rx", &[], &[1], &[], &[]).is_err());
}

#[test]
fn measure_uniform_frequencies() {
    let mut r = Register::zero_state(2, 1).unwrap();
    r.instruct_named("H", &[], &[1], &[], &[]).unwrap();
    r.instruct_named("H", &[], &[2], &[], &[]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let out = r.measure(100_000, &mut rng).unwrap();
    let mut counts = [0usize; 4];
    for s in &out.samples {
        counts[s.value() as usize] += 1;
    }
    for k in counts {
        assert!((k as f64 / 1e5 - 0.25).abs() < 0.01);
    }
}

#[test]
fn collapse_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut z = Register::zero_state(3, 1).unwrap();
    let before = z.clone();
    let out = z.measure_collapse(&mut rng).unwrap();
    assert_eq!(out.samples[0].value(), 0);
    assert_eq!(z, before);

    let mut r = Register::rand_state(4, 5, 9).unwrap();
    let out = r.measure_collapse(&mut rng).unwrap();
    assert_eq!(out.samples.len(), 5);
    for n in r.norms() {
        assert!((n - 1.0).abs() < 1e-12);
    }
    let again = r.measure(20, &mut rng).unwrap();
    for b in 0..5 {
        assert!(again.batch(b).iter().all(|s| *s == out.samples[b]));
    }
}

#[test]
fn focus_relax_round_trip() {
    let mut r = Register::rand_state(10, 2, 4).unwrap();
    let orig = r.clone();
    r.focus(&[3, 6, 1, 2]).unwrap();
    assert_eq!(r.nactive(), 4);
    assert_eq!((r.nrows(), r.ncols()), (16, 64 * 2));
    // active qubit 1 is former qubit 3
    let idx_old = 1usize << 2;
    assert_eq!(r.state()[1], orig.state()[idx_old]);
    assert!(r.relax(&[3, 6, 2, 1], 10).is_err());
    assert!(r.relax(&[3, 6, 1, 2], 9).is_err());
    r.relax(&[3, 6, 1, 2], 10).unwrap();
    assert_eq!(r.nactive(), 10);
    assert!(r.max_abs_diff(&orig) <= 1e-14);

    let mut r = orig.clone();
    r.focus(&(1..=10).collect::<Vec<_>>()).unwrap();
    assert_eq!(r.state(), orig.state());
    assert!(r.focus(&[1, 1]).is_err());
}

#[test]
fn measure_sums_over_environment() {
    // Bell pair on qubits 1,2; focus on qubit 2 only.
    let mut r = Register::zero_state(2, 1).unwrap();
    r.instruct_named("H", &[], &[1], &[], &[]).unwrap();
    r.instruct_named("X", &[], &[2], &[1], &[1]).unwrap();
    r.focus(&[2]).unwrap();
    let p = r.probs(0);
    assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
}

#[test]
fn save_load_round_trip() {
    let mut r = Register::rand_state(5, 2, 8).unwrap();
    r.focus(&[2, 4]).unwrap();
    let mut bytes = Vec::new();
    io::write_state(&r, &mut bytes).unwrap();
    let back = io::read_state(&bytes[..]).unwrap();
    assert_eq!(back.state(), r.state());
    assert_eq!((back.nqubits(), back.nactive(), back.nbatch()), (5, 2, 2));
    assert!(io::read_state(&b"garbage!"[..]).is_err());
    assert!(io::read_state(&bytes[..bytes.len() - 1]).is_err());
}

#[test]
fn parametric_gate_matrices() {
    let m = gates::gate_matrix("Rx", &[std::f64::consts::PI]).unwrap();
    let mut r = Register::zero_state(1, 1).unwrap();
    r.instruct(&m, &[1], &[], &[]).unwrap();
    assert!(r.state()[0].norm() < 1e-15);
    assert!((r.state()[1] - c(0.0, -1.0)).norm() < 1e-15);
}
