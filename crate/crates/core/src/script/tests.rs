use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::block::{chain, control, control_with, h, kron, put, x, z};
use crate::circuits::shor9;
use crate::{Register, C64};

const SHOR: &str = include_str!("../../../../scripts/shor9.yqs");

fn body(b: &Block) -> Vec<Block> {
    match b.kind() {
        crate::block::Kind::Chain(c) => c.clone(),
        _ => panic!("not a chain"),
    }
}

fn one_line(n: usize, line: &str) -> Result<Block> {
    let b = parse_script(&format!("let nqubits={n}, version=\"0.6.0\"\n    {line}\nend\n"))?;
    Ok(body(&b).remove(0))
}

/// Applies both circuits to every basis state and returns the largest
/// amplitude difference.
fn basis_diff(a: &Block, b: &Block) -> f64 {
    let n = a.nqubits();
    let d = 1usize << n;
    let mut data = vec![C64::new(0.0, 0.0); d * d];
    for j in 0..d {
        data[j * d + j] = C64::new(1.0, 0.0);
    }
    let mut ra = Register::from_vec(n, d, data).unwrap();
    let mut rb = ra.clone();
    a.apply(&mut ra).unwrap();
    b.apply(&mut rb).unwrap();
    ra.max_abs_diff(&rb)
}

#[test]
fn table_lines() {
    let b = one_line(9, "1=>C, 2=>X").unwrap();
    assert!(b.structurally_eq(&control(9, &[1], &[2], x()).unwrap()));
    let b = one_line(9, "1=>H, 4=>H, 7=>H").unwrap();
    let want = kron(9, vec![(vec![1], h()), (vec![4], h()), (vec![7], h())]).unwrap();
    assert!(b.structurally_eq(&want));
    let b = one_line(9, "1=>H").unwrap();
    assert!(b.structurally_eq(&put(9, &[1], h()).unwrap()));
    let b = one_line(3, "(1, 3)=>SWAP").unwrap();
    assert!(b.structurally_eq(&put(3, &[1, 3], crate::block::swap()).unwrap()));
    let b = one_line(3, "2=>C, 3=>C, 1=>X").unwrap();
    assert!(b.structurally_eq(&control(3, &[2, 3], &[1], x()).unwrap()));
}

#[test]
fn shor_script_matches_circuit() {
    let parsed = parse_script(SHOR).unwrap();
    let error = kron(
        9,
        (1..=9).map(|q| (vec![q], if q % 3 == 1 { x() } else { z() })).collect(),
    )
    .unwrap();
    let built = shor9(error).unwrap();
    assert!(basis_diff(&parsed, &built) < 1e-10);
    let f = crate::circuits::operator_fidelity(&parsed.mat().unwrap(), &built.mat().unwrap()).unwrap();
    assert!((f - 1.0).abs() < 1e-10, "fidelity {f}");
}

#[test]
fn round_trip_fixpoint() {
    let first = parse_script(SHOR).unwrap();
    let text = emit_script(&first).unwrap();
    let second = parse_script(&text).unwrap();
    assert!(first.structurally_eq(&second));
    assert_eq!(emit_script(&second).unwrap(), text);
    assert!(text.starts_with("let nqubits=9, version=\"0.6.0\"\n    begin\n        1=>C, 4=>X\n"));
    assert!(text.ends_with("    end\nend\n"));
}

#[test]
fn emit_examples() {
    let text = emit_script(&put(9, &[1], h()).unwrap()).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "    1=>H");
    let b = control_with(2, &[1], &[0], &[2], x()).unwrap();
    let text = emit_script(&b).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "    1=>!C, 2=>X");
    assert!(body(&parse_script(&text).unwrap())[0].structurally_eq(&b));
    let b = chain(2, vec![put(2, &[2], crate::block::rx(1.234567890123456)).unwrap()]).unwrap();
    let text = emit_script(&b).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "    2=>Rx(1.23456789012)");
    let b = chain(1, vec![put(1, &[1], crate::block::i2()).unwrap()]).unwrap();
    assert_eq!(emit_script(&b).unwrap().lines().nth(1).unwrap(), "    1=>I");
}

#[test]
fn parameterized_round_trip() {
    let b = chain(
        3,
        vec![
            put(3, &[1], crate::block::ry(0.25)).unwrap(),
            control(3, &[3], &[2], crate::block::shift(-1.5)).unwrap(),
            put(3, &[2], crate::block::phase(2.0)).unwrap(),
            put(3, &[3], crate::block::rz(3e-7)).unwrap(),
        ],
    )
    .unwrap();
    let text = emit_script(&b).unwrap();
    assert!(parse_script(&text).unwrap().structurally_eq(&b), "{text}");
}

#[test]
fn control_over_kron() {
    let b = one_line(3, "1=>C, 3=>X, 2=>Z").unwrap();
    let want = control(3, &[1], &[3, 2], kron(2, vec![(vec![1], x()), (vec![2], z())]).unwrap()).unwrap();
    assert!(b.structurally_eq(&want));
    let text = emit_script(&chain(3, vec![b.clone()]).unwrap()).unwrap();
    assert!(body(&parse_script(&text).unwrap())[0].structurally_eq(&b));
}

#[test]
fn emit_rejects_other_nodes() {
    let te = crate::block::time_evolve(z(), C64::new(0.3, 0.0)).unwrap();
    assert!(matches!(emit_script(&te), Err(Error::Serialization(_))));
    let p = put(2, &[1, 2], chain(2, vec![]).unwrap()).unwrap();
    assert!(matches!(emit_script(&p), Err(Error::Serialization(_))));
}

#[test]
fn errors_carry_positions() {
    let e = parse_script("let nqubits=2, version=\"0.6.0\"\n    3=>X\nend\n").unwrap_err();
    assert!(matches!(e, Error::ScriptRange { qubit: 3, nqubits: 2, .. }));
    assert_eq!(e.span(), Some(Span { line: 2, col: 5 }));

    let e = parse_script("let nqubits=2, version=\"0.6.0\"\n    1=>Foo\nend\n").unwrap_err();
    assert!(matches!(e, Error::Parse { .. }));
    assert_eq!(e.span().unwrap().line, 2);

    let e = parse_script("    1=>X\nend\n").unwrap_err();
    assert!(matches!(e, Error::Parse { .. }));

    let e = parse_script("let nqubits=2, version=\"0.6.0\"\n  1=>X, 1=>Z\nend\n").unwrap_err();
    assert!(matches!(e, Error::ScriptValidation { .. }));

    let e = parse_script("let nqubits=2, version=\"0.6.0\"\n  1=>C, 2=>C\nend\n").unwrap_err();
    assert!(matches!(e, Error::ScriptValidation { .. }));

    let e = parse_script("let nqubits=2, version=\"0.6.0\"\n  1=>SWAP\nend\n").unwrap_err();
    assert!(matches!(e, Error::ScriptValidation { .. }));

    let e = parse_script("let nqubits=2, version=\"0.6.0\"\n  1=>X\n").unwrap_err();
    assert!(matches!(e, Error::Parse { .. }));

    let e = parse_script("let nqubits=2, version=\"0.6.0\"\n  1=>X\nend\n  2=>X\n").unwrap_err();
    assert_eq!(e.span().unwrap().line, 4);

    let e = parse_script("let nqubits=64, version=\"0.6.0\"\nend\n").unwrap_err();
    assert!(matches!(e, Error::ScriptValidation { .. }));
}

#[test]
fn nesting_limit() {
    let deep = |k: usize| {
        let mut s = String::from("let nqubits=1, version=\"0.6.0\"\n");
        s += &"begin\n".repeat(k);
        s += "1=>X\n";
        s += &"end\n".repeat(k + 1);
        s
    };
    assert!(parse_script(&deep(MAX_NESTING)).is_ok());
    assert!(matches!(parse_script(&deep(MAX_NESTING + 1)), Err(Error::Parse { .. })));
}

#[test]
fn crlf_comments_and_version() {
    let text = "# leading comment\r\nlet nqubits=2, version=\"0.5.0\"  # old\r\n    1=>H # h\r\n\r\n    1=>C, 2=>X\r\nend";
    let b = parse_script(text).unwrap();
    assert_eq!(body(&b).len(), 2);
    assert_eq!(parse_ast(text).unwrap().version, "0.5.0");
}

#[test]
fn registered_gates_parse() {
    let m = crate::gates::gate_matrix("H", &[]).unwrap();
    crate::gates::define_const_gate("ScriptTestGate", m).unwrap();
    let b = one_line(2, "2=>ScriptTestGate").unwrap();
    assert!(b.structurally_eq(&put(2, &[2], crate::block::gate("ScriptTestGate").unwrap()).unwrap()));
}

#[test]
fn fuzzed_bytes_never_panic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let base = SHOR.as_bytes();
    let alphabet = b"=>,()!#\"\n 0123456789CXHZbeginend-.e";
    for _ in 0..2000 {
        let mut bytes = base.to_vec();
        for _ in 0..rng.random_range(1..6) {
            let i = rng.random_range(0..bytes.len());
            match rng.random_range(0..4) {
                0 => bytes[i] = rng.random(),
                1 => bytes[i] = alphabet[rng.random_range(0..alphabet.len())],
                2 => {
                    bytes.remove(i);
                }
                _ => bytes.insert(i, alphabet[rng.random_range(0..alphabet.len())]),
            }
            if bytes.is_empty() {
                break;
            }
        }
        if let Err(e) = parse_script_bytes(&bytes) {
            assert!(e.span().is_some(), "{e}");
        }
    }
}
