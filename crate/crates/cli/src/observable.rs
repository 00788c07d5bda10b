//! Observable expressions for `qbir grad`.
//!
//! A sum of Pauli strings with optional real coefficients, for example
//! `Z1*Z2 + 0.5*X1 - Y3`, or the keyword `heisenberg` for the nearest-neighbour
//! Heisenberg chain on all qubits.

use qbir::block::{self, Block};
use qbir::{circuits, Error, Result, C64};

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(format!("observable: {}", msg.into())))
}

fn pauli(factor: &str, n: usize) -> Result<(usize, Block)> {
    let mut chars = factor.chars();
    let g = match chars.next() {
        Some('X') => block::x(),
        Some('Y') => block::y(),
        Some('Z') => block::z(),
        _ => return invalid(format!("expected X, Y or Z in `{factor}`")),
    };
    let q: usize = match chars.as_str().parse() {
        Ok(q) => q,
        Err(_) => return invalid(format!("expected a qubit index in `{factor}`")),
    };
    if q == 0 || q > n {
        return Err(Error::Range {
            what: "qubit",
            index: q,
            max: n,
        });
    }
    Ok((q, g))
}

fn term(text: &str, sign: f64, n: usize) -> Result<Block> {
    let mut coef = sign;
    let mut paulis = Vec::new();
    for factor in text.split('*').map(str::trim) {
        if factor.is_empty() {
            return invalid(format!("empty factor in `{text}`"));
        }
        if let Ok(c) = factor.parse::<f64>() {
            coef *= c;
            continue;
        }
        let (q, g) = pauli(factor, n)?;
        if paulis.iter().any(|(p, _)| *p == q) {
            return invalid(format!("qubit {q} repeated in `{text}`"));
        }
        paulis.push((q, g));
    }
    let op = match paulis.len() {
        0 => block::identity(n)?,
        1 => {
            let (q, g) = paulis.pop().expect("one factor");
            block::put(n, &[q], g)?
        }
        _ => block::kron(n, paulis.into_iter().map(|(q, g)| (vec![q], g)).collect())?,
    };
    if coef == 1.0 {
        Ok(op)
    } else {
        block::scale(C64::new(coef, 0.0), op)
    }
}

/// Parses an observable on `n` qubits.
pub fn parse_observable(text: &str, n: usize) -> Result<Block> {
    let text = text.trim();
    if text == "heisenberg" {
        return circuits::heisenberg(n);
    }
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut start = 0;
    let bytes = text.as_bytes();
    for (i, &c) in bytes.iter().enumerate() {
        let exponent = i > 0 && matches!(bytes[i - 1], b'e' | b'E') && bytes[..i - 1].last().is_some_and(u8::is_ascii_digit);
        if (c == b'+' || c == b'-') && !exponent {
            let piece = text[start..i].trim();
            if !piece.is_empty() {
                terms.push(term(piece, sign, n)?);
            } else if start > 0 || !terms.is_empty() {
                return invalid(format!("missing term before `{}`", c as char));
            }
            sign = if c == b'-' { -1.0 } else { 1.0 };
            start = i + 1;
        }
    }
    let piece = text[start..].trim();
    if piece.is_empty() {
        return invalid("expression ends without a term");
    }
    terms.push(term(piece, sign, n)?);
    if terms.len() == 1 {
        Ok(terms.pop().expect("one term"))
    } else {
        block::add(n, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qbir::Register;

    fn expect0(obs: &Block, bits: &str) -> f64 {
        let reg = Register::product_state(qbir::BitStr::parse(bits).unwrap(), 1).unwrap();
        qbir::autodiff::expect(obs, &reg).unwrap()[0]
    }

    #[test]
    fn pauli_sums() {
        let o = parse_observable("Z1*Z2 + 0.5*X1", 2).unwrap();
        assert!((expect0(&o, "00") - 1.0).abs() < 1e-12);
        assert!((expect0(&o, "01") + 1.0).abs() < 1e-12);
        let o = parse_observable("-Z1 - 2*Z2", 2).unwrap();
        assert!((expect0(&o, "00") + 3.0).abs() < 1e-12);
        let o = parse_observable("1e-1*Z1", 1).unwrap();
        assert!((expect0(&o, "0") - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "Z1 +", "Q1", "Z0", "Z3", "Z1*Z1", "Z1 + + Z2", "Z"] {
            assert!(parse_observable(bad, 2).is_err(), "{bad}");
        }
    }
}
