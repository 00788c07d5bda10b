//! Named constant gates and the process-wide gate registry.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{CscMatrix, MatrixRepr, OpProps, PermMatrix};
use crate::C64;

const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// A constant gate: its matrix with operator properties computed once.
#[derive(Debug, Clone)]
pub struct GateDef {
    pub name: String,
    pub matrix: Arc<MatrixRepr>,
    pub props: OpProps,
    pub nqubits: usize,
    builtin: bool,
}

impl GateDef {
    fn new(name: &str, matrix: MatrixRepr, builtin: bool) -> Result<Self> {
        if matrix.dim() < 2 || !matrix.dim().is_power_of_two() {
            return Err(Error::validation(format!(
                "gate {name}: dimension {} is not a power of two",
                matrix.dim()
            )));
        }
        Ok(GateDef {
            name: name.to_string(),
            nqubits: matrix.dim().trailing_zeros() as usize,
            props: matrix.props(),
            matrix: Arc::new(matrix),
            builtin,
        })
    }

    pub fn is_builtin(&self) -> bool {
        self.builtin
    }
}

/// Builtin constant gate names.
pub const BUILTIN: [&str; 17] = [
    "X", "Y", "Z", "H", "I2", "S", "Sdag", "T", "Tdag", "SWAP", "CNOT", "CZ", "Toffoli", "P0", "P1", "Pu", "Pd",
];

fn perm(p: &[usize], vals: Vec<C64>) -> MatrixRepr {
    MatrixRepr::Permutation(PermMatrix::new(p.to_vec(), vals).expect("builtin permutation"))
}

fn sparse2(entries: &[(usize, usize)]) -> MatrixRepr {
    MatrixRepr::Sparse(CscMatrix::from_triplets(2, entries.iter().map(|&(i, j)| (i, j, ONE))))
}

fn builtin_matrix(name: &str) -> Option<MatrixRepr> {
    let t = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Some(match name {
        "X" => perm(&[1, 0], vec![ONE, ONE]),
        "Y" => perm(&[1, 0], vec![-I, I]),
        "Z" => MatrixRepr::Diagonal(vec![ONE, -ONE]),
        "H" => MatrixRepr::Dense(DMatrix::from_row_slice(2, 2, &[ONE * h, ONE * h, ONE * h, -ONE * h])),
        "I2" => MatrixRepr::Identity(2),
        "S" => MatrixRepr::Diagonal(vec![ONE, I]),
        "Sdag" => MatrixRepr::Diagonal(vec![ONE, -I]),
        "T" => MatrixRepr::Diagonal(vec![ONE, t]),
        "Tdag" => MatrixRepr::Diagonal(vec![ONE, t.conj()]),
        "SWAP" => perm(&[0, 2, 1, 3], vec![ONE; 4]),
        // control on qubit 1, target qubit 2
        "CNOT" => perm(&[0, 3, 2, 1], vec![ONE; 4]),
        "CZ" => perm(&[0, 1, 2, 3], vec![ONE, ONE, ONE, -ONE]),
        // controls on qubits 1 and 2, target qubit 3
        "Toffoli" => perm(&[0, 1, 2, 7, 4, 5, 6, 3], vec![ONE; 8]),
        "P0" => sparse2(&[(0, 0)]),
        "P1" => sparse2(&[(1, 1)]),
        "Pu" => sparse2(&[(0, 1)]),
        "Pd" => sparse2(&[(1, 0)]),
        _ => return None,
    })
}

fn registry() -> &'static RwLock<HashMap<String, Arc<GateDef>>> {
    static REG: OnceLock<RwLock<HashMap<String, Arc<GateDef>>>> = OnceLock::new();
    REG.get_or_init(|| {
        let map = BUILTIN
            .iter()
            .map(|&n| {
                let def = GateDef::new(n, builtin_matrix(n).unwrap(), true).expect("builtin gate");
                (n.to_string(), Arc::new(def))
            })
            .collect();
        RwLock::new(map)
    })
}

/// Looks up a builtin or registered constant gate.
pub fn constant(name: &str) -> Result<Arc<GateDef>> {
    registry()
        .read()
        .expect("gate registry poisoned")
        .get(name)
        .cloned()
        .ok_or_else(|| Error::Dispatch(name.to_string()))
}

/// Registers a new constant gate. Builtin names cannot be redefined;
/// redefining a user gate replaces it.
pub fn define_const_gate(name: &str, matrix: MatrixRepr) -> Result<Arc<GateDef>> {
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::validation(format!("invalid gate name {name:?}")));
    }
    if is_parametric(name) || name == "C" || name == "I" {
        return Err(Error::validation(format!("gate name {name} is reserved")));
    }
    if matrix.dim() != matrix.dim().next_power_of_two() || matrix.dim() < 2 {
        return Err(Error::validation(format!(
            "gate {name}: dimension {} is not a power of two",
            matrix.dim()
        )));
    }
    let mut reg = registry().write().expect("gate registry poisoned");
    if reg.get(name).is_some_and(|g| g.builtin) {
        return Err(Error::validation(format!("{name} is a builtin gate")));
    }
    let def = Arc::new(GateDef::new(name, matrix, false)?);
    reg.insert(name.to_string(), def.clone());
    Ok(def)
}

/// Names of all constant gates currently known.
pub fn known_gates() -> Vec<String> {
    let mut v: Vec<String> = registry().read().expect("gate registry poisoned").keys().cloned().collect();
    v.sort();
    v
}

/// Name of the inverse for self-named dagger pairs.
pub fn dagger_pair(name: &str) -> Option<&'static str> {
    Some(match name {
        "S" => "Sdag",
        "Sdag" => "S",
        "T" => "Tdag",
        "Tdag" => "T",
        "Pu" => "Pd",
        "Pd" => "Pu",
        _ => return None,
    })
}

pub const PARAMETRIC: [&str; 5] = ["Rx", "Ry", "Rz", "shift", "phase"];

pub fn is_parametric(name: &str) -> bool {
    PARAMETRIC.contains(&name)
}

pub fn rx(theta: f64) -> MatrixRepr {
    let (s, c) = (theta / 2.0).sin_cos();
    MatrixRepr::Dense(DMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), -I * s, -I * s, C64::new(c, 0.0)]))
}

pub fn ry(theta: f64) -> MatrixRepr {
    let (s, c) = (theta / 2.0).sin_cos();
    MatrixRepr::Dense(DMatrix::from_row_slice(
        2,
        2,
        &[C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)],
    ))
}

pub fn rz(theta: f64) -> MatrixRepr {
    MatrixRepr::Diagonal(vec![C64::from_polar(1.0, -theta / 2.0), C64::from_polar(1.0, theta / 2.0)])
}

pub fn shift(theta: f64) -> MatrixRepr {
    MatrixRepr::Diagonal(vec![ONE, C64::from_polar(1.0, theta)])
}

pub fn phase(theta: f64) -> MatrixRepr {
    let p = C64::from_polar(1.0, theta);
    MatrixRepr::Diagonal(vec![p, p])
}

/// Matrix of a named gate. Parametric gates (`Rx`, `Ry`, `Rz`, `shift`,
/// `phase`) take one angle; constant gates take none.
pub fn gate_matrix(name: &str, params: &[f64]) -> Result<MatrixRepr> {
    if is_parametric(name) {
        let [theta] = params else {
            return Err(Error::validation(format!("{name} takes exactly one parameter")));
        };
        return Ok(match name {
            "Rx" => rx(*theta),
            "Ry" => ry(*theta),
            "Rz" => rz(*theta),
            "shift" => shift(*theta),
            _ => phase(*theta),
        });
    }
    let def = constant(name)?;
    if !params.is_empty() {
        return Err(Error::validation(format!("{name} takes no parameters")));
    }
    Ok((*def.matrix).clone())
}
