//! Binary state files: 8-byte magic, then `nqubits`, `nactive`, `nbatch` as
//! little-endian u32, then `(re, im)` little-endian f64 pairs in buffer order.

use std::io::{Read, Write};

use super::Register;
use crate::error::{Error, Result};
use crate::C64;

pub const MAGIC: &[u8; 8] = b"QBIRREG1";

pub fn write_state<W: Write>(reg: &Register, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    for v in [reg.nqubits(), reg.nactive(), reg.nbatch()] {
        out.write_all(&(v as u32).to_le_bytes())?;
    }
    for a in reg.state() {
        out.write_all(&a.re.to_le_bytes())?;
        out.write_all(&a.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_state<R: Read>(mut input: R) -> Result<Register> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Serialization("not a register file".into()));
    }
    let mut word = [0u8; 4];
    let mut header = [0usize; 3];
    for h in &mut header {
        input.read_exact(&mut word)?;
        *h = u32::from_le_bytes(word) as usize;
    }
    let [nqubits, nactive, nbatch] = header;
    if nactive == 0 || nactive > nqubits {
        return Err(Error::Serialization(format!(
            "active qubit count {nactive} invalid for {nqubits} qubits"
        )));
    }
    super::check_size(nqubits, nbatch)?;
    let len = nbatch << nqubits;
    let mut bytes = vec![0u8; len * 16];
    input.read_exact(&mut bytes)?;
    let data = bytes
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    let mut reg = Register::from_vec(nqubits, nbatch, data)?;
    reg.nactive = nactive;
    Ok(reg)
}

pub fn save(reg: &Register, path: impl AsRef<std::path::Path>) -> Result<()> {
    write_state(reg, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn load(path: impl AsRef<std::path::Path>) -> Result<Register> {
    read_state(std::io::BufReader::new(std::fs::File::open(path)?))
}
