//! Text dump of a matrix: a header line `dim tag nnz` followed by one
//! `row col re im` line per stored entry (0-based indices).

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use super::{CscMatrix, Format, MatrixRepr, OuterProduct, PermMatrix};
use crate::error::{Error, Result};
use crate::C64;

pub fn write_dump<W: Write>(m: &MatrixRepr, mut out: W) -> Result<()> {
    let mut entries = Vec::with_capacity(m.nnz());
    m.for_each_entry(|i, j, v| {
        if v != C64::new(0.0, 0.0) || matches!(m, MatrixRepr::Permutation(_)) {
            entries.push((i, j, v));
        }
    });
    writeln!(out, "{} {} {}", m.dim(), m.format().tag(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(out, "{i} {j} {:?} {:?}", v.re, v.im)?;
    }
    out.flush()?;
    Ok(())
}

pub fn dump_to_string(m: &MatrixRepr) -> String {
    let mut buf = Vec::new();
    write_dump(m, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("dump is ASCII")
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Serialization(format!("matrix dump line {line}: {msg}"))
}

pub fn read_dump<R: BufRead>(input: R) -> Result<MatrixRepr> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad(1, "missing header"))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(bad(1, "header must be `dim tag nnz`"));
    }
    let dim: usize = fields[0].parse().map_err(|e| bad(1, e))?;
    let format = Format::from_tag(fields[1]).ok_or_else(|| bad(1, format!("unknown tag {}", fields[1])))?;
    let nnz: usize = fields[2].parse().map_err(|e| bad(1, e))?;
    let mut triplets = Vec::with_capacity(nnz);
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = k + 2;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(bad(lineno, "expected `row col re im`"));
        }
        let i: usize = f[0].parse().map_err(|e| bad(lineno, e))?;
        let j: usize = f[1].parse().map_err(|e| bad(lineno, e))?;
        let re: f64 = f[2].parse().map_err(|e| bad(lineno, e))?;
        let im: f64 = f[3].parse().map_err(|e| bad(lineno, e))?;
        if i >= dim || j >= dim {
            return Err(bad(lineno, format!("entry ({i}, {j}) outside {dim}x{dim}")));
        }
        triplets.push((i, j, C64::new(re, im)));
    }
    if triplets.len() != nnz {
        return Err(bad(1, format!("header announces {nnz} entries, found {}", triplets.len())));
    }
    Ok(match format {
        Format::Identity => MatrixRepr::Identity(dim),
        Format::Diagonal => {
            let mut d = vec![C64::new(0.0, 0.0); dim];
            for (i, j, v) in triplets {
                if i != j {
                    return Err(bad(0, "off-diagonal entry in diagonal dump"));
                }
                d[i] = v;
            }
            MatrixRepr::Diagonal(d)
        }
        Format::Permutation => {
            let mut perm = vec![usize::MAX; dim];
            let mut vals = vec![C64::new(0.0, 0.0); dim];
            for (i, j, v) in triplets {
                perm[i] = j;
                vals[i] = v;
            }
            MatrixRepr::Permutation(PermMatrix::new(perm, vals)?)
        }
        Format::Sparse => MatrixRepr::Sparse(CscMatrix::from_triplets(dim, triplets)),
        Format::Dense | Format::OuterProduct => {
            let mut m = DMatrix::zeros(dim, dim);
            for (i, j, v) in triplets {
                m[(i, j)] = v;
            }
            if format == Format::OuterProduct {
                // reloaded as a full-rank factorization m * I
                MatrixRepr::OuterProduct(OuterProduct::new(m, DMatrix::identity(dim, dim))?)
            } else {
                MatrixRepr::Dense(m)
            }
        }
    })
}

pub fn load_from_str(text: &str) -> Result<MatrixRepr> {
    read_dump(text.as_bytes())
}
