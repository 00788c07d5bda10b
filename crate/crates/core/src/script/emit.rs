use std::fmt::Write;

use super::SCRIPT_VERSION;
use crate::block::{Block, Kind};
use crate::error::{Error, Result};

const INDENT: &str = "    ";

fn unsupported<T>(b: &Block) -> Result<T> {
    Err(Error::Serialization(format!("no script form for `{}`", b.head())))
}

/// Value rounded to 12 significant digits, printed in its shortest form.
fn number(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float");
    let s = format!("{rounded}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn gate_text(b: &Block) -> Result<String> {
    Ok(match b.kind() {
        Kind::Const(def) if def.name == "I2" => "I".to_string(),
        Kind::Const(def) => def.name.clone(),
        Kind::Rotation { generator, theta } => {
            let axis = match generator.kind() {
                Kind::Const(def) if matches!(def.name.as_str(), "X" | "Y" | "Z") => &def.name,
                _ => return unsupported(b),
            };
            format!("R{}({})", axis.to_lowercase(), number(theta.get()))
        }
        Kind::Shift { theta } => format!("shift({})", number(theta.get())),
        Kind::Phase { theta } => format!("phase({})", number(theta.get())),
        _ => return unsupported(b),
    })
}

fn loc_text(locs: &[usize]) -> String {
    match locs {
        [l] => l.to_string(),
        _ => format!("({})", locs.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")),
    }
}

fn pair(locs: &[usize], g: &Block) -> Result<String> {
    Ok(format!("{}=>{}", loc_text(locs), gate_text(g)?))
}

fn line(b: &Block) -> Result<String> {
    match b.kind() {
        Kind::Put { locs, child } => pair(locs, child),
        Kind::Kron(items) if !items.is_empty() => {
            let parts = items.iter().map(|(l, g)| pair(l, g)).collect::<Result<Vec<_>>>()?;
            Ok(parts.join(", "))
        }
        Kind::Control { ctrl_locs, ctrl_config, locs, child } => {
            let mut parts: Vec<String> = ctrl_locs
                .iter()
                .zip(ctrl_config)
                .map(|(l, &c)| format!("{l}=>{}", if c == 1 { "C" } else { "!C" }))
                .collect();
            match child.kind() {
                Kind::Kron(items) if !items.is_empty() => {
                    for (l, g) in items {
                        let global: Vec<usize> = l.iter().map(|&i| locs[i - 1]).collect();
                        parts.push(pair(&global, g)?);
                    }
                }
                _ => parts.push(pair(locs, child)?),
            }
            Ok(parts.join(", "))
        }
        _ => unsupported(b),
    }
}

fn statements(b: &Block, depth: usize, out: &mut String) -> Result<()> {
    let pad = INDENT.repeat(depth);
    match b.kind() {
        Kind::Chain(children) => {
            for c in children {
                if matches!(c.kind(), Kind::Chain(_)) {
                    writeln!(out, "{pad}begin").expect("write to string");
                    statements(c, depth + 1, out)?;
                    writeln!(out, "{pad}end").expect("write to string");
                } else {
                    statements(c, depth, out)?;
                }
            }
        }
        _ => writeln!(out, "{pad}{}", line(b)?).expect("write to string"),
    }
    Ok(())
}

/// Script text for a circuit of chains, puts, krons and controls over
/// named gates. A top-level chain becomes the script body; any other block
/// becomes a single statement.
pub fn emit_script(b: &Block) -> Result<String> {
    let mut out = format!("let nqubits={}, version=\"{SCRIPT_VERSION}\"\n", b.nqubits());
    statements(b, 1, &mut out)?;
    out.push_str("end\n");
    Ok(out)
}
