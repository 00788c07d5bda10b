use std::fmt;

use super::{Block, Kind};
use crate::C64;

fn join(locs: &[usize]) -> String {
    locs.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
}

/// Tuple form: `(1,)` for one entry, `(1, 2)` otherwise.
fn tuple(locs: &[usize]) -> String {
    if locs.len() == 1 {
        format!("({},)", locs[0])
    } else {
        format!("({})", join(locs))
    }
}

fn complex(c: C64) -> String {
    if c.im == 0.0 {
        format!("{:?}", c.re)
    } else {
        format!("{:?} {} {:?}im", c.re, if c.im < 0.0 { "-" } else { "+" }, c.im.abs())
    }
}

impl Block {
    /// One-line description of this node, without its children.
    pub fn head(&self) -> String {
        match self.kind() {
            Kind::Const(g) => format!("{} gate", g.name),
            Kind::Rotation { generator, theta } => match generator.kind() {
                Kind::Const(g) => format!("rot({}Gate, {:?})", g.name, theta.get()),
                _ => format!("rot({:?})", theta.get()),
            },
            Kind::Shift { theta } => format!("shift({:?})", theta.get()),
            Kind::Phase { theta } => format!("phase({:?})", theta.get()),
            Kind::TimeEvolution { t, t_im, .. } => {
                format!("time evolution t = {}", complex(C64::new(t.get(), *t_im)))
            }
            Kind::GeneralMatrix { matrix, .. } => format!("matblock({0}x{0})", matrix.dim()),
            Kind::Measure { .. } => "measure".into(),
            Kind::Identity => "identity".into(),
            Kind::Chain(_) => "chain".into(),
            Kind::Put { locs, .. } => format!("put on ({})", join(locs)),
            Kind::Control { ctrl_locs, ctrl_config, .. } => {
                let c: Vec<String> = ctrl_locs
                    .iter()
                    .zip(ctrl_config)
                    .map(|(l, &v)| if v == 1 { l.to_string() } else { format!("¬{l}") })
                    .collect();
                format!("control({})", c.join(", "))
            }
            Kind::Kron(_) => "kron".into(),
            Kind::Repeat { locs, .. } => format!("repeat on ({})", join(locs)),
            Kind::Subroutine { locs, .. } => format!("Subroutine: ({})", join(locs)),
            Kind::Add(_) => "+".into(),
            Kind::Scale { factor, .. } => format!("[scale: {}]", complex(*factor)),
            Kind::Daggered(_) => "dagger".into(),
            Kind::Cached { .. } => "cache".into(),
            Kind::NoParams(_) => "no params".into(),
        }
    }

    /// Children paired with the text printed before their head.
    fn display_children(&self) -> Vec<(String, Block)> {
        match self.kind() {
            Kind::Rotation { generator, .. } if !matches!(generator.kind(), Kind::Const(_)) => {
                vec![(String::new(), generator.clone())]
            }
            Kind::TimeEvolution { hamiltonian, .. } => vec![(String::new(), hamiltonian.clone())],
            Kind::Control { locs, child, .. } => vec![(format!("{} ", tuple(locs)), child.clone())],
            Kind::Kron(items) => items
                .iter()
                .map(|(l, b)| {
                    let key = if l.len() == 1 { l[0].to_string() } else { format!("({})", join(l)) };
                    (format!("{key}=>"), b.clone())
                })
                .collect(),
            _ => self.subblocks().into_iter().map(|b| (String::new(), b)).collect(),
        }
    }

    fn write_tree(&self, f: &mut fmt::Formatter<'_>, indent: &str) -> fmt::Result {
        let children = self.display_children();
        let last = children.len().saturating_sub(1);
        for (k, (pre, child)) in children.iter().enumerate() {
            let (branch, cont) = if k == last { ("└─ ", "   ") } else { ("├─ ", "│  ") };
            writeln!(f)?;
            write!(f, "{indent}{branch}{pre}{}", child.head())?;
            child.write_tree(f, &format!("{indent}{cont}"))?;
        }
        Ok(())
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nqubits: {}\n{}", self.nqubits(), self.head())?;
        self.write_tree(f, "")
    }
}
