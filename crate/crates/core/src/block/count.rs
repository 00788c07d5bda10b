use std::collections::BTreeMap;

use super::{Block, Kind};

impl Block {
    /// Short label of a primitive, as used by [`Block::gatecount`].
    pub fn label(&self) -> String {
        match self.kind() {
            Kind::Const(g) => g.name.clone(),
            Kind::Rotation { generator, .. } => match generator.kind() {
                Kind::Const(g) if matches!(g.name.as_str(), "X" | "Y" | "Z") => format!("R{}", g.name.to_lowercase()),
                _ => "rot".into(),
            },
            Kind::Shift { .. } => "shift".into(),
            Kind::Phase { .. } => "phase".into(),
            Kind::TimeEvolution { .. } => "time_evolution".into(),
            Kind::GeneralMatrix { .. } => "matblock".into(),
            Kind::Measure { .. } => "measure".into(),
            Kind::Identity => "identity".into(),
            Kind::Control { ctrl_locs, child, .. } => format!("{}{}", "C".repeat(ctrl_locs.len()), child.label()),
            Kind::Chain(_) => "chain".into(),
            Kind::Put { .. } => "put".into(),
            Kind::Kron(_) => "kron".into(),
            Kind::Repeat { .. } => "repeat".into(),
            Kind::Subroutine { .. } => "subroutine".into(),
            Kind::Add(_) => "add".into(),
            Kind::Scale { .. } => "scale".into(),
            Kind::Daggered(c) => format!("{}'", c.label()),
            Kind::Cached { .. } => "cache".into(),
            Kind::NoParams(_) => "noparams".into(),
        }
    }

    /// Occurrences of each primitive gate. A controlled gate counts under
    /// its control-prefixed label (`CX`, `Cshift`, `CCX`, ...). Shared nodes
    /// count once per occurrence.
    pub fn gatecount(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.count_into(&mut out, 1);
        out
    }

    fn count_into(&self, out: &mut BTreeMap<String, usize>, times: usize) {
        match self.kind() {
            Kind::Control { child, .. } if child.is_primitive() => {
                *out.entry(self.label()).or_default() += times;
            }
            Kind::Repeat { locs, child } => child.count_into(out, times * locs.len()),
            Kind::Daggered(child) if child.is_primitive() => *out.entry(self.label()).or_default() += times,
            _ if self.is_primitive() => *out.entry(self.label()).or_default() += times,
            _ => {
                for c in self.subblocks() {
                    c.count_into(out, times);
                }
            }
        }
    }
}
