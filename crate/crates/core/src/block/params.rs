use std::collections::HashSet;

use rand::Rng;

use super::{Block, Kind, Param};
use crate::error::{Error, Result};

impl Block {
    /// Visits every distinct parameter cell in depth-first order. A node
    /// reached a second time (shared instance) is skipped with its subtree;
    /// subtrees under [`super::no_params`] are skipped entirely.
    pub(crate) fn visit_params(&self, f: &mut impl FnMut(&Block, &Param)) {
        let mut seen = HashSet::new();
        self.visit_params_inner(&mut seen, f);
    }

    fn visit_params_inner(&self, seen: &mut HashSet<usize>, f: &mut impl FnMut(&Block, &Param)) {
        if !seen.insert(self.id()) {
            return;
        }
        match self.kind() {
            Kind::NoParams(_) => {}
            Kind::Rotation { theta, .. } | Kind::Shift { theta } | Kind::Phase { theta } => f(self, theta),
            Kind::TimeEvolution { t, .. } => f(self, t),
            _ => {
                for c in self.subblocks() {
                    c.visit_params_inner(seen, f);
                }
            }
        }
    }

    /// Parameter values in depth-first order.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.visit_params(&mut |_, p| out.push(p.get()));
        out
    }

    pub fn nparameters(&self) -> usize {
        let mut n = 0;
        self.visit_params(&mut |_, _| n += 1);
        n
    }

    /// Nodes owning a parameter, in [`Block::parameters`] order.
    pub fn parameter_nodes(&self) -> Vec<Block> {
        let mut out = Vec::new();
        self.visit_params(&mut |b, _| out.push(b.clone()));
        out
    }

    /// Sets all parameters from `values`.
    pub fn dispatch(&self, values: &[f64]) -> Result<()> {
        self.dispatch_with(|_, v| v, values)
    }

    /// Sets every parameter `θ` to `op(θ, v)`, e.g. `dispatch_with(|a, b| a - b, &step)`.
    pub fn dispatch_with(&self, op: impl Fn(f64, f64) -> f64, values: &[f64]) -> Result<()> {
        let n = self.nparameters();
        if values.len() != n {
            return Err(Error::validation(format!(
                "{} values for {n} parameters",
                values.len()
            )));
        }
        let mut k = 0;
        self.visit_params(&mut |_, p| {
            p.set(op(p.get(), values[k]));
            k += 1;
        });
        Ok(())
    }

    /// Draws every parameter uniformly from `[0, 2π)`.
    pub fn dispatch_random<R: Rng + ?Sized>(&self, rng: &mut R) {
        self.visit_params(&mut |_, p| p.set(rng.random_range(0.0..std::f64::consts::TAU)));
    }

    /// Value of a single-parameter node.
    pub fn param_value(&self) -> Option<f64> {
        match self.kind() {
            Kind::Rotation { theta, .. } | Kind::Shift { theta } | Kind::Phase { theta } => Some(theta.get()),
            Kind::TimeEvolution { t, .. } => Some(t.get()),
            _ => None,
        }
    }

    /// Sets the parameter of a single-parameter node.
    pub fn set_param_value(&self, v: f64) -> Result<()> {
        match self.kind() {
            Kind::Rotation { theta, .. } | Kind::Shift { theta } | Kind::Phase { theta } => theta.set(v),
            Kind::TimeEvolution { t, .. } => t.set(v),
            _ => return Err(Error::validation("block has no parameter")),
        }
        Ok(())
    }
}
