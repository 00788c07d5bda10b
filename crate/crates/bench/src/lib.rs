//! Shared fixtures for the benchmarks.

use qbir::block::Block;
use qbir::{circuits, Register};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Heisenberg chain, a randomly initialized variational circuit and the
/// zero state, all on `n` qubits.
pub fn vqe_fixture(n: usize, depth: usize, seed: u64) -> (Block, Block, Register) {
    let h = circuits::heisenberg(n).expect("n ≥ 2");
    let c = circuits::variational_circuit(n, depth).expect("n ≥ 2, depth ≥ 1");
    c.dispatch_random(&mut ChaCha8Rng::seed_from_u64(seed));
    (h, c, Register::zero_state(n, 1).expect("n within the qubit cap"))
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixture_shapes() {
        let (h, c, r) = super::vqe_fixture(4, 2, 0);
        assert_eq!((h.nqubits(), c.nqubits(), r.nqubits()), (4, 4, 4));
        assert_eq!(c.nparameters(), 4 + 2 * 12);
    }
}
