//! Seeded random circuits and basis strings for property tests and `verify`.

use rand::Rng;

use crate::circuit::{BasisString, Circuit, Gate, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GatePool {
    /// X, CNOT, Toffoli, H.
    Z2,
    /// Toffoli and H only.
    ToffoliHadamard,
    /// X, CNOT, H, P(k).
    Mixed,
}

impl GatePool {
    pub fn mode(self) -> Mode {
        match self {
            GatePool::Z2 | GatePool::ToffoliHadamard => Mode::Z2,
            GatePool::Mixed => Mode::Mixed,
        }
    }
}

fn distinct<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, k).into_vec()
}

/// A circuit of `num_gates` gates with at most `max_hadamards` Hadamards.
/// Gate kinds that do not fit (too few qubits, Hadamard budget spent) are
/// left out of the draw; generation stops early only if nothing fits.
pub fn random_circuit<R: Rng + ?Sized>(
    rng: &mut R,
    pool: GatePool,
    num_qubits: usize,
    num_gates: usize,
    max_hadamards: usize,
) -> Circuit {
    #[derive(Clone, Copy)]
    enum Kind {
        X,
        Cnot,
        Toffoli,
        H,
        Phase,
    }
    let mut gates = Vec::with_capacity(num_gates);
    let mut h = 0;
    while gates.len() < num_gates {
        let mut kinds = Vec::with_capacity(4);
        if pool != GatePool::ToffoliHadamard {
            kinds.push(Kind::X);
            if num_qubits >= 2 {
                kinds.push(Kind::Cnot);
            }
        }
        if pool != GatePool::Mixed && num_qubits >= 3 {
            kinds.push(Kind::Toffoli);
        }
        if h < max_hadamards {
            kinds.push(Kind::H);
        }
        if pool == GatePool::Mixed {
            kinds.push(Kind::Phase);
        }
        if kinds.is_empty() {
            break;
        }
        let gate = match kinds[rng.random_range(0..kinds.len())] {
            Kind::X => Gate::X(rng.random_range(0..num_qubits)),
            Kind::Cnot => {
                let q = distinct(rng, num_qubits, 2);
                Gate::cnot(q[0], q[1])
            }
            Kind::Toffoli => {
                let q = distinct(rng, num_qubits, 3);
                Gate::toffoli(q[0], q[1], q[2])
            }
            Kind::H => {
                h += 1;
                Gate::H(rng.random_range(0..num_qubits))
            }
            Kind::Phase => Gate::phase(rng.random_range(0..8), rng.random_range(0..num_qubits)),
        };
        gates.push(gate);
    }
    Circuit::new(pool.mode(), num_qubits, gates).expect("generated gates are valid")
}

pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, n: usize) -> BasisString {
    BasisString::new((0..n).map(|_| rng.random()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for pool in [GatePool::Z2, GatePool::ToffoliHadamard, GatePool::Mixed] {
            for n in 1..=6 {
                let c = random_circuit(&mut rng, pool, n, 30, 5);
                assert!(c.hadamard_count() <= 5);
                assert_eq!(c.mode(), pool.mode());
                if !(pool == GatePool::ToffoliHadamard && n < 3) {
                    assert_eq!(c.gates().len(), 30);
                }
            }
        }
    }

    #[test]
    fn seeded() {
        let a = random_circuit(&mut ChaCha8Rng::seed_from_u64(9), GatePool::Mixed, 4, 20, 8);
        let b = random_circuit(&mut ChaCha8Rng::seed_from_u64(9), GatePool::Mixed, 4, 20, 8);
        assert_eq!(a, b);
    }
}
