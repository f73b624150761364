//! Fixtures shared by the criterion benches.

use dqsim_core::{cluster, ClusteredHamiltonian, OperatorSum, PauliAxis, PauliString, QubitPartition, Result};

/// Transverse-field Ising chain on `nodes × per_node` qubits, split into
/// contiguous node blocks. Bonds between blocks become interaction terms.
pub fn ising_chain(nodes: usize, per_node: usize) -> Result<ClusteredHamiltonian> {
    let n = nodes * per_node;
    let mut terms = Vec::new();
    for q in 0..n {
        terms.push((0.7, PauliString::from_sparse(n, &[(q, PauliAxis::X)])?));
        if q + 1 < n {
            terms.push((1.0, PauliString::from_sparse(n, &[(q, PauliAxis::Z), (q + 1, PauliAxis::Z)])?));
        }
    }
    let h = OperatorSum::from_terms(n, terms)?;
    cluster(&h, &QubitPartition::contiguous(&vec![per_node; nodes])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_edges_sit_between_blocks() {
        let ch = ising_chain(3, 2).unwrap();
        assert_eq!(ch.num_edges(), 2);
        assert_eq!(ch.qubit_count(), 6);
        assert!((ch.alpha() - (6.0 * 0.7 + 5.0)).abs() < 1e-12);
    }
}
