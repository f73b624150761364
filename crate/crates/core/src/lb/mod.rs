//! Lower-bound gadgets: the clocked circuit Hamiltonian, perfect state
//! transfer, and inner-product instances evaluated through its dynamics.

mod clock;
mod ip;

pub use clock::{circuit_to_hamiltonian, evolve_clocked, run_pst, ClockedHamiltonian, PstOutcome};
pub use ip::{classical_ip, ip_circuit, ip_qubit_count, ip_via_dynamics, IpEvaluator, IpInstance, IpReadout};
