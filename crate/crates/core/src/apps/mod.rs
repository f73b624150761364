//! Distributed phase estimation and Grover search.

mod grover;
mod qpe;

pub use grover::{grover_ledger_identity, grover_success_probability, optimal_iterations, run_dgrover, GroverInstance, GroverOutcome};
pub use qpe::{
    exact_qpe_distribution, parity_phase_lcu, qpe_ledger_identity, run_dqpe, PhaseEstimate, COUNTING,
};

#[cfg(test)]
mod tests;
