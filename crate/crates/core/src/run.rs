//! Result record shared by every protocol runner.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::qnet::CommReport;
use crate::sv::StateVector;

/// Closed-form cost prediction with unit constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub value: f64,
    pub formula: String,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub protocol: String,
    /// System register state after the run, for the requested input.
    pub output: StateVector,
    /// `‖Ũ − e^{−iHt}‖` when the dense oracle ran.
    pub error_vs_exact: Option<f64>,
    pub ledger: CommReport,
    /// Trotter steps, Taylor segments or QSP queries.
    pub steps_or_queries: u64,
    pub predicted: Prediction,
    pub success_probability: Option<f64>,
    pub metadata: BTreeMap<String, String>,
}

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::sv::RegisterLayout;

/// Places system amplitudes in the low register of `layout`, all ancillas at 0.
pub(crate) fn embed_system(layout: RegisterLayout, sys: &[C64]) -> Result<StateVector> {
    let dim = 1usize << layout.total_qubits();
    if sys.len() > dim || !sys.len().is_power_of_two() {
        return Err(Error::Shape(format!("{} system amplitudes", sys.len())));
    }
    let mut amps = vec![ZERO; dim];
    amps[..sys.len()].copy_from_slice(sys);
    StateVector::from_amplitudes(layout, amps)
}

/// Basis vector `|j⟩` of an `n`-qubit system.
pub(crate) fn basis_amplitudes(n: usize, j: usize) -> Vec<C64> {
    let mut v = vec![ZERO; 1 << n];
    v[j] = ONE;
    v
}

/// System amplitudes on the slice where every other register is 0.
pub(crate) fn system_slice(state: &StateVector, n: usize) -> Vec<C64> {
    state.amplitudes()[..1 << n].to_vec()
}

pub(crate) fn system_state(n: usize, sys: Vec<C64>) -> Result<StateVector> {
    let layout = RegisterLayout::new().with("sys", n, crate::sv::Owner::Partitioned)?;
    StateVector::from_amplitudes(layout, sys)
}
