//! Distributed quantum simulation protocols on an explicit network model.
//!
//! Every protocol runs on a dense statevector while a [`qnet::CommLedger`]
//! counts the qubits moved between nodes.

// NaN must fail the domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod caps;
pub mod cost;
pub mod error;
pub mod lb;
pub mod lcu;
pub mod linalg;
pub mod pauli;
pub mod pf;
pub mod qnet;
pub mod qsp;
pub mod run;
pub mod sv;
pub mod ts;

pub use error::{Error, ErrorClass, Result};
pub use linalg::{Mat, C64};
pub use pauli::{
    cluster, parse_pauli_sum, random_pauli_sum, ClusteredHamiltonian, OperatorSum, PauliAxis, PauliString,
    QubitPartition, TermSpec,
};
pub use sv::{Condition, Owner, RegisterLayout, StateVector, UnitarySpec};
