//! Network topology, teleportation charging and shared-ancilla distribution.

mod distribute;
mod ledger;
mod topology;

pub use distribute::{
    collect, copy_register, distribute, distribute_repetition_state, DistributionPlan,
};
pub use ledger::{ChannelRow, CommLedger, CommReport, Counters, PhaseRow, CBITS_PER_QUBIT};
pub use topology::{NetworkTopology, TopologyKind, TopologySpec, CONTROL};
