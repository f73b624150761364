use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::NetworkTopology;
use crate::error::{Error, Result};

/// Classical bits sent per teleported qubit.
pub const CBITS_PER_QUBIT: u64 = 2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub qubits: u64,
    pub classical_bits: u64,
}

impl Counters {
    fn add(&mut self, qubits: u64) {
        self.qubits += qubits;
        self.classical_bits += CBITS_PER_QUBIT * qubits;
    }
}

/// Per-channel and per-phase teleportation counters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommLedger {
    channels: BTreeMap<(usize, usize), Counters>,
    phases: BTreeMap<String, Counters>,
    rounds: u64,
}

impl CommLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Charges `qubits` teleports over the channel `a – b`.
    pub fn teleport(
        &mut self,
        topo: &NetworkTopology,
        channel: (usize, usize),
        qubits: u64,
        phase: &str,
    ) -> Result<()> {
        let (a, b) = channel;
        if !topo.has_channel(a, b) {
            return Err(Error::Topology(format!("no channel {a} – {b}")));
        }
        if qubits == 0 {
            return Ok(());
        }
        self.channels.entry((a.min(b), a.max(b))).or_default().add(qubits);
        self.phases.entry(phase.to_string()).or_default().add(qubits);
        Ok(())
    }

    /// Moves `qubits` from `from` to `to` along the shortest path, charging
    /// every hop. Returns the hop count.
    pub fn send(
        &mut self,
        topo: &NetworkTopology,
        from: usize,
        to: usize,
        qubits: u64,
        phase: &str,
    ) -> Result<usize> {
        let path = topo.path(from, to)?;
        for hop in path.windows(2) {
            self.teleport(topo, (hop[0], hop[1]), qubits, phase)?;
        }
        Ok(path.len() - 1)
    }

    pub fn add_round(&mut self) {
        self.rounds += 1;
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn totals(&self) -> Counters {
        let mut t = Counters::default();
        for c in self.channels.values() {
            t.qubits += c.qubits;
            t.classical_bits += c.classical_bits;
        }
        t
    }

    pub fn qubits(&self) -> u64 {
        self.totals().qubits
    }

    pub fn phase(&self, label: &str) -> Counters {
        self.phases.get(label).copied().unwrap_or_default()
    }

    /// Folds another ledger's counters into this one.
    pub fn absorb(&mut self, other: &CommLedger) {
        for (k, c) in &other.channels {
            let e = self.channels.entry(*k).or_default();
            e.qubits += c.qubits;
            e.classical_bits += c.classical_bits;
        }
        for (k, c) in &other.phases {
            let e = self.phases.entry(k.clone()).or_default();
            e.qubits += c.qubits;
            e.classical_bits += c.classical_bits;
        }
        self.rounds += other.rounds;
    }

    pub fn report(&self) -> CommReport {
        let t = self.totals();
        CommReport {
            qubits: t.qubits,
            classical_bits: t.classical_bits,
            rounds: self.rounds,
            phases: self
                .phases
                .iter()
                .map(|(k, c)| PhaseRow {
                    phase: k.clone(),
                    qubits: c.qubits,
                    classical_bits: c.classical_bits,
                })
                .collect(),
            channels: self
                .channels
                .iter()
                .map(|(&(a, b), c)| ChannelRow {
                    a,
                    b,
                    qubits: c.qubits,
                    classical_bits: c.classical_bits,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub phase: String,
    pub qubits: u64,
    pub classical_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelRow {
    pub a: usize,
    pub b: usize,
    pub qubits: u64,
    pub classical_bits: u64,
}

/// Immutable snapshot of a ledger.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommReport {
    pub qubits: u64,
    pub classical_bits: u64,
    pub rounds: u64,
    pub phases: Vec<PhaseRow>,
    pub channels: Vec<ChannelRow>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teleport_counts() {
        let t = NetworkTopology::star(2);
        let mut l = CommLedger::new();
        assert_eq!(l.report().qubits, 0);
        l.teleport(&t, (0, 1), 1, "x").unwrap();
        assert_eq!(l.totals(), Counters { qubits: 1, classical_bits: 2 });
        l.teleport(&t, (0, 2), 0, "x").unwrap();
        assert_eq!(l.qubits(), 1);
        assert!(l.teleport(&t, (1, 2), 1, "x").is_err());
    }

    #[test]
    fn node_to_node_in_star_is_two_hops() {
        let t = NetworkTopology::star(3);
        let mut l = CommLedger::new();
        assert_eq!(l.send(&t, 1, 3, 1, "move").unwrap(), 2);
        assert_eq!(l.qubits(), 2);
    }

    #[test]
    fn phase_sums_match_totals() {
        let t = NetworkTopology::star(3);
        let mut l = CommLedger::new();
        l.teleport(&t, (0, 1), 3, "a").unwrap();
        l.teleport(&t, (0, 2), 2, "b").unwrap();
        l.teleport(&t, (0, 3), 4, "a").unwrap();
        let r = l.report();
        let by_phase: u64 = r.phases.iter().map(|p| p.qubits).sum();
        assert_eq!(by_phase, r.qubits);
        assert_eq!(r.classical_bits, 2 * r.qubits);
    }
}
