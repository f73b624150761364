use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::caps;
use crate::error::{Error, Result};
use crate::lcu::{dro_apply, fan_out_charge, ReflectionSpec, RoMode};
use crate::qnet::{CommLedger, CommReport, NetworkTopology};
use crate::sv::{Owner, RegisterLayout, StateVector, UnitarySpec};

/// Search register size limit in qubits.
pub const GROVER_QUBIT_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverInstance {
    pub gamma: usize,
    pub n_per_node: usize,
    pub marked: usize,
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl GroverInstance {
    pub fn new(gamma: usize, n_per_node: usize, marked: usize) -> Self {
        Self {
            gamma,
            n_per_node,
            marked,
            iterations: None,
            seed: 0,
        }
    }

    pub fn qubits(&self) -> usize {
        self.gamma * self.n_per_node
    }

    pub fn items(&self) -> usize {
        1 << self.qubits()
    }

    pub fn iteration_count(&self) -> usize {
        self.iterations.unwrap_or_else(|| optimal_iterations(self.items()))
    }

    fn validate(&self) -> Result<()> {
        if self.gamma == 0 || self.n_per_node == 0 {
            return Err(Error::Domain("Grover instance needs Γ ≥ 1 and n ≥ 1".into()));
        }
        if self.qubits() > GROVER_QUBIT_CAP {
            return Err(Error::Capability {
                what: "Grover search register".into(),
                requested: self.qubits(),
                cap: GROVER_QUBIT_CAP,
            });
        }
        caps::check_qubits("Grover search register", self.qubits())?;
        if self.marked >= self.items() {
            return Err(Error::Domain(format!(
                "marked item {} outside N = {}",
                self.marked,
                self.items()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroverOutcome {
    pub measured: usize,
    pub success_probability: f64,
    pub iterations: usize,
    pub ledger: CommReport,
}

/// `⌊(π/4)√N⌋`.
pub fn optimal_iterations(n_items: usize) -> usize {
    (FRAC_PI_4 * (n_items as f64).sqrt()).floor() as usize
}

/// `sin²((2k+1)θ)` with `θ = arcsin(N^{−1/2})`.
pub fn grover_success_probability(n_items: usize, k: usize) -> f64 {
    let theta = (1.0 / (n_items as f64).sqrt()).asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// Two `φ = π/2` d-RO calls about the all-zero system state.
fn reflect_pi(state: &mut StateVector, topo: &NetworkTopology, ledger: &mut CommLedger) -> Result<()> {
    let spec = ReflectionSpec::new(FRAC_PI_2, vec!["sys".into()], RoMode::Direct)?;
    dro_apply(&spec, state, topo, ledger)?;
    dro_apply(&spec, state, topo, ledger)?;
    Ok(())
}

fn flip_to_zero(state: &mut StateVector, n: usize, item: usize) -> Result<()> {
    for q in (0..n).filter(|q| item >> q & 1 == 1) {
        state.apply(&UnitarySpec::X(q))?;
    }
    Ok(())
}

fn hadamards(state: &mut StateVector, n: usize) -> Result<()> {
    for q in 0..n {
        state.apply(&UnitarySpec::H(q))?;
    }
    Ok(())
}

/// Grover search with the oracle and diffusion replaced by distributed
/// reflections; every local `X` and `H` is free.
pub fn run_dgrover(inst: &GroverInstance, topo: &NetworkTopology, ledger: &mut CommLedger) -> Result<GroverOutcome> {
    inst.validate()?;
    if topo.gamma() != inst.gamma {
        return Err(Error::Topology("network and instance disagree on Γ".into()));
    }
    let n = inst.qubits();
    let layout = RegisterLayout::new().with("sys", n, Owner::Partitioned)?;
    let mut state = StateVector::allocate(layout)?;
    hadamards(&mut state, n)?;
    let iterations = inst.iteration_count();
    let mut run = CommLedger::new();
    for _ in 0..iterations {
        flip_to_zero(&mut state, n, inst.marked)?;
        reflect_pi(&mut state, topo, &mut run)?;
        flip_to_zero(&mut state, n, inst.marked)?;
        hadamards(&mut state, n)?;
        reflect_pi(&mut state, topo, &mut run)?;
        hadamards(&mut state, n)?;
    }
    let probs = state.probabilities("sys")?;
    let success_probability = probs[inst.marked];
    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut measured = probs.len() - 1;
    for (j, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            measured = j;
            break;
        }
    }
    ledger.absorb(&run);
    Ok(GroverOutcome {
        measured,
        success_probability,
        iterations,
        ledger: run.report(),
    })
}

/// `iterations × 4 × (fan-out charge)`, i.e. `4Γ` per iteration on a star.
pub fn grover_ledger_identity(topo: &NetworkTopology, iterations: usize) -> Result<u64> {
    Ok(iterations as u64 * 4 * fan_out_charge(topo)?)
}
