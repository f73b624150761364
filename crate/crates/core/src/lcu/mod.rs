//! Distributed linear combination of unitaries: the d-BE block encoding, the
//! generic d-LCU with oblivious amplitude amplification, and d-RO.

mod dbe;
mod decomp;
mod dro;

pub use dbe::{hub_owner, BlockEncoding};
pub use decomp::{LcuDecomposition, LcuTerm};
pub use dro::{dro_apply, ReflectionSpec, RoMode};

use crate::error::{Error, Result};
use crate::qnet::{CommLedger, DistributionPlan, NetworkTopology};
use crate::sv::{Condition, StateVector};

/// A unitary `W` whose block on its ancillas' all-zero subspace is the
/// operator of interest.
pub trait BlockOracle {
    /// Ancilla registers, all `|0⟩` in the good branch.
    fn ancillas(&self) -> Vec<String>;

    /// Appends the ancilla registers in `|0⟩`.
    fn attach(&self, state: &mut StateVector, topo: &NetworkTopology) -> Result<()>;

    fn apply(
        &self,
        state: &mut StateVector,
        topo: &NetworkTopology,
        ledger: &mut CommLedger,
        control: Option<Condition>,
        adjoint: bool,
    ) -> Result<()>;
}

pub(crate) fn both(a: Condition, b: Condition) -> Result<Condition> {
    a.and(b)
        .ok_or_else(|| Error::Shape("contradictory conditions".into()))
}

/// Charges one qubit to every node along the relay tree.
pub fn charge_fan_out(topo: &NetworkTopology, ledger: &mut CommLedger, phase: &str) -> Result<u64> {
    let plan = fan_out_plan(topo)?;
    for &(a, b) in &plan.route {
        ledger.teleport(topo, (a, b), 1, phase)?;
    }
    Ok(plan.charge())
}

/// Charge of [`charge_fan_out`]: `Γ` on a star.
pub fn fan_out_charge(topo: &NetworkTopology) -> Result<u64> {
    Ok(fan_out_plan(topo)?.charge())
}

fn fan_out_plan(topo: &NetworkTopology) -> Result<DistributionPlan> {
    let targets: Vec<usize> = (1..=topo.gamma()).collect();
    DistributionPlan::new(topo, &targets, 1)
}

/// `I − 2Π` about the all-zero state of `names`, charged as one d-RO.
pub fn reflect_zero(
    state: &mut StateVector,
    names: &[String],
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
) -> Result<()> {
    let cond = state.layout().all_zero(names)?;
    state.apply_phase(cond, -crate::linalg::ONE);
    charge_fan_out(topo, ledger, "reflection")?;
    Ok(())
}

/// `−W R W† R W` with `R = I − 2Π`.
pub fn oblivious_amplification<O: BlockOracle + ?Sized>(
    oracle: &O,
    state: &mut StateVector,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
) -> Result<()> {
    let names = oracle.ancillas();
    oracle.apply(state, topo, ledger, None, false)?;
    reflect_zero(state, &names, topo, ledger)?;
    oracle.apply(state, topo, ledger, None, true)?;
    reflect_zero(state, &names, topo, ledger)?;
    oracle.apply(state, topo, ledger, None, false)?;
    for a in state.amplitudes_mut() {
        *a = -*a;
    }
    Ok(())
}

/// Probability weight of the all-zero ancilla branch.
pub fn good_weight(state: &StateVector, names: &[String]) -> Result<f64> {
    let cond = state.layout().all_zero(names)?;
    let total = state.norm_sqr();
    let kept: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(j, _)| cond.holds(*j))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok(kept / total)
}

/// Drops the ancillas, keeping their all-zero slice without renormalizing.
pub fn discard_ancillas(state: &StateVector, names: &[String]) -> Result<StateVector> {
    let mut out = state.clone();
    for n in names.iter().rev() {
        out = out.remove_register(n, 0)?;
    }
    Ok(out)
}
