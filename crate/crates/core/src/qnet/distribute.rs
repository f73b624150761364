use std::collections::BTreeSet;

use super::{CommLedger, NetworkTopology, CONTROL};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sv::{Owner, RegisterLayout, StateVector, UnitarySpec};

/// Relay route for handing one `w`-qubit copy of a shared ancilla to every
/// target node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionPlan {
    pub source: usize,
    pub width: usize,
    pub targets: Vec<usize>,
    /// Channel traversals in execution order, as `(from, to)`.
    pub route: Vec<(usize, usize)>,
    /// For each target (same order as `targets`), the target whose copy it is
    /// fanned out from; `None` marks the root copy.
    pub feeds_from: Vec<Option<usize>>,
}

impl DistributionPlan {
    pub fn new(topo: &NetworkTopology, targets: &[usize], width: usize) -> Result<Self> {
        let source = topo.hub();
        let tree = topo.bfs_parents(source);
        let parent = |n: usize| tree.iter().find(|(m, _)| *m == n).map(|(_, p)| *p);
        let target_set: BTreeSet<usize> = targets.iter().copied().collect();
        if target_set.len() != targets.len() {
            return Err(Error::Topology("duplicate distribution target".into()));
        }
        let mut needed = BTreeSet::new();
        for &t in targets {
            let mut cur = t;
            loop {
                match parent(cur) {
                    Some(Some(p)) => {
                        needed.insert(cur);
                        cur = p;
                    }
                    Some(None) => break,
                    None => return Err(Error::Topology(format!("target {t} unreachable"))),
                }
            }
        }
        let route: Vec<(usize, usize)> = tree
            .iter()
            .filter(|(n, _)| needed.contains(n))
            .map(|(n, p)| (p.expect("non-root"), *n))
            .collect();

        // Execution order of targets: BFS order, root copy first.
        let bfs_rank = |n: usize| tree.iter().position(|(m, _)| *m == n).unwrap_or(usize::MAX);
        let mut ordered: Vec<usize> = targets.to_vec();
        ordered.sort_by_key(|&n| bfs_rank(n));
        let root = ordered.first().copied();
        let feeds_from = targets
            .iter()
            .map(|&t| {
                if Some(t) == root {
                    return None;
                }
                let mut cur = t;
                while let Some(Some(p)) = parent(cur) {
                    if target_set.contains(&p) {
                        return Some(p);
                    }
                    cur = p;
                }
                root
            })
            .collect();
        Ok(Self {
            source,
            width,
            feeds_from: reorder(targets, &ordered, feeds_from),
            targets: ordered,
            route,
        })
    }

    pub fn traversals(&self) -> usize {
        self.route.len()
    }

    /// Qubits charged by one distribution (and again by the matching collect).
    pub fn charge(&self) -> u64 {
        (self.route.len() * self.width) as u64
    }

    pub fn root(&self) -> Option<usize> {
        self.targets.first().copied()
    }

    fn feed(&self, target: usize) -> Option<usize> {
        let i = self.targets.iter().position(|&t| t == target)?;
        self.feeds_from[i]
    }
}

fn reorder(original: &[usize], ordered: &[usize], values: Vec<Option<usize>>) -> Vec<Option<usize>> {
    ordered
        .iter()
        .map(|t| {
            let i = original.iter().position(|o| o == t).expect("same set");
            values[i]
        })
        .collect()
}

fn source_owner(plan: &DistributionPlan) -> Owner {
    if plan.source == CONTROL {
        Owner::Control
    } else {
        Owner::Node(plan.source)
    }
}

fn fan_out(state: &mut StateVector, from: &str, into: &str) -> Result<()> {
    let a = state.layout().qubits(from)?;
    let b = state.layout().qubits(into)?;
    if a.len() != b.len() {
        return Err(Error::Shape(format!("copy registers {from} and {into} differ in width")));
    }
    for (c, t) in a.into_iter().zip(b) {
        state.apply(&UnitarySpec::Cnot { control: c, target: t })?;
    }
    Ok(())
}

/// Fans the prepared root copy out to every target and charges the route.
/// `reg_of(γ)` names node `γ`'s copy register.
pub fn distribute(
    state: &mut StateVector,
    plan: &DistributionPlan,
    reg_of: &dyn Fn(usize) -> String,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
    phase: &str,
) -> Result<()> {
    for &t in &plan.targets {
        if let Some(f) = plan.feed(t) {
            fan_out(state, &reg_of(f), &reg_of(t))?;
        }
    }
    for &(a, b) in &plan.route {
        ledger.teleport(topo, (a, b), plan.width as u64, phase)?;
    }
    for &t in &plan.targets {
        state.set_owner(&reg_of(t), Owner::Node(t))?;
    }
    Ok(())
}

/// Inverse of [`distribute`]: returns every copy along the reversed route and
/// uncomputes the fan-out, leaving only the root copy populated.
pub fn collect(
    state: &mut StateVector,
    plan: &DistributionPlan,
    reg_of: &dyn Fn(usize) -> String,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
    phase: &str,
) -> Result<()> {
    for &(a, b) in plan.route.iter().rev() {
        ledger.teleport(topo, (b, a), plan.width as u64, phase)?;
    }
    for &t in plan.targets.iter().rev() {
        if let Some(f) = plan.feed(t) {
            fan_out(state, &reg_of(f), &reg_of(t))?;
        }
    }
    let owner = source_owner(plan);
    for &t in &plan.targets {
        state.set_owner(&reg_of(t), owner)?;
    }
    Ok(())
}

pub fn copy_register(gamma: usize) -> String {
    format!("copy{gamma}")
}

/// Builds `Σ_j β_j |j⟩^{⊗Γ}` with one copy per QPU, charging the relay.
pub fn distribute_repetition_state(
    weights: &[(usize, f64)],
    width: usize,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
) -> Result<StateVector> {
    let norm: f64 = weights.iter().map(|(_, a)| a * a).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("weights have squared norm {norm}")));
    }
    let phys = width.max(1);
    let mut amps = vec![0.0; 1 << phys];
    for &(v, a) in weights {
        if v >= amps.len() {
            return Err(Error::Shape(format!("value {v} does not fit {width} qubits")));
        }
        amps[v] += a;
    }
    let targets: Vec<usize> = (1..=topo.gamma()).collect();
    let plan = DistributionPlan::new(topo, &targets, width)?;
    let owner = source_owner(&plan);
    let mut layout = RegisterLayout::new();
    for &g in &targets {
        layout.push(&copy_register(g), phys, owner)?;
    }
    let mut state = StateVector::allocate(layout)?;
    let root = plan.root().ok_or_else(|| Error::Topology("no targets".into()))?;
    state.apply(&UnitarySpec::Dense {
        qubits: state.layout().qubits(&copy_register(root))?,
        matrix: linalg::householder_prep(&amps),
    })?;
    distribute(&mut state, &plan, &copy_register, topo, ledger, "distribute")?;
    Ok(state)
}
