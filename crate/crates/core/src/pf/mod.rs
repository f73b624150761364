//! Distributed product formulas.
//!
//! Local summands evolve inside their node for free. Each interaction term
//! is applied by shuttling one ancilla through a CNOT ladder over the
//! term's support nodes.

mod schedule;

pub use schedule::{suzuki_schedule, Stage, TrotterSchedule};

use std::collections::BTreeMap;

use crate::caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64};
use crate::pauli::{
    cluster, nested_commutator_norm, ClusteredHamiltonian, InteractionTerm, OperatorSum,
    PauliAxis, PauliString, QubitPartition,
};
use crate::qnet::{CommLedger, NetworkTopology, CONTROL};
use crate::run::{basis_amplitudes, embed_system, system_slice, system_state, Prediction, RunResult};
use crate::sv::{self, Owner, RegisterLayout, StateVector, UnitarySpec};

pub const SYS: &str = "sys";
pub const LADDER_ANCILLA: &str = "pf_anc";

/// Teleports charged per interaction exponential on a star: out and back to
/// each of the `s` support nodes, in both the compute and uncompute ladder.
pub fn ladder_charge(span: usize) -> u64 {
    4 * span as u64
}

/// Trotter steps per segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPlan {
    pub r: usize,
    pub dt: f64,
}

impl SegmentPlan {
    pub fn new(t: f64, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("at least one Trotter step is required".into()));
        }
        Ok(Self { r, dt: t / r as f64 })
    }

    /// Evolution angle of every summand in stage `y`.
    pub fn stage_angles(&self, sched: &TrotterSchedule) -> Vec<f64> {
        sched.stages().iter().map(|s| s.coeff * self.dt).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    Formula,
    Empirical,
}

/// Dense `Ũ_p(t/r)^r`, built from exact summand exponentials.
pub fn trotter_operator(
    ch: &ClusteredHamiltonian,
    sched: &TrotterSchedule,
    t: f64,
    r: usize,
) -> Result<Mat> {
    let plan = SegmentPlan::new(t, r)?;
    let m = ch.num_edges() + 1;
    let mats: Vec<Mat> = (0..m)
        .map(|i| ch.summand(i).dense_matrix())
        .collect::<Result<_>>()?;
    let dim = 1usize << ch.qubit_count();
    let mut step = linalg::identity(dim);
    for (y, angle) in plan.stage_angles(sched).into_iter().enumerate() {
        for e in sched.permutation(y, m) {
            step = linalg::expm_hermitian(&mats[e], angle) * step;
        }
    }
    let mut total = linalg::identity(dim);
    for _ in 0..r {
        total = &step * total;
    }
    Ok(total)
}

fn trotter_error(ch: &ClusteredHamiltonian, sched: &TrotterSchedule, t: f64, r: usize, exact: &Mat) -> Result<f64> {
    linalg::operator_distance(&trotter_operator(ch, sched, t, r)?, exact)
}

/// Trotter steps needed for accuracy `eps`.
pub fn required_steps(
    ch: &ClusteredHamiltonian,
    p: usize,
    t: f64,
    eps: f64,
    mode: StepMode,
) -> Result<usize> {
    if eps <= 0.0 {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    match mode {
        StepMode::Formula => {
            let a = nested_commutator_norm(ch, p)?.value;
            Ok(formula_steps(a, p, t, eps))
        }
        StepMode::Empirical => {
            caps::check_dense("empirical step search", ch.qubit_count())?;
            let sched = suzuki_schedule(p)?;
            let exact = sv::exact_evolution(&ch.flatten(), t)?;
            const MAX_R: usize = 1 << 16;
            let mut hi = 1;
            while trotter_error(ch, &sched, t, hi, &exact)? > eps {
                if hi >= MAX_R {
                    return Err(Error::Numerical(format!(
                        "no step count up to {MAX_R} reaches epsilon {eps}"
                    )));
                }
                hi *= 2;
            }
            let mut lo = hi / 2;
            // Invariant: error(hi) ≤ eps, and error(lo) > eps unless lo = 0.
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if trotter_error(ch, &sched, t, mid, &exact)? <= eps {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(hi)
        }
    }
}

/// `⌈α̃^{1/p} t^{1+1/p} / ε^{1/p}⌉`, at least 1.
pub fn formula_steps(alpha_comm: f64, p: usize, t: f64, eps: f64) -> usize {
    let inv = 1.0 / p as f64;
    let r = (alpha_comm.powf(inv) * t.abs().powf(1.0 + inv) / eps.powf(inv)).ceil();
    (r as usize).max(1)
}

fn send_ancilla(
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
    from: usize,
    to: usize,
) -> Result<()> {
    if from != to {
        ledger.send(topo, from, to, 1, "ladder")?;
    }
    Ok(())
}

/// Applies `exp(−i·angle·H_e)` through the ancilla ladder and charges the
/// teleports. The system register must start at qubit 0.
pub fn interaction_exponential(
    state: &mut StateVector,
    term: &InteractionTerm,
    angle: f64,
    part: &QubitPartition,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
) -> Result<()> {
    if term.span() < 2 {
        return Err(Error::Domain(format!(
            "{} lies on one node; use a local exponential",
            term.string
        )));
    }
    let anc = state.layout().offset(LADDER_ANCILLA)?;
    let support = term.string.support();
    for &q in &support {
        match term.string.axis(q) {
            PauliAxis::X => state.apply(&UnitarySpec::H(q))?,
            PauliAxis::Y => {
                state.apply(&UnitarySpec::Sdg(q))?;
                state.apply(&UnitarySpec::H(q))?;
            }
            _ => {}
        }
    }
    let hub = topo.hub();
    let ladder = |state: &mut StateVector, ledger: &mut CommLedger| -> Result<()> {
        for &g in &term.support_nodes {
            send_ancilla(topo, ledger, hub, g)?;
            state.set_owner(LADDER_ANCILLA, Owner::Node(g))?;
            for &q in support.iter().filter(|&&q| part.node_of(q) == g) {
                state.apply(&UnitarySpec::Cnot { control: q, target: anc })?;
            }
            send_ancilla(topo, ledger, g, hub)?;
            state.set_owner(LADDER_ANCILLA, hub_owner(hub))?;
        }
        Ok(())
    };
    ladder(state, ledger)?;
    let z = PauliString::parse("Z").expect("literal");
    state.apply_pauli_exponential(term.coeff, &z, anc, angle)?;
    ladder(state, ledger)?;
    for &q in &support {
        match term.string.axis(q) {
            PauliAxis::X => state.apply(&UnitarySpec::H(q))?,
            PauliAxis::Y => {
                state.apply(&UnitarySpec::H(q))?;
                state.apply(&UnitarySpec::S(q))?;
            }
            _ => {}
        }
    }
    Ok(())
}

fn hub_owner(hub: usize) -> Owner {
    if hub == CONTROL {
        Owner::Control
    } else {
        Owner::Node(hub)
    }
}

/// Node-local evolution `exp(−i·angle·H_γ)` for every node.
fn local_unitaries(ch: &ClusteredHamiltonian, angle: f64) -> Result<Vec<(Vec<usize>, Mat)>> {
    let part = ch.partition();
    let mut out = Vec::new();
    for g in 1..=ch.gamma() {
        let h = ch.local(g);
        if h.is_empty() {
            continue;
        }
        let qubits = part.qubits_of(g);
        caps::check_dense("local exponential", qubits.len())?;
        let m = h.compact(&qubits)?.dense_matrix()?;
        out.push((qubits, linalg::expm_hermitian(&m, angle)));
    }
    Ok(out)
}

/// Executes the distributed circuit of `r` steps on `state`.
fn execute(
    state: &mut StateVector,
    ch: &ClusteredHamiltonian,
    sched: &TrotterSchedule,
    plan: &SegmentPlan,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
) -> Result<()> {
    let m = ch.num_edges() + 1;
    let angles = plan.stage_angles(sched);
    let locals: Vec<Vec<(Vec<usize>, Mat)>> = angles
        .iter()
        .map(|&a| local_unitaries(ch, a))
        .collect::<Result<_>>()?;
    for _ in 0..plan.r {
        if ch.num_edges() > 0 {
            ledger.add_round();
        }
        for (y, &angle) in angles.iter().enumerate() {
            for e in sched.permutation(y, m) {
                if e == 0 {
                    for (qubits, u) in &locals[y] {
                        state.apply(&UnitarySpec::Dense {
                            qubits: qubits.clone(),
                            matrix: u.clone(),
                        })?;
                    }
                } else {
                    let term = &ch.interactions()[e - 1];
                    interaction_exponential(state, term, angle, ch.partition(), topo, ledger)?;
                }
            }
        }
    }
    Ok(())
}

/// Exact ledger total of a run: `r · Υ · Σ_e 4·s(H_e)` on a star.
pub fn ledger_identity(ch: &ClusteredHamiltonian, p: usize, r: usize) -> Result<u64> {
    let ups = suzuki_schedule(p)?.upsilon() as u64;
    let per: u64 = ch.interactions().iter().map(|e| ladder_charge(e.span())).sum();
    Ok(r as u64 * ups * per)
}

/// Step-count request for [`run_dpf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Steps {
    Fixed(usize),
    Auto { eps: f64, mode: StepMode },
}

/// Options for [`run_dpf`].
#[derive(Debug, Clone)]
pub struct DpfOptions {
    pub p: usize,
    pub t: f64,
    pub steps: Steps,
    /// System input; `|0…0⟩` when absent.
    pub input: Option<Vec<C64>>,
    /// Accuracy used for the cost prediction.
    pub eps_for_prediction: f64,
}

pub fn run_dpf(
    h: &OperatorSum,
    part: &QubitPartition,
    topo: &NetworkTopology,
    opts: &DpfOptions,
) -> Result<RunResult> {
    let ch = cluster(h, part)?;
    run_dpf_clustered(&ch, topo, opts)
}

pub fn run_dpf_clustered(
    ch: &ClusteredHamiltonian,
    topo: &NetworkTopology,
    opts: &DpfOptions,
) -> Result<RunResult> {
    let sched = suzuki_schedule(opts.p)?;
    let r = match opts.steps {
        Steps::Fixed(r) => r,
        Steps::Auto { eps, mode } => required_steps(ch, opts.p, opts.t, eps, mode)?,
    };
    let plan = SegmentPlan::new(opts.t, r)?;
    let n = ch.qubit_count();
    let layout = RegisterLayout::new()
        .with(SYS, n, Owner::Partitioned)?
        .with(LADDER_ANCILLA, 1, hub_owner(topo.hub()))?;

    let input = opts.input.clone().unwrap_or_else(|| basis_amplitudes(n, 0));
    let mut state = embed_system(layout.clone(), &input)?;
    let mut ledger = CommLedger::new();
    execute(&mut state, ch, &sched, &plan, topo, &mut ledger)?;
    let output = system_state(n, system_slice(&state, n))?;

    let error_vs_exact = if n <= caps::dense_cap() {
        let implemented = sv::operator_from_columns(n, |j| {
            let mut s = embed_system(layout.clone(), &basis_amplitudes(n, j))?;
            execute(&mut s, ch, &sched, &plan, topo, &mut CommLedger::new())?;
            Ok(system_slice(&s, n))
        })?;
        let exact = sv::exact_evolution(&ch.flatten(), opts.t)?;
        Some(linalg::operator_distance(&implemented, &exact)?)
    } else {
        None
    };

    let mut metadata = BTreeMap::new();
    metadata.insert("p".into(), opts.p.to_string());
    metadata.insert("upsilon".into(), sched.upsilon().to_string());
    Ok(RunResult {
        protocol: "dpf".into(),
        output,
        error_vs_exact,
        ledger: ledger.report(),
        steps_or_queries: r as u64,
        predicted: predicted_cost_dpf(ch, opts.p, opts.t, opts.eps_for_prediction)?,
        success_probability: None,
        metadata,
    })
}

/// `|E| · Γ · α̃^{1/p} · t^{1+1/p} / ε^{1/p}`, constants set to 1.
pub fn predicted_cost_dpf(ch: &ClusteredHamiltonian, p: usize, t: f64, eps: f64) -> Result<Prediction> {
    let alpha_comm = if ch.num_edges() == 0 {
        0.0
    } else {
        nested_commutator_norm(ch, p)?.value
    };
    Ok(Prediction {
        value: dpf_cost_formula(ch.num_edges(), ch.gamma(), alpha_comm, p, t, eps),
        formula: "|E|·Γ·α̃^(1/p)·t^(1+1/p)/ε^(1/p)".into(),
    })
}

pub fn dpf_cost_formula(edges: usize, gamma: usize, alpha_comm: f64, p: usize, t: f64, eps: f64) -> f64 {
    let inv = 1.0 / p as f64;
    edges as f64 * gamma as f64 * alpha_comm.powf(inv) * t.abs().powf(1.0 + inv) / eps.powf(inv)
}
