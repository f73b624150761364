use crate::caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64, ONE};
use crate::pauli::{ClusteredHamiltonian, PauliString};
use crate::qnet::{collect, distribute, CommLedger, DistributionPlan, NetworkTopology, CONTROL};
use crate::run::{basis_amplitudes, embed_system, system_slice};
use crate::sv::{self, Condition, Owner, RegisterLayout, StateVector};

use super::{both, BlockOracle};

pub fn hub_owner(topo: &NetworkTopology) -> Owner {
    if topo.hub() == CONTROL {
        Owner::Control
    } else {
        Owner::Node(topo.hub())
    }
}

#[derive(Debug, Clone)]
struct LocalSelect {
    width: usize,
    amps: Vec<f64>,
    /// `(sign, P_l)` in label order.
    terms: Vec<(f64, PauliString)>,
}

/// Distributed block encoding of a clustered Hamiltonian.
///
/// Labels `0..Γ` name the node-local sums, labels `Γ..Γ+|E|` the interaction
/// terms. The control node prepares one label copy per node and each node
/// conditions its local select on its own copy.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    ch: ClusteredHamiltonian,
    prefix: String,
    width: usize,
    alpha: f64,
    control_amps: Vec<f64>,
    locals: Vec<LocalSelect>,
}

impl BlockEncoding {
    pub fn new(ch: &ClusteredHamiltonian, prefix: &str) -> Result<Self> {
        let gamma = ch.gamma();
        let labels = gamma + ch.num_edges();
        let width = caps::log2_ceil(labels);
        let alpha = ch.alpha();
        if alpha <= 0.0 {
            return Err(Error::Domain("block encoding of the zero Hamiltonian".into()));
        }
        let mut control_amps = vec![0.0; 1 << width.max(1)];
        let mut locals = Vec::with_capacity(gamma);
        for g in 1..=gamma {
            let h = ch.local(g);
            let a_g = h.one_norm();
            control_amps[g - 1] = (a_g / alpha).sqrt();
            let lw = caps::log2_ceil(h.len()).max(1);
            let mut amps = vec![0.0; 1 << lw];
            let mut terms = Vec::with_capacity(h.len());
            if a_g > 0.0 {
                for (l, (c, p)) in h.terms().iter().enumerate() {
                    amps[l] = (c.abs() / a_g).sqrt();
                    terms.push((c.signum(), p.clone()));
                }
            } else {
                amps[0] = 1.0;
            }
            locals.push(LocalSelect { width: lw, amps, terms });
        }
        for (e, term) in ch.interactions().iter().enumerate() {
            control_amps[gamma + e] = (term.coeff.abs() / alpha).sqrt();
        }
        Ok(Self {
            ch: ch.clone(),
            prefix: prefix.to_string(),
            width,
            alpha,
            control_amps,
            locals,
        })
    }

    pub fn clustered(&self) -> &ClusteredHamiltonian {
        &self.ch
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> usize {
        self.ch.gamma()
    }

    /// Charged label width `⌈log₂(|E|+Γ)⌉`.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Qubits added by [`BlockOracle::attach`].
    pub fn ancilla_qubits(&self) -> usize {
        self.gamma() * self.width.max(1) + self.locals.iter().map(|l| l.width).sum::<usize>()
    }

    /// Qubits charged by one invocation: `2Γw` on a star.
    pub fn invocation_charge(&self, topo: &NetworkTopology) -> Result<u64> {
        Ok(2 * self.plan(topo)?.charge())
    }

    /// Records the teleports of one invocation without touching a state, for
    /// runs that apply the equivalent dense operator.
    pub fn charge_invocation(&self, topo: &NetworkTopology, ledger: &mut CommLedger, controlled: bool) -> Result<()> {
        let plan = self.plan(topo)?;
        let w = plan.width as u64;
        for &(a, b) in &plan.route {
            ledger.teleport(topo, (a, b), w, "d-BE distribute")?;
        }
        if controlled {
            super::charge_fan_out(topo, ledger, "control fan-out")?;
        }
        for &(a, b) in plan.route.iter().rev() {
            ledger.teleport(topo, (b, a), w, "d-BE return")?;
        }
        Ok(())
    }

    /// Amplitudes of `G_C|0⟩` on the root copy.
    pub fn control_weights(&self) -> &[f64] {
        &self.control_amps
    }

    /// Amplitudes of `G_γ|0⟩`.
    pub fn local_weights(&self, gamma: usize) -> &[f64] {
        &self.locals[gamma - 1].amps
    }

    pub fn copy_name(&self, gamma: usize) -> String {
        format!("{}c{gamma}", self.prefix)
    }

    pub fn local_name(&self, gamma: usize) -> String {
        format!("{}a{gamma}", self.prefix)
    }

    fn plan(&self, topo: &NetworkTopology) -> Result<DistributionPlan> {
        if topo.gamma() != self.gamma() {
            return Err(Error::Topology(format!(
                "{} nodes in the network, {} in the partition",
                topo.gamma(),
                self.gamma()
            )));
        }
        let targets: Vec<usize> = (1..=self.gamma()).collect();
        DistributionPlan::new(topo, &targets, self.width)
    }

    fn prep_control(&self, state: &mut StateVector, plan: &DistributionPlan) -> Result<()> {
        let root = plan.root().expect("at least one node");
        let m = linalg::householder_prep(&self.control_amps);
        state.apply_register_matrix(&self.copy_name(root), &m, Condition::always())
    }

    fn prep_locals(&self, state: &mut StateVector) -> Result<()> {
        for (i, l) in self.locals.iter().enumerate() {
            let m = linalg::householder_prep(&l.amps);
            state.apply_register_matrix(&self.local_name(i + 1), &m, Condition::always())?;
        }
        Ok(())
    }

    /// `G = G_C ⊗ ⊗_γ G_γ`, distributing the label copies.
    pub fn prepare(&self, state: &mut StateVector, topo: &NetworkTopology, ledger: &mut CommLedger) -> Result<()> {
        let plan = self.plan(topo)?;
        self.prep_control(state, &plan)?;
        let name = |g: usize| self.copy_name(g);
        distribute(state, &plan, &name, topo, ledger, "d-BE distribute")?;
        self.prep_locals(state)
    }

    /// `G†`, returning the label copies to the control node.
    pub fn unprepare(&self, state: &mut StateVector, topo: &NetworkTopology, ledger: &mut CommLedger) -> Result<()> {
        let plan = self.plan(topo)?;
        self.prep_locals(state)?;
        let name = |g: usize| self.copy_name(g);
        collect(state, &plan, &name, topo, ledger, "d-BE return")?;
        self.prep_control(state, &plan)
    }

    /// Effective select, each node reading only its own label copy. The sign
    /// of an interaction coefficient is applied at its lowest support node.
    pub fn select(&self, state: &mut StateVector, control: Condition, phase: C64) -> Result<()> {
        let gamma = self.gamma();
        let part = self.ch.partition();
        let layout = state.layout().clone();
        for g in 1..=gamma {
            let on_label = both(control, layout.condition(&self.copy_name(g), g - 1)?)?;
            let local = &self.locals[g - 1];
            for (l, (sign, p)) in local.terms.iter().enumerate() {
                let c = both(on_label, layout.condition(&self.local_name(g), l)?)?;
                state.apply_pauli_controlled(p, 0, phase * *sign, c)?;
            }
        }
        for (e, term) in self.ch.interactions().iter().enumerate() {
            let lowest = term.support_nodes[0];
            for &g in &term.support_nodes {
                let c = both(control, layout.condition(&self.copy_name(g), gamma + e)?)?;
                let piece = term.string.restrict(&part.qubits_of(g));
                let ph = if g == lowest { phase * term.coeff.signum() } else { ONE };
                state.apply_pauli_controlled(&piece, 0, ph, c)?;
            }
        }
        Ok(())
    }

    /// Block `⟨0|G†·select·G|0⟩` over the system, from one circuit run per
    /// basis input. One invocation is charged to `ledger`.
    pub fn block(&self, topo: &NetworkTopology, ledger: &mut CommLedger) -> Result<Mat> {
        let n = self.ch.qubit_count();
        let mut layout = RegisterLayout::new().with("sys", n, Owner::Partitioned)?;
        self.extend_layout(&mut layout, topo)?;
        caps::check_dense("d-BE block extraction", n)?;
        caps::check_qubits("d-BE block extraction", layout.total_qubits())?;
        let mut charged = false;
        sv::operator_from_columns(n, |j| {
            let mut s = embed_system(layout.clone(), &basis_amplitudes(n, j))?;
            let mut scratch = CommLedger::new();
            let l = if charged { &mut scratch } else { &mut *ledger };
            self.apply(&mut s, topo, l, None, false)?;
            charged = true;
            Ok(system_slice(&s, n))
        })
    }

    fn extend_layout(&self, layout: &mut RegisterLayout, topo: &NetworkTopology) -> Result<()> {
        let owner = hub_owner(topo);
        for g in 1..=self.gamma() {
            layout.push(&self.copy_name(g), self.width.max(1), owner)?;
        }
        for (i, l) in self.locals.iter().enumerate() {
            layout.push(&self.local_name(i + 1), l.width, Owner::Node(i + 1))?;
        }
        Ok(())
    }
}

impl BlockOracle for BlockEncoding {
    fn ancillas(&self) -> Vec<String> {
        (1..=self.gamma())
            .map(|g| self.copy_name(g))
            .chain((1..=self.gamma()).map(|g| self.local_name(g)))
            .collect()
    }

    fn attach(&self, state: &mut StateVector, topo: &NetworkTopology) -> Result<()> {
        let owner = hub_owner(topo);
        for g in 1..=self.gamma() {
            state.append_register(&self.copy_name(g), self.width.max(1), owner)?;
        }
        for (i, l) in self.locals.iter().enumerate() {
            state.append_register(&self.local_name(i + 1), l.width, Owner::Node(i + 1))?;
        }
        Ok(())
    }

    /// `G†·select·G`; a control condition restricts the select and charges
    /// another `Γ` qubits for fanning the control bit out.
    fn apply(
        &self,
        state: &mut StateVector,
        topo: &NetworkTopology,
        ledger: &mut CommLedger,
        control: Option<Condition>,
        _adjoint: bool,
    ) -> Result<()> {
        self.prepare(state, topo, ledger)?;
        if control.is_some() {
            super::charge_fan_out(topo, ledger, "control fan-out")?;
        }
        self.select(state, control.unwrap_or_else(Condition::always), ONE)?;
        self.unprepare(state, topo, ledger)
    }
}
