use crate::caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64};
use crate::pauli::QubitPartition;
use crate::qnet::{collect, distribute, CommLedger, DistributionPlan, NetworkTopology};
use crate::run::{basis_amplitudes, embed_system, system_slice};
use crate::sv::{self, Condition, Owner, RegisterLayout, StateVector};

use super::{both, hub_owner, oblivious_amplification, BlockOracle};

/// One weighted product `β · ⊗_γ U^{(γ)}`; `factors[γ−1]` acts on node `γ`'s
/// qubits, `None` meaning identity.
#[derive(Debug, Clone)]
pub struct LcuTerm {
    pub beta: f64,
    pub factors: Vec<Option<Mat>>,
}

/// `V = Σ_j β_j ⊗_γ U_j^{(γ)}` over a partitioned system register at qubit 0.
#[derive(Debug, Clone)]
pub struct LcuDecomposition {
    partition: QubitPartition,
    terms: Vec<LcuTerm>,
    prefix: String,
}

impl LcuDecomposition {
    pub fn new(partition: QubitPartition, terms: Vec<LcuTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("empty decomposition".into()));
        }
        for t in &terms {
            if !(t.beta > 0.0) {
                return Err(Error::Domain(format!("weight {} is not positive", t.beta)));
            }
            if t.factors.len() != partition.gamma() {
                return Err(Error::Shape(format!(
                    "{} factors for {} nodes",
                    t.factors.len(),
                    partition.gamma()
                )));
            }
            for (i, f) in t.factors.iter().enumerate() {
                if let Some(m) = f {
                    let dim = 1usize << partition.qubits_of(i + 1).len();
                    if m.nrows() != dim || m.ncols() != dim {
                        return Err(Error::Shape(format!("factor on node {} is not {dim}x{dim}", i + 1)));
                    }
                    if linalg::unitarity_defect(m) > 1e-10 {
                        return Err(Error::Domain(format!("factor on node {} is not unitary", i + 1)));
                    }
                }
            }
        }
        Ok(Self {
            partition,
            terms,
            prefix: "lcu_".into(),
        })
    }

    pub fn with_prefix(mut self, prefix: &str) -> Self {
        self.prefix = prefix.into();
        self
    }

    pub fn partition(&self) -> &QubitPartition {
        &self.partition
    }

    pub fn terms(&self) -> &[LcuTerm] {
        &self.terms
    }

    /// `s = Σ_j β_j`.
    pub fn s(&self) -> f64 {
        self.terms.iter().map(|t| t.beta).sum()
    }

    /// Label width `m = ⌈log₂ J⌉`.
    pub fn width(&self) -> usize {
        caps::log2_ceil(self.terms.len())
    }

    /// Qubits charged by one `W`: `2mΓ` on a star.
    pub fn invocation_charge(&self, topo: &NetworkTopology) -> Result<u64> {
        Ok(2 * self.plan(topo)?.charge())
    }

    /// Adds `c·I + c·(−I)` so that the weights sum to 2 without changing `V`.
    pub fn padded_to_two(&self) -> Result<Self> {
        self.padded_to(2.0)
    }

    /// Adds `c·I + c·(−I)` so that the weights sum to `target`.
    pub fn padded_to(&self, target: f64) -> Result<Self> {
        let s = self.s();
        if s > target + 1e-12 {
            return Err(Error::Domain(format!("s = {s} exceeds {target}")));
        }
        if (s - target).abs() <= 1e-12 {
            return Ok(self.clone());
        }
        let c = (target - s) / 2.0;
        let gamma = self.partition.gamma();
        let dim1 = 1usize << self.partition.qubits_of(1).len();
        let mut terms = self.terms.clone();
        terms.push(LcuTerm {
            beta: c,
            factors: vec![None; gamma],
        });
        let mut neg = vec![None; gamma];
        neg[0] = Some(-linalg::identity(dim1));
        terms.push(LcuTerm { beta: c, factors: neg });
        Ok(Self {
            partition: self.partition.clone(),
            terms,
            prefix: self.prefix.clone(),
        })
    }

    /// Dense `V` on the system register.
    pub fn dense(&self) -> Result<Mat> {
        let n = self.partition.qubit_count();
        caps::check_dense("dense LCU", n)?;
        let layout = RegisterLayout::new().with("sys", n, Owner::Partitioned)?;
        let mut out = Mat::zeros(1 << n, 1 << n);
        for t in &self.terms {
            let u = sv::operator_from_columns(n, |j| {
                let mut s = embed_system(layout.clone(), &basis_amplitudes(n, j))?;
                for (i, f) in t.factors.iter().enumerate() {
                    if let Some(m) = f {
                        s.apply_matrix(&self.partition.qubits_of(i + 1), m, Condition::always())?;
                    }
                }
                Ok(system_slice(&s, n))
            })?;
            out += u * C64::new(t.beta, 0.0);
        }
        Ok(out)
    }

    pub fn copy_name(&self, gamma: usize) -> String {
        format!("{}c{gamma}", self.prefix)
    }

    fn plan(&self, topo: &NetworkTopology) -> Result<DistributionPlan> {
        if topo.gamma() != self.partition.gamma() {
            return Err(Error::Topology("network and partition disagree on Γ".into()));
        }
        let targets: Vec<usize> = (1..=topo.gamma()).collect();
        DistributionPlan::new(topo, &targets, self.width())
    }

    fn prep(&self, state: &mut StateVector, plan: &DistributionPlan) -> Result<()> {
        let phys = self.width().max(1);
        let s = self.s();
        let mut amps = vec![0.0; 1 << phys];
        for (j, t) in self.terms.iter().enumerate() {
            amps[j] = (t.beta / s).sqrt();
        }
        let root = plan.root().expect("at least one node");
        state.apply_register_matrix(&self.copy_name(root), &linalg::householder_prep(&amps), Condition::always())
    }

    fn select(&self, state: &mut StateVector, control: Condition, adjoint: bool) -> Result<()> {
        let layout = state.layout().clone();
        for g in 1..=self.partition.gamma() {
            let qubits = self.partition.qubits_of(g);
            for (j, t) in self.terms.iter().enumerate() {
                if let Some(m) = &t.factors[g - 1] {
                    let c = both(control, layout.condition(&self.copy_name(g), j)?)?;
                    if adjoint {
                        state.apply_matrix(&qubits, &m.adjoint(), c)?;
                    } else {
                        state.apply_matrix(&qubits, m, c)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies `W` to `state`, attaching the ancillas when missing, and
    /// returns the good-branch amplitude `‖(⟨0|⊗I)W|0⟩|ψ⟩‖`.
    pub fn apply_w(&self, state: &mut StateVector, topo: &NetworkTopology, ledger: &mut CommLedger) -> Result<f64> {
        if !state.layout().contains(&self.copy_name(1)) {
            self.attach(state, topo)?;
        }
        self.apply(state, topo, ledger, None, false)?;
        Ok(super::good_weight(state, &self.ancillas())?.sqrt())
    }

    /// `−WRW†RW`, which maps `|0⟩|ψ⟩` to `|0⟩V|ψ⟩` exactly when `s = 2`.
    pub fn oaa(&self, state: &mut StateVector, topo: &NetworkTopology, ledger: &mut CommLedger) -> Result<()> {
        let s = self.s();
        if (s - 2.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "oblivious amplification needs s = 2, got {s}; post-select instead"
            )));
        }
        if !state.layout().contains(&self.copy_name(1)) {
            self.attach(state, topo)?;
        }
        oblivious_amplification(self, state, topo, ledger)
    }
}

impl BlockOracle for LcuDecomposition {
    fn ancillas(&self) -> Vec<String> {
        (1..=self.partition.gamma()).map(|g| self.copy_name(g)).collect()
    }

    fn attach(&self, state: &mut StateVector, topo: &NetworkTopology) -> Result<()> {
        let owner = hub_owner(topo);
        for g in 1..=self.partition.gamma() {
            state.append_register(&self.copy_name(g), self.width().max(1), owner)?;
        }
        Ok(())
    }

    fn apply(
        &self,
        state: &mut StateVector,
        topo: &NetworkTopology,
        ledger: &mut CommLedger,
        control: Option<Condition>,
        adjoint: bool,
    ) -> Result<()> {
        if control.is_some() {
            super::charge_fan_out(topo, ledger, "control fan-out")?;
        }
        self.apply_uncharged_control(state, topo, ledger, control.unwrap_or_else(Condition::always), adjoint)
    }
}

impl LcuDecomposition {
    /// `W` with `select` conditioned on `control`, where the control qubit has
    /// already been fanned out.
    fn apply_uncharged_control(
        &self,
        state: &mut StateVector,
        topo: &NetworkTopology,
        ledger: &mut CommLedger,
        control: Condition,
        adjoint: bool,
    ) -> Result<()> {
        let plan = self.plan(topo)?;
        let name = |g: usize| self.copy_name(g);
        self.prep(state, &plan)?;
        distribute(state, &plan, &name, topo, ledger, "d-LCU distribute")?;
        self.select(state, control, adjoint)?;
        collect(state, &plan, &name, topo, ledger, "d-LCU return")?;
        self.prep(state, &plan)
    }

    /// Controlled `V` through amplification. The control qubit is fanned out
    /// once and kept at the nodes for all three `W` calls; on the control's
    /// 0 branch every `W` is the identity, so `−WRW†RW` is flipped back there.
    pub fn controlled_oaa(
        &self,
        state: &mut StateVector,
        topo: &NetworkTopology,
        ledger: &mut CommLedger,
        control: Condition,
    ) -> Result<()> {
        let s = self.s();
        if (s - 2.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("oblivious amplification needs s = 2, got {s}")));
        }
        if !state.layout().contains(&self.copy_name(1)) {
            self.attach(state, topo)?;
        }
        let names = self.ancillas();
        super::charge_fan_out(topo, ledger, "control fan-out")?;
        self.apply_uncharged_control(state, topo, ledger, control, false)?;
        super::reflect_zero(state, &names, topo, ledger)?;
        self.apply_uncharged_control(state, topo, ledger, control, true)?;
        super::reflect_zero(state, &names, topo, ledger)?;
        self.apply_uncharged_control(state, topo, ledger, control, false)?;
        state.apply_phase(control, -linalg::ONE);
        Ok(())
    }

    /// Qubits charged by one [`controlled_oaa`](Self::controlled_oaa): three
    /// `W`, two reflections and one control fan-out.
    pub fn controlled_oaa_charge(&self, topo: &NetworkTopology) -> Result<u64> {
        Ok(3 * self.invocation_charge(topo)? + 3 * super::fan_out_charge(topo)?)
    }
}
