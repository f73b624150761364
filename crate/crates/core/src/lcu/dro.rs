use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64, ONE};
use crate::qnet::{CommLedger, NetworkTopology, CONTROL};
use crate::sv::{Condition, Owner, StateVector, UnitarySpec, MIN_POSTSELECT_PROBABILITY};

use super::{both, charge_fan_out, hub_owner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoMode {
    #[default]
    Direct,
    Strict,
}

/// `R = I − (1 − e^{−iφ})|0…0⟩⟨0…0|` on the listed registers.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSpec {
    phi: f64,
    targets: Vec<String>,
    mode: RoMode,
}

impl ReflectionSpec {
    pub fn new(phi: f64, targets: Vec<String>, mode: RoMode) -> Result<Self> {
        if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&phi) {
            return Err(Error::Domain(format!("reflection phase {phi} outside [0, π/2]")));
        }
        if targets.is_empty() {
            return Err(Error::Domain("reflection without target registers".into()));
        }
        Ok(Self {
            phi: phi.clamp(0.0, FRAC_PI_2),
            targets,
            mode,
        })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    pub fn mode(&self) -> RoMode {
        self.mode
    }

    /// Success probability of one strict invocation, `1/(1+2sin(φ/2))²`.
    pub fn strict_success_probability(&self) -> f64 {
        let d = 1.0 + 2.0 * (self.phi / 2.0).sin();
        1.0 / (d * d)
    }
}

fn group_of(owner: Owner) -> Result<usize> {
    match owner {
        Owner::Control => Ok(CONTROL),
        Owner::Node(g) => Ok(g),
        Owner::Partitioned => Err(Error::Config(
            "strict d-RO needs target registers owned by a single node".into(),
        )),
    }
}

/// Applies the reflection. Direct mode is deterministic and returns 1. Strict
/// mode leaves the unnormalized post-selected branch, which equals
/// `R/(1+2sin(φ/2))` applied to the input, and returns its probability.
pub fn dro_apply(
    spec: &ReflectionSpec,
    state: &mut StateVector,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
) -> Result<f64> {
    match spec.mode {
        RoMode::Direct => {
            let cond = state.layout().all_zero(&spec.targets)?;
            state.apply_phase(cond, C64::from_polar(1.0, -spec.phi));
            charge_fan_out(topo, ledger, "d-RO")?;
            Ok(1.0)
        }
        RoMode::Strict => strict(spec, state, topo, ledger),
    }
}

fn strict(
    spec: &ReflectionSpec,
    state: &mut StateVector,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
) -> Result<f64> {
    let mut groups: Vec<(usize, Vec<String>)> = Vec::new();
    for t in &spec.targets {
        let g = group_of(state.layout().owner(t)?)?;
        match groups.iter_mut().find(|(h, _)| *h == g) {
            Some((_, v)) => v.push(t.clone()),
            None => groups.push((g, vec![t.clone()])),
        }
    }
    groups.sort_by_key(|(g, _)| *g);

    let total = state.norm_sqr();
    let cb = "ro_cb".to_string();
    state.append_register(&cb, 1, hub_owner(topo))?;
    let mut added = vec![cb.clone()];
    for (g, _) in &groups {
        let name = format!("ro_b{g}");
        let owner = if *g == CONTROL { Owner::Control } else { Owner::Node(*g) };
        state.append_register(&name, 1, owner)?;
        added.push(name);
    }
    let layout = state.layout().clone();
    let cb_q = layout.offset(&cb)?;
    let b_q: Vec<usize> = added[1..]
        .iter()
        .map(|n| layout.offset(n))
        .collect::<Result<_>>()?;

    let two_s = 2.0 * (spec.phi / 2.0).sin();
    let norm = (1.0 + two_s).sqrt();
    let g_cb = linalg::householder_prep(&[1.0 / norm, two_s.sqrt() / norm]);
    let prep = |state: &mut StateVector| -> Result<()> {
        state.apply_matrix(&[cb_q], &g_cb, Condition::always())?;
        for &q in &b_q {
            state.apply(&UnitarySpec::H(q))?;
        }
        Ok(())
    };

    prep(state)?;
    state.apply(&UnitarySpec::Phase {
        qubit: cb_q,
        phi: 1.5 * PI - spec.phi / 2.0,
    })?;
    charge_fan_out(topo, ledger, "d-RO")?;
    // R_γ = 2|0⟩⟨0| − I on each group, conditioned on C_b = 1 and γ_b = 1.
    for ((_, names), &bq) in groups.iter().zip(&b_q) {
        let on = both(Condition::qubit(cb_q, true), Condition::qubit(bq, true))?;
        state.apply_phase(on, -ONE);
        let zero = both(on, layout.all_zero(names)?)?;
        state.apply_phase(zero, -ONE);
    }
    charge_fan_out(topo, ledger, "d-RO")?;
    prep(state)?;

    let kept = state.project(layout.all_zero(&added)?);
    let p = kept / total;
    if p < MIN_POSTSELECT_PROBABILITY {
        return Err(Error::PostSelection(p));
    }
    let mut out = state.clone();
    for n in added.iter().rev() {
        out = out.remove_register(n, 0)?;
    }
    *state = out;
    Ok(p)
}
