use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lcu::{discard_ancillas, hub_owner, BlockOracle, LcuDecomposition, LcuTerm};
use crate::linalg::{Mat, C64, I, ONE};
use crate::pauli::QubitPartition;
use crate::qnet::{CommLedger, CommReport, NetworkTopology};
use crate::run::embed_system;
use crate::sv::{Condition, Owner, RegisterLayout, StateVector, UnitarySpec};

/// Counting register of phase estimation, held by the hub.
pub const COUNTING: &str = "qpe_k";

/// Eigenvectors must reproduce `V|ψ⟩ = λ|ψ⟩` to this residual.
const EIGEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct PhaseEstimate {
    pub k_bits: usize,
    pub distribution: Vec<f64>,
    pub top: usize,
    pub top_probability: f64,
    /// `θ` in `V|ψ⟩ = e^{2πiθ}|ψ⟩`, in `[0, 1)`, when the input was an eigenvector.
    pub true_phase: Option<f64>,
    pub per_call_charge: u64,
    pub ledger: CommReport,
    /// Worst-case bound `2^{2K}·√s·Γ·log₂J` with unit constants.
    pub paper_bound: f64,
}

impl PhaseEstimate {
    pub fn top_bits(&self) -> String {
        (0..self.k_bits)
            .rev()
            .map(|b| if self.top >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// `|⟨y|QFT†|Σ_x e^{2πiθx}|x⟩/√2^K⟩|²` for every `y`.
pub fn exact_qpe_distribution(theta: f64, k_bits: usize) -> Vec<f64> {
    let dim = 1usize << k_bits;
    (0..dim)
        .map(|y| {
            let delta = theta - y as f64 / dim as f64;
            let amp: C64 = (0..dim)
                .map(|x| C64::from_polar(1.0, 2.0 * PI * delta * x as f64))
                .sum();
            amp.norm_sqr() / (dim * dim) as f64
        })
        .collect()
}

/// `exp(2πiθ·Z^{⊗n})` as `|cos a|·(±I) + |sin a|·(±i Z^{⊗n})`, split over the
/// nodes of `partition`; `|0…0⟩` has eigenphase `θ`.
pub fn parity_phase_lcu(partition: QubitPartition, theta: f64) -> Result<LcuDecomposition> {
    let a = 2.0 * PI * theta;
    let gamma = partition.gamma();
    let parity = |g: usize| {
        let k = partition.qubits_of(g).len();
        Mat::from_fn(1 << k, 1 << k, |r, c| {
            if r != c {
                C64::new(0.0, 0.0)
            } else if (r.count_ones() & 1) == 1 {
                -ONE
            } else {
                ONE
            }
        })
    };
    let mut terms = Vec::new();
    let (c, s) = (a.cos(), a.sin());
    if c.abs() > 1e-15 {
        let mut f: Vec<Option<Mat>> = vec![None; gamma];
        if c < 0.0 {
            f[0] = Some(-Mat::identity(1 << partition.qubits_of(1).len(), 1 << partition.qubits_of(1).len()));
        }
        terms.push(LcuTerm { beta: c.abs(), factors: f });
    }
    if s.abs() > 1e-15 {
        let mut f: Vec<Option<Mat>> = (1..=gamma).map(|g| Some(parity(g))).collect();
        let phase = if s < 0.0 { -I } else { I };
        f[0] = f[0].take().map(|m| m * phase);
        terms.push(LcuTerm { beta: s.abs(), factors: f });
    }
    LcuDecomposition::new(partition, terms)
}

/// Exact ledger total: `(2^K − 1)` controlled amplified calls.
pub fn qpe_ledger_identity(u: &LcuDecomposition, topo: &NetworkTopology, k_bits: usize) -> Result<u64> {
    Ok(((1u64 << k_bits) - 1) * u.padded_to_two()?.controlled_oaa_charge(topo)?)
}

fn inverse_qft(k_bits: usize) -> Mat {
    let dim = 1usize << k_bits;
    let norm = 1.0 / (dim as f64).sqrt();
    Mat::from_fn(dim, dim, |y, x| {
        C64::from_polar(norm, -2.0 * PI * (x * y) as f64 / dim as f64)
    })
}

/// Applies `V` to a system-only state through amplification on a scratch
/// ledger.
fn apply_v(u: &LcuDecomposition, sys: &StateVector, topo: &NetworkTopology) -> Result<StateVector> {
    let mut s = sys.clone();
    let mut scratch = CommLedger::new();
    u.oaa(&mut s, topo, &mut scratch)?;
    discard_ancillas(&s, &u.ancillas())
}

fn eigenphase(u: &LcuDecomposition, sys: &StateVector, topo: &NetworkTopology) -> Result<Option<f64>> {
    let image = apply_v(u, sys, topo)?;
    let lambda = sys.inner(&image);
    let residual: f64 = image
        .amplitudes()
        .iter()
        .zip(sys.amplitudes())
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > EIGEN_TOL {
        return Ok(None);
    }
    Ok(Some((lambda.arg() / (2.0 * PI)).rem_euclid(1.0)))
}

/// Phase estimation with `K` counting qubits at the hub. Counting qubit `j`
/// controls `2^j` amplified d-LCU calls; the inverse Fourier transform is
/// local to the hub.
pub fn run_dqpe(
    u: &LcuDecomposition,
    eigenstate: &[C64],
    k_bits: usize,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
) -> Result<PhaseEstimate> {
    if k_bits == 0 {
        return Err(Error::Domain("phase estimation needs at least one counting qubit".into()));
    }
    let u = u.padded_to_two()?;
    let n = u.partition().qubit_count();
    if eigenstate.len() != 1 << n {
        return Err(Error::Shape(format!("{} amplitudes for {n} system qubits", eigenstate.len())));
    }
    let sys_layout = RegisterLayout::new().with("sys", n, Owner::Partitioned)?;
    let sys = embed_system(sys_layout.clone(), eigenstate)?;
    let true_phase = eigenphase(&u, &sys, topo)?;
    if true_phase.is_none() {
        log::warn!("phase estimation input is not an eigenvector; the distribution is a mixture");
    }

    let layout = sys_layout.with(COUNTING, k_bits, hub_owner(topo))?;
    let mut state = embed_system(layout, eigenstate)?;
    let counting = state.layout().qubits(COUNTING)?;
    for &q in &counting {
        state.apply(&UnitarySpec::H(q))?;
    }
    let mut run = CommLedger::new();
    for (j, &q) in counting.iter().enumerate() {
        for _ in 0..1u64 << j {
            u.controlled_oaa(&mut state, topo, &mut run, Condition::qubit(q, true))?;
        }
    }
    state.apply_register_matrix(COUNTING, &inverse_qft(k_bits), Condition::always())?;
    let distribution = state.probabilities(COUNTING)?;
    let (top, top_probability) = distribution
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::MIN), |acc, (y, p)| if p > acc.1 { (y, p) } else { acc });

    let per_call_charge = u.controlled_oaa_charge(topo)?;
    let gamma = topo.gamma() as f64;
    let paper_bound = 4f64.powi(k_bits as i32) * u.s().sqrt() * gamma * (u.terms().len() as f64).log2().max(1.0);
    ledger.absorb(&run);
    Ok(PhaseEstimate {
        k_bits,
        distribution,
        top,
        top_probability,
        true_phase,
        per_call_charge,
        ledger: run.report(),
        paper_bound,
    })
}
