//! Distributed truncated Taylor series.
//!
//! Each segment of length `ln2/α` applies `Σ_{k≤K} (−iHτ)^k/k!` through a
//! unary-controlled product of `K` d-BE selects, boosted to near-determinism
//! by one round of oblivious amplitude amplification.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::caps;
use crate::error::{Error, Result};
use crate::lcu::{self, BlockEncoding, BlockOracle};
use crate::linalg::{self, Mat, C64, I};
use crate::pauli::{cluster, ClusteredHamiltonian, OperatorSum, QubitPartition};
use crate::qnet::{CommLedger, NetworkTopology};
use crate::run::{basis_amplitudes, embed_system, system_slice, system_state, Prediction, RunResult};
use crate::sv::{self, Condition, Owner, RegisterLayout, StateVector};

pub const UNARY: &str = "u";

/// `Σ_{k>K} (ln2)^k / k!`, summed term by term.
pub fn tail(k: usize) -> f64 {
    let mut term = 1.0;
    for j in 1..=k {
        term *= LN_2 / j as f64;
    }
    let mut sum = 0.0;
    let mut j = k + 1;
    loop {
        term *= LN_2 / j as f64;
        sum += term;
        if term < sum * 1e-17 || term == 0.0 {
            return sum;
        }
        j += 1;
    }
}

/// `⌈αt/ln2⌉`, with a small allowance so exact multiples are not rounded up.
pub fn segment_count(alpha: f64, t: f64) -> usize {
    let x = alpha * t / LN_2;
    ((x - 1e-12).ceil().max(1.0)) as usize
}

/// Smallest `K` with `tail(K) ≤ budget`.
pub fn truncation_order_for_budget(budget: f64) -> usize {
    let mut k = 0;
    while tail(k) > budget {
        k += 1;
    }
    k
}

/// Smallest `K` with `r·tail(K) ≤ ε/2`, `r = ⌈αt/ln2⌉`.
pub fn truncation_order(alpha: f64, t: f64, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let r = segment_count(alpha, t);
    Ok(truncation_order_for_budget(eps / (2.0 * r as f64)))
}

/// `Σ_{k≤K} x^k/k!`.
pub fn truncated_exp(x: f64, k: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=k {
        term *= x / j as f64;
        sum += term;
    }
    sum
}

/// Segment layout of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPlan {
    pub alpha: f64,
    pub k: usize,
    /// Total segments, the residual one included.
    pub r: usize,
    /// Length of every full segment, `ln2/α`.
    pub segment_time: f64,
    /// Length of a shortened final segment, if any.
    pub residual_time: Option<f64>,
    /// `Σ_{k≤K}(ln2)^k/k!`.
    pub alpha_ts: f64,
}

impl TaylorPlan {
    pub fn new(alpha: f64, t: f64, k: usize) -> Result<Self> {
        if !(alpha > 0.0) || !(t > 0.0) {
            return Err(Error::Domain("Taylor plan needs α > 0 and t > 0".into()));
        }
        let r = segment_count(alpha, t);
        let segment_time = LN_2 / alpha;
        let rest = t - (r - 1) as f64 * segment_time;
        let residual_time = if (rest - segment_time).abs() <= 1e-12 * t.max(1.0) {
            None
        } else {
            Some(rest)
        };
        Ok(Self {
            alpha,
            k,
            r,
            segment_time,
            residual_time,
            alpha_ts: truncated_exp(LN_2, k),
        })
    }

    pub fn full_segments(&self) -> usize {
        self.r - usize::from(self.residual_time.is_some())
    }

    /// Per-segment bound `2·tail(K) + |2 − α_TS|`.
    pub fn segment_error_bound(&self) -> f64 {
        2.0 * tail(self.k) + (2.0 - self.alpha_ts).abs()
    }
}

/// `(r, t/r)` with `t/r = ln2/α`.
pub fn segment_plan(alpha: f64, t: f64) -> Result<(usize, f64)> {
    let p = TaylorPlan::new(alpha, t, 0)?;
    Ok((p.r, p.segment_time))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TsMode {
    /// Dense segment operator, ledger charged per circuit.
    #[default]
    Direct,
    /// Full unary circuit with all ancillas on the statevector.
    Strict,
}

/// The unary-encoded segment oracle `B†·select_unary·B` for one segment time.
#[derive(Debug, Clone)]
pub struct TaylorOracle {
    blocks: Vec<BlockEncoding>,
    unary_amps: Vec<f64>,
    alpha_ts: f64,
}

impl TaylorOracle {
    pub fn new(ch: &ClusteredHamiltonian, tau: f64, k: usize) -> Result<Self> {
        let blocks = (1..=k)
            .map(|i| BlockEncoding::new(ch, &format!("ts{i}_")))
            .collect::<Result<Vec<_>>>()?;
        let x = ch.alpha() * tau;
        let alpha_ts = truncated_exp(x, k);
        let mut unary_amps = vec![0.0; 1 << k.max(1)];
        let mut term = 1.0;
        for j in 0..=k {
            if j > 0 {
                term *= x / j as f64;
            }
            unary_amps[(1 << j) - 1] = (term / alpha_ts).sqrt();
        }
        Ok(Self {
            blocks,
            unary_amps,
            alpha_ts,
        })
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn alpha_ts(&self) -> f64 {
        self.alpha_ts
    }

    /// Amplitudes of `B_unary|0⟩` on the unary register, indexed by its
    /// little-endian value: `|1^k 0^{K−k}⟩` is `2^k − 1`.
    pub fn unary_weights(&self) -> &[f64] {
        &self.unary_amps
    }

    /// Qubits charged by one call: `K·(2Γw + Γ)` on a star.
    pub fn invocation_charge(&self, topo: &NetworkTopology) -> Result<u64> {
        let mut l = CommLedger::new();
        self.charge_invocation(topo, &mut l)?;
        Ok(l.qubits())
    }

    pub fn charge_invocation(&self, topo: &NetworkTopology, ledger: &mut CommLedger) -> Result<()> {
        for b in &self.blocks {
            b.charge_invocation(topo, ledger, true)?;
        }
        Ok(())
    }

    fn unary_prep(&self, state: &mut StateVector) -> Result<()> {
        let m = linalg::householder_prep(&self.unary_amps);
        state.apply_register_matrix(UNARY, &m, Condition::always())
    }
}

impl BlockOracle for TaylorOracle {
    fn ancillas(&self) -> Vec<String> {
        let mut v = vec![UNARY.to_string()];
        for b in &self.blocks {
            v.extend(b.ancillas());
        }
        v
    }

    fn attach(&self, state: &mut StateVector, topo: &NetworkTopology) -> Result<()> {
        state.append_register(UNARY, self.k().max(1), lcu::hub_owner(topo))?;
        for b in &self.blocks {
            b.attach(state, topo)?;
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
            return Err(Error::Domain("controlled Taylor oracle is not supported".into()));
        }
        self.unary_prep(state)?;
        for b in &self.blocks {
            b.prepare(state, topo, ledger)?;
        }
        let u = state.layout().offset(UNARY)?;
        let phase = if adjoint { I } else { -I };
        let order: Vec<usize> = if adjoint {
            (0..self.k()).rev().collect()
        } else {
            (0..self.k()).collect()
        };
        for i in order {
            lcu::charge_fan_out(topo, ledger, "control fan-out")?;
            self.blocks[i].select(state, Condition::qubit(u + i, true), phase)?;
        }
        for b in self.blocks.iter().rev() {
            b.unprepare(state, topo, ledger)?;
        }
        self.unary_prep(state)
    }
}

/// Dense `T_K(τ) = Σ_{k≤K} (−iHτ)^k/k!`.
pub fn taylor_operator(h: &Mat, tau: f64, k: usize) -> Mat {
    let dim = h.nrows();
    let step = h * C64::new(0.0, -tau);
    let mut term = linalg::identity(dim);
    let mut sum = term.clone();
    for j in 1..=k {
        term = &step * term / C64::new(j as f64, 0.0);
        sum += &term;
    }
    sum
}

/// Block `A` after one round of amplification: `3A − 4AA†A`.
pub fn amplified(a: &Mat) -> Mat {
    a * C64::new(3.0, 0.0) - a * a.adjoint() * a * C64::new(4.0, 0.0)
}

#[derive(Debug, Clone)]
pub struct DtsOptions {
    pub t: f64,
    pub eps: f64,
    /// Truncation order; chosen from `eps` when absent.
    pub k: Option<usize>,
    pub mode: TsMode,
    pub input: Option<Vec<C64>>,
}

pub fn run_dts(h: &OperatorSum, part: &QubitPartition, topo: &NetworkTopology, opts: &DtsOptions) -> Result<RunResult> {
    let ch = cluster(h, part)?;
    run_dts_clustered(&ch, topo, opts)
}

/// Per-input output of the implemented circuit: the system slice after all
/// segments, with the residual segment post-selected and rescaled by its
/// `α_TS'` so the map is linear.
struct Segments<'a> {
    ch: &'a ClusteredHamiltonian,
    topo: &'a NetworkTopology,
    plan: &'a TaylorPlan,
    mode: TsMode,
    dense: Option<(Mat, Option<Mat>)>,
}

impl Segments<'_> {
    fn run(&self, sys: &[C64], ledger: &mut CommLedger) -> Result<(Vec<C64>, Option<f64>)> {
        let n = self.ch.qubit_count();
        match self.mode {
            TsMode::Direct => {
                let (full, residual) = self.dense.as_ref().expect("dense operators built");
                let mut v = nalgebra::DVector::from_column_slice(sys);
                for _ in 0..self.plan.full_segments() {
                    v = full * v;
                    self.charge_segment(ledger)?;
                }
                let mut prob = None;
                if let Some(res) = residual {
                    let before = v.norm_squared();
                    let oracle = TaylorOracle::new(self.ch, self.plan.residual_time.unwrap(), self.plan.k)?;
                    let a = res / C64::new(oracle.alpha_ts(), 0.0);
                    let out = &a * &v;
                    prob = Some(out.norm_squared() / before);
                    v = out * C64::new(oracle.alpha_ts(), 0.0);
                    oracle.charge_invocation(self.topo, ledger)?;
                }
                Ok((v.iter().copied().collect(), prob))
            }
            TsMode::Strict => {
                let layout = RegisterLayout::new().with("sys", n, Owner::Partitioned)?;
                let full = TaylorOracle::new(self.ch, self.plan.segment_time, self.plan.k)?;
                let mut state = embed_system(layout, sys)?;
                full.attach(&mut state, self.topo)?;
                let names = full.ancillas();
                for _ in 0..self.plan.full_segments() {
                    lcu::oblivious_amplification(&full, &mut state, self.topo, ledger)?;
                    // Discard the bad branch left by the truncation deficit.
                    state.project(state.layout().all_zero(&names)?);
                }
                let mut prob = None;
                if let Some(tau) = self.plan.residual_time {
                    let res = TaylorOracle::new(self.ch, tau, self.plan.k)?;
                    let before = state.norm_sqr();
                    res.apply(&mut state, self.topo, ledger, None, false)?;
                    let kept = state.project(state.layout().all_zero(&names)?);
                    prob = Some(kept / before);
                    for a in state.amplitudes_mut() {
                        *a *= res.alpha_ts();
                    }
                }
                Ok((system_slice(&state, n), prob))
            }
        }
    }

    fn charge_segment(&self, ledger: &mut CommLedger) -> Result<()> {
        let oracle = TaylorOracle::new(self.ch, self.plan.segment_time, self.plan.k)?;
        for i in 0..3 {
            oracle.charge_invocation(self.topo, ledger)?;
            if i < 2 {
                lcu::charge_fan_out(self.topo, ledger, "reflection")?;
            }
        }
        Ok(())
    }
}

/// Exact ledger total: `r_full·(3K(2Γw+Γ) + 2Γ) + [residual]·K(2Γw+Γ)`.
pub fn ledger_identity(ch: &ClusteredHamiltonian, topo: &NetworkTopology, plan: &TaylorPlan) -> Result<u64> {
    let be = BlockEncoding::new(ch, "")?;
    let per_select = be.invocation_charge(topo)? + lcu::fan_out_charge(topo)?;
    let w_call = plan.k as u64 * per_select;
    let seg = 3 * w_call + 2 * lcu::fan_out_charge(topo)?;
    Ok(plan.full_segments() as u64 * seg + u64::from(plan.residual_time.is_some()) * w_call)
}

pub fn run_dts_clustered(ch: &ClusteredHamiltonian, topo: &NetworkTopology, opts: &DtsOptions) -> Result<RunResult> {
    let n = ch.qubit_count();
    let input = opts.input.clone().unwrap_or_else(|| basis_amplitudes(n, 0));
    let alpha = ch.alpha();
    let mut metadata = BTreeMap::new();
    metadata.insert("mode".into(), format!("{:?}", opts.mode).to_lowercase());
    if alpha == 0.0 || opts.t == 0.0 {
        return Ok(RunResult {
            protocol: "dts".into(),
            output: system_state(n, input)?,
            error_vs_exact: Some(0.0),
            ledger: CommLedger::new().report(),
            steps_or_queries: 0,
            predicted: predicted_cost_dts(ch, opts.t, opts.eps)?,
            success_probability: None,
            metadata,
        });
    }
    if opts.t < 0.0 {
        return Err(Error::Domain("negative evolution time".into()));
    }
    let k = match opts.k {
        Some(k) => k,
        None => truncation_order(alpha, opts.t, opts.eps)?,
    };
    let plan = TaylorPlan::new(alpha, opts.t, k)?;
    let dense = match opts.mode {
        TsMode::Direct => {
            caps::check_dense("direct Taylor segments", n)?;
            let hm = ch.flatten().dense_matrix()?;
            let a = taylor_operator(&hm, plan.segment_time, k) / C64::new(plan.alpha_ts, 0.0);
            let res = plan.residual_time.map(|tau| taylor_operator(&hm, tau, k));
            Some((amplified(&a), res))
        }
        TsMode::Strict => {
            let o = TaylorOracle::new(ch, plan.segment_time, k)?;
            let layout_qubits = n + k.max(1) + o.blocks.iter().map(|b| b.ancilla_qubits()).sum::<usize>();
            caps::check_qubits("strict Taylor layout (reduce K or Γ)", layout_qubits)?;
            None
        }
    };
    let seg = Segments {
        ch,
        topo,
        plan: &plan,
        mode: opts.mode,
        dense,
    };
    let mut ledger = CommLedger::new();
    let (out, prob) = seg.run(&input, &mut ledger)?;
    let mut output = system_state(n, out)?;
    output.normalize()?;

    let error_vs_exact = if n <= caps::dense_cap() {
        let implemented = sv::operator_from_columns(n, |j| {
            Ok(seg.run(&basis_amplitudes(n, j), &mut CommLedger::new())?.0)
        })?;
        let exact = sv::exact_evolution(&ch.flatten(), opts.t)?;
        Some(linalg::operator_distance(&implemented, &exact)?)
    } else {
        None
    };
    metadata.insert("K".into(), k.to_string());
    metadata.insert("alpha_ts".into(), format!("{}", plan.alpha_ts));
    metadata.insert("segment_error_bound".into(), format!("{:e}", plan.segment_error_bound()));
    Ok(RunResult {
        protocol: "dts".into(),
        output,
        error_vs_exact,
        ledger: ledger.report(),
        steps_or_queries: plan.r as u64,
        predicted: predicted_cost_dts(ch, opts.t, opts.eps)?,
        success_probability: prob,
        metadata,
    })
}

/// `α·t·Γ·⌈log₂(|E|+Γ)⌉·K`, constants set to 1.
pub fn predicted_cost_dts(ch: &ClusteredHamiltonian, t: f64, eps: f64) -> Result<Prediction> {
    let alpha = ch.alpha();
    let k = if alpha > 0.0 && t > 0.0 {
        truncation_order(alpha, t, eps)?
    } else {
        0
    };
    Ok(Prediction {
        value: dts_cost_formula(alpha, t, ch.gamma(), ch.num_edges(), k),
        formula: "α·t·Γ·⌈log₂(|E|+Γ)⌉·K".into(),
    })
}

pub fn dts_cost_formula(alpha: f64, t: f64, gamma: usize, edges: usize, k: usize) -> f64 {
    alpha * t * gamma as f64 * caps::log2_ceil(edges + gamma) as f64 * k as f64
}

/// Segment operator actually applied by an amplified full segment, for
/// bound checks.
pub fn segment_operator(ch: &ClusteredHamiltonian, plan: &TaylorPlan) -> Result<Mat> {
    let hm = ch.flatten().dense_matrix()?;
    let a = taylor_operator(&hm, plan.segment_time, plan.k) / C64::new(plan.alpha_ts, 0.0);
    Ok(amplified(&a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{parse_pauli_sum, random_pauli_sum};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_node(text: &str) -> ClusteredHamiltonian {
        cluster(&parse_pauli_sum(text).unwrap(), &QubitPartition::contiguous(&[1, 1]).unwrap()).unwrap()
    }

    /// Power series of `e^{ln2} − Σ_{j≤k}` evaluated as `2 − partial sum`.
    fn tail_by_complement(k: usize) -> f64 {
        2.0 - truncated_exp(LN_2, k)
    }

    #[test]
    fn tail_values() {
        assert!((tail(5) - 1.73e-4).abs() < 5e-6);
        assert!((tail(6) - 1.7e-5).abs() < 5e-7);
        for k in 0..8 {
            assert!((tail(k) - tail_by_complement(k)).abs() < 1e-14);
        }
        assert_eq!(truncation_order_for_budget(1e-4), 6);
        assert_eq!(truncation_order_for_budget(1.0), 0);
        let mut last = 0;
        for e in [1.0, 1e-1, 1e-2, 1e-4, 1e-8] {
            let k = truncation_order_for_budget(e);
            assert!(k >= last);
            last = k;
        }
    }

    #[test]
    fn segment_plans() {
        let (r, dt) = segment_plan(2.0, LN_2).unwrap();
        assert_eq!(r, 2);
        assert!((dt - LN_2 / 2.0).abs() < 1e-15);
        assert_eq!(segment_plan(1.0, LN_2).unwrap().0, 1);
        let p = TaylorPlan::new(1.0, 1.0, 2).unwrap();
        assert_eq!(p.r, 2);
        assert!((p.residual_time.unwrap() - (1.0 - LN_2)).abs() < 1e-15);
        assert_eq!(TaylorPlan::new(1.0, LN_2, 2).unwrap().residual_time, None);
    }

    #[test]
    fn unary_weights() {
        let ch = two_node("1 XI\n0.5 ZZ");
        let tau = LN_2 / ch.alpha();
        for k in 1..=3 {
            let o = TaylorOracle::new(&ch, tau, k).unwrap();
            let w = o.unary_weights();
            let norm: f64 = w.iter().map(|a| a * a).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            let fact: f64 = (1..=k).map(|j| j as f64).product();
            let top = (LN_2.powi(k as i32) / fact).sqrt() / o.alpha_ts().sqrt();
            assert!((w[(1 << k) - 1] - top).abs() < 1e-15);
        }
        let o = TaylorOracle::new(&ch, tau, 1).unwrap();
        let s = o.alpha_ts().sqrt();
        assert!((o.unary_weights()[0] - 1.0 / s).abs() < 1e-15);
        assert!((o.unary_weights()[1] - LN_2.sqrt() / s).abs() < 1e-15);
    }

    fn opts(t: f64, eps: f64, k: Option<usize>, mode: TsMode) -> DtsOptions {
        DtsOptions { t, eps, k, mode, input: None }
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let ch = two_node("0 XI");
        let res = run_dts_clustered(&ch, &NetworkTopology::star(2), &opts(1.0, 1e-3, None, TsMode::Direct)).unwrap();
        assert_eq!(res.error_vs_exact, Some(0.0));
        assert_eq!(res.ledger.qubits, 0);
        assert_eq!(res.output.amplitude(0), ONE_C);
    }

    const ONE_C: C64 = C64 { re: 1.0, im: 0.0 };

    #[test]
    fn strict_matches_direct() {
        let ch = two_node("0.6 XI\n0.3 IY\n0.5 ZZ");
        let topo = NetworkTopology::star(2);
        let t = LN_2 / ch.alpha();
        let d = run_dts_clustered(&ch, &topo, &opts(t, 0.1, Some(2), TsMode::Direct)).unwrap();
        let s = run_dts_clustered(&ch, &topo, &opts(t, 0.1, Some(2), TsMode::Strict)).unwrap();
        assert!((d.error_vs_exact.unwrap() - s.error_vs_exact.unwrap()).abs() < 1e-10);
        assert!(s.output.fidelity(&d.output) > 1.0 - 1e-12);
        let plan = TaylorPlan::new(ch.alpha(), t, 2).unwrap();
        let want = ledger_identity(&ch, &topo, &plan).unwrap();
        assert_eq!(want, 3 * 2 * (2 * 2 * 2 + 2) + 2 * 2);
        assert_eq!(d.ledger.qubits, want);
        assert_eq!(s.ledger.qubits, want);
    }

    #[test]
    fn segment_error_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=5 {
            let h = random_pauli_sum(&mut rng, 3, 5).unwrap();
            let ch = cluster(&h, &QubitPartition::contiguous(&[1, 2]).unwrap()).unwrap();
            let plan = TaylorPlan::new(ch.alpha(), LN_2 / ch.alpha(), k).unwrap();
            let seg = segment_operator(&ch, &plan).unwrap();
            let exact = sv::exact_evolution(&ch.flatten(), plan.segment_time).unwrap();
            let err = linalg::operator_distance(&seg, &exact).unwrap();
            assert!(err <= plan.segment_error_bound(), "K={k}: {err}");
        }
    }

    #[test]
    fn residual_run_meets_epsilon() {
        let ch = two_node("0.6 XI\n0.3 IY\n0.5 ZZ");
        let topo = NetworkTopology::star(2);
        for eps in [1e-2, 1e-4] {
            let res = run_dts_clustered(&ch, &topo, &opts(2.0, eps, None, TsMode::Direct)).unwrap();
            assert!(res.error_vs_exact.unwrap() <= eps);
            let plan = TaylorPlan::new(ch.alpha(), 2.0, res.metadata["K"].parse().unwrap()).unwrap();
            assert!(plan.residual_time.is_some());
            assert_eq!(res.ledger.qubits, ledger_identity(&ch, &topo, &plan).unwrap());
            assert!(res.success_probability.unwrap() > 0.0);
        }
    }

    #[test]
    fn prediction_doubles_with_time() {
        let ch = two_node("0.6 XI\n0.5 ZZ");
        let a = dts_cost_formula(ch.alpha(), 1.0, 2, 1, 4);
        let b = dts_cost_formula(ch.alpha(), 2.0, 2, 1, 4);
        assert!((b / a - 2.0).abs() < 1e-12);
        assert_eq!(caps::log2_ceil(2), 1);
    }
}
